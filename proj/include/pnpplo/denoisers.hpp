// Copyright 2026 The pnpplo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pnpplo/basis.hpp"
#include "pnpplo/signal.hpp"

namespace pnpplo {

class Rng;

/// Source of points known to lie in Fix(T). Built-in denoisers have linear
/// fixed-point sets, so the oracle is an orthonormal basis of that subspace;
/// external denoisers carry no oracle.
class FixedPointOracle {
 public:
  FixedPointOracle() = default;
  explicit FixedPointOracle(OrthoBasis fix_basis) : basis_(std::move(fix_basis)) {}

  bool known() const { return basis_.has_value(); }
  const OrthoBasis& basis() const;
  Signal sample(Rng& rng, double scale = 1.0) const;
  /// Exact metric projection onto Fix(T).
  Signal project(const Signal& x) const;

 private:
  std::optional<OrthoBasis> basis_;
};

/// Implementation hook. Receives real signals of the denoiser's native shape.
class DenoiserKernel {
 public:
  virtual ~DenoiserKernel() = default;
  virtual Signal denoise(const Signal& x) const = 0;
  virtual std::string name() const = 0;
};

/// The operator T of the fixed-point prior.
///
/// Complex-tagged inputs are split into real and imaginary planes that are
/// denoised independently. `alpha` is the advertised demicontraction constant:
/// ||T(x) - y||^2 <= ||x - y||^2 + alpha ||T(x) - x||^2 for y in Fix(T).
class Denoiser {
 public:
  Denoiser(std::shared_ptr<const DenoiserKernel> kernel, std::optional<Shape> native_shape,
           double sigma_f, std::optional<double> alpha, FixedPointOracle oracle);

  Signal denoise(const Signal& x) const;
  Signal operator()(const Signal& x) const { return denoise(x); }

  std::string name() const { return kernel_->name(); }
  double sigma_f() const { return sigma_f_; }
  std::optional<double> alpha() const { return alpha_; }
  const FixedPointOracle& oracle() const { return oracle_; }
  /// Real shape the kernel accepts, when it is fixed.
  std::optional<Shape> native_shape() const { return native_shape_; }

 private:
  std::shared_ptr<const DenoiserKernel> kernel_;
  std::optional<Shape> native_shape_;
  double sigma_f_;
  std::optional<double> alpha_;
  FixedPointOracle oracle_;
};

/// Orthogonal projection onto span(basis); alpha = -1.
Denoiser subspace_denoiser(const OrthoBasis& basis);
/// x -> W x for symmetric W (row-major n x n) with spectrum in [0, 1]; alpha =
/// -1, Fix(T) is the eigenvalue-1 eigenspace.
Denoiser linear_denoiser(std::size_t n, std::vector<double> matrix);
/// x -> c x on signals of `shape`, c in [0, 1].
Denoiser scaling_denoiser(Shape shape, double factor);
/// Soft-thresholding of the coefficients in `basis` by theta, other
/// components untouched: the proximal map of theta * ||B^T x||_1. alpha = -1.
Denoiser soft_threshold_denoiser(const OrthoBasis& basis, double theta);
/// Reflection 2P - Id through span(basis): nonexpansive, alpha = 0.
Denoiser reflection_denoiser(const OrthoBasis& basis);

/// T_w = w T + (1 - w) Id. When T advertises alpha, w must lie in
/// (0, 1 - alpha); the result advertises 1 - (1 - alpha) / w.
Denoiser relax(const Denoiser& t, double w);

/// 0.5 <x, x - T(x)>.
double red_value(const Denoiser& t, const Signal& x);

/// ||x - y||^2 + alpha ||T(x) - x||^2 - ||T(x) - y||^2 (non-negative when the
/// demicontraction inequality holds).
double demicontraction_slack(const Denoiser& t, const Signal& x, const Signal& y, double alpha);

struct AlphaEstimate {
  /// Worst (or quantile) ratio (||Tx - y||^2 - ||x - y||^2) / ||Tx - x||^2.
  double alpha = 0.0;
  std::size_t pairs_used = 0;
  std::size_t skipped = 0;
  /// Every pair was skipped: T acted as the identity on all samples.
  bool identity_on_samples = false;
};

struct AlphaOptions {
  /// Fixed points drawn per sample.
  std::size_t count = 1;
  std::uint64_t seed = 0xa1fa;
  /// Standard deviation of oracle coefficients.
  double fixed_point_scale = 1.0;
  /// When set, report this quantile of the ratios instead of the maximum.
  std::optional<double> quantile;
};

AlphaEstimate estimate_alpha(const Denoiser& t, const std::vector<Signal>& samples,
                             const FixedPointOracle& oracle, const AlphaOptions& options = {});

}  // namespace pnpplo
