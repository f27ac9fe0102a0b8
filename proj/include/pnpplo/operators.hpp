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

#include "pnpplo/signal.hpp"

namespace pnpplo {

/// Implementation hook for a linear map. Shapes are validated by
/// LinearOperator before these are called.
class OperatorKernel {
 public:
  virtual ~OperatorKernel() = default;
  virtual Signal apply(const Signal& x) const = 0;
  virtual Signal adjoint(const Signal& u) const = 0;
  virtual std::string name() const = 0;
};

/// A bounded linear map A together with its adjoint and, where known, an
/// upper bound on its operator norm. Immutable and cheap to copy.
class LinearOperator {
 public:
  LinearOperator(std::shared_ptr<const OperatorKernel> kernel, Shape in_shape,
                 DomainTag in_tag, Shape out_shape, DomainTag out_tag,
                 std::optional<double> norm_bound);

  Signal apply(const Signal& x) const;
  Signal adjoint(const Signal& u) const;

  const Shape& in_shape() const { return in_shape_; }
  const Shape& out_shape() const { return out_shape_; }
  DomainTag in_tag() const { return in_tag_; }
  DomainTag out_tag() const { return out_tag_; }
  std::optional<double> norm_bound() const { return norm_bound_; }
  std::string name() const { return kernel_->name(); }

  /// Upper bound on ||A||^2: the exact bound squared when known, otherwise a
  /// power-iteration estimate inflated by (1 + 1e-6). Computed once.
  double norm_sq() const;

 private:
  std::shared_ptr<const OperatorKernel> kernel_;
  Shape in_shape_;
  DomainTag in_tag_;
  Shape out_shape_;
  DomainTag out_tag_;
  std::optional<double> norm_bound_;
  struct NormCache;
  std::shared_ptr<NormCache> norm_cache_;
};

/// Odd-sized 2-D filter, centre tap at (rows/2, cols/2).
struct Kernel2D {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> weights;

  double at(std::size_t r, std::size_t c) const { return weights[r * cols + c]; }
};

Kernel2D delta_kernel();
/// size x size box filter with weights 1/size^2.
Kernel2D uniform_kernel(std::size_t size);
/// Sampled isotropic Gaussian truncated to size x size, normalized to sum 1.
Kernel2D gaussian_kernel(std::size_t size, double stddev);

/// Which evaluation path circular convolution uses. `automatic` picks the
/// frequency domain when both image dimensions are >= 32.
enum class ConvPath { automatic, direct, fft };

LinearOperator identity_operator(Shape shape, DomainTag tag = DomainTag::real);

/// Dense m x n matrix (row-major) acting on (n,1,1) signals. The norm bound is
/// the largest singular value.
LinearOperator dense_operator(std::size_t m, std::size_t n, std::vector<double> matrix);

/// Periodic-boundary convolution on `image` (applied per channel). The norm
/// bound is max |DFT(kernel)| over the image grid, exact for circulants.
LinearOperator conv2d_circular(const Kernel2D& kernel, Shape image,
                               ConvPath path = ConvPath::automatic);

/// Circular blur followed by keeping every scale-th pixel in both directions.
LinearOperator downsample_blur(const Kernel2D& kernel, std::size_t scale, Shape image,
                               ConvPath path = ConvPath::automatic);

enum class MaskKind { random, radial, cartesian };

std::string to_string(MaskKind kind);
MaskKind parse_mask_kind(const std::string& text);

/// Boolean k-space selection on an unshifted DFT grid (DC at cell (0, 0)).
struct SamplingMask {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> grid;
  /// Achieved fraction: count() / (rows * cols).
  double fraction = 0.0;
  MaskKind kind = MaskKind::random;
  std::uint64_t seed = 0;

  std::size_t count() const;
  bool at(std::size_t r, std::size_t c) const { return grid[r * cols + c] != 0; }
};

SamplingMask make_mask(MaskKind kind, double fraction, std::size_t rows, std::size_t cols,
                       std::uint64_t seed);

/// Unitary 2-D DFT of a complex (rows, cols, 2) image followed by selection of
/// the masked cells in row-major order. Output shape (count, 1, 2), complex.
LinearOperator masked_fourier(const SamplingMask& mask);

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Power iteration on A*A from a seeded random start.
NormEstimate op_norm_estimate(const LinearOperator& op, double tol, int max_iter,
                              std::uint64_t seed = 0x5eed);

struct AdjointReport {
  bool passed = true;
  double worst_violation = 0.0;
  int trials = 0;
};

/// Compares <Ax, u> with <x, A*u> on seeded random pairs; the violation is
/// |difference| / (1 + |<Ax, u>|).
AdjointReport adjoint_check(const LinearOperator& op, int trials, double tol,
                            std::uint64_t seed = 0xad7);

/// Random signal with i.i.d. standard normal entries.
Signal random_signal(const Shape& shape, DomainTag tag, std::uint64_t seed);

}  // namespace pnpplo
