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

#include "pnpplo/denoisers.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "pnpplo/error.hpp"
#include "pnpplo/rng.hpp"

namespace pnpplo {

const OrthoBasis& FixedPointOracle::basis() const {
  if (!basis_) throw InvalidArgument("fixed-point oracle unavailable for this denoiser");
  return *basis_;
}

Signal FixedPointOracle::sample(Rng& rng, double scale) const {
  return basis().sample(rng, scale);
}

Signal FixedPointOracle::project(const Signal& x) const { return basis().project(x); }

Denoiser::Denoiser(std::shared_ptr<const DenoiserKernel> kernel,
                   std::optional<Shape> native_shape, double sigma_f,
                   std::optional<double> alpha, FixedPointOracle oracle)
    : kernel_(std::move(kernel)),
      native_shape_(native_shape),
      sigma_f_(sigma_f),
      alpha_(alpha),
      oracle_(std::move(oracle)) {
  if (!kernel_) throw InvalidArgument("Denoiser: null kernel");
  if (alpha_ && !(*alpha_ < 1.0)) {
    throw InvalidArgument("Denoiser: demicontraction constant must be < 1");
  }
}

Signal Denoiser::denoise(const Signal& x) const {
  if (x.is_complex()) {
    const auto [re, im] = split_complex(x);
    return merge_complex(denoise(re), denoise(im));
  }
  if (native_shape_ && x.shape() != *native_shape_) {
    throw ShapeMismatch(name() + ": unsupported shape " + to_string(x.shape()) +
                        ", expected " + to_string(*native_shape_));
  }
  Signal out = kernel_->denoise(x);
  if (out.shape() != x.shape()) {
    throw ShapeMismatch(name() + ": denoiser changed the signal shape");
  }
  return out;
}

namespace {

class SubspaceKernel final : public DenoiserKernel {
 public:
  explicit SubspaceKernel(OrthoBasis basis) : basis_(std::move(basis)) {}
  Signal denoise(const Signal& x) const override { return basis_.project(x); }
  std::string name() const override { return "subspace"; }

 private:
  OrthoBasis basis_;
};

class LinearKernel final : public DenoiserKernel {
 public:
  LinearKernel(std::size_t n, std::vector<double> w) : n_(n), w_(std::move(w)) {}
  Signal denoise(const Signal& x) const override {
    Signal y(x.shape());
    for (std::size_t i = 0; i < n_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n_; ++j) s += w_[i * n_ + j] * x[j];
      y[i] = s;
    }
    return y;
  }
  std::string name() const override { return "linear"; }

 private:
  std::size_t n_;
  std::vector<double> w_;
};

class ScalingKernel final : public DenoiserKernel {
 public:
  explicit ScalingKernel(double c) : c_(c) {}
  Signal denoise(const Signal& x) const override { return c_ * x; }
  std::string name() const override { return "scaling"; }

 private:
  double c_;
};

class SoftThresholdKernel final : public DenoiserKernel {
 public:
  SoftThresholdKernel(OrthoBasis basis, double theta) : basis_(std::move(basis)), theta_(theta) {}
  Signal denoise(const Signal& x) const override {
    auto c = basis_.analyze(x);
    for (double& v : c) {
      const double shrunk = std::max(std::abs(v) - theta_, 0.0);
      v = std::copysign(shrunk, v) - v;
    }
    return x + basis_.synthesize(c);
  }
  std::string name() const override { return "soft_threshold"; }

 private:
  OrthoBasis basis_;
  double theta_;
};

class ReflectionKernel final : public DenoiserKernel {
 public:
  explicit ReflectionKernel(OrthoBasis basis) : basis_(std::move(basis)) {}
  Signal denoise(const Signal& x) const override { return 2.0 * basis_.project(x) - x; }
  std::string name() const override { return "reflection"; }

 private:
  OrthoBasis basis_;
};

class RelaxedKernel final : public DenoiserKernel {
 public:
  RelaxedKernel(Denoiser inner, double w) : inner_(std::move(inner)), w_(w) {}
  Signal denoise(const Signal& x) const override {
    Signal out = w_ * inner_.denoise(x);
    out.axpy(1.0 - w_, x);
    return out;
  }
  std::string name() const override { return "relaxed(" + inner_.name() + ")"; }

 private:
  Denoiser inner_;
  double w_;
};

}  // namespace

Denoiser subspace_denoiser(const OrthoBasis& basis) {
  return Denoiser(std::make_shared<SubspaceKernel>(basis), basis.shape(), 0.0, -1.0,
                  FixedPointOracle(basis));
}

Denoiser linear_denoiser(std::size_t n, std::vector<double> matrix) {
  if (n == 0 || matrix.size() != n * n) {
    throw InvalidArgument("linear_denoiser: expected an n x n matrix");
  }
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> w(matrix.data(), static_cast<Eigen::Index>(n),
                                     static_cast<Eigen::Index>(n));
  const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument("linear_denoiser: matrix is not symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig{Eigen::MatrixXd(w)};
  const auto& values = eig.eigenvalues();
  if (values.minCoeff() < -1e-12 || values.maxCoeff() > 1.0 + 1e-12) {
    throw InvalidArgument("linear_denoiser: spectrum must lie in [0, 1]");
  }
  const Shape shape{n, 1, 1};
  std::vector<Signal> fixed;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (std::abs(values(k) - 1.0) <= 1e-10) {
      Signal v(shape);
      for (std::size_t i = 0; i < n; ++i) v[i] = eig.eigenvectors()(static_cast<Eigen::Index>(i), k);
      fixed.push_back(std::move(v));
    }
  }
  OrthoBasis fix_basis = fixed.empty() ? OrthoBasis::trivial(shape) : OrthoBasis::dense(fixed);
  return Denoiser(std::make_shared<LinearKernel>(n, std::move(matrix)), shape, 0.0, -1.0,
                  FixedPointOracle(std::move(fix_basis)));
}

Denoiser scaling_denoiser(Shape shape, double factor) {
  if (!(factor >= 0.0 && factor <= 1.0)) {
    throw InvalidArgument("scaling_denoiser: factor must lie in [0, 1]");
  }
  OrthoBasis fix_basis = factor == 1.0 ? OrthoBasis::canonical(shape) : OrthoBasis::trivial(shape);
  return Denoiser(std::make_shared<ScalingKernel>(factor), shape, 0.0, -1.0,
                  FixedPointOracle(std::move(fix_basis)));
}

Denoiser soft_threshold_denoiser(const OrthoBasis& basis, double theta) {
  if (!(theta >= 0.0)) throw InvalidArgument("soft_threshold_denoiser: theta must be >= 0");
  OrthoBasis fix_basis = theta > 0.0 ? basis.complement() : OrthoBasis::canonical(basis.shape());
  return Denoiser(std::make_shared<SoftThresholdKernel>(basis, theta), basis.shape(), theta, -1.0,
                  FixedPointOracle(std::move(fix_basis)));
}

Denoiser reflection_denoiser(const OrthoBasis& basis) {
  return Denoiser(std::make_shared<ReflectionKernel>(basis), basis.shape(), 0.0, 0.0,
                  FixedPointOracle(basis));
}

Denoiser relax(const Denoiser& t, double w) {
  if (!(w > 0.0)) throw InvalidArgument("relax: w must be positive");
  std::optional<double> alpha;
  if (t.alpha()) {
    const double upper = 1.0 - *t.alpha();
    if (!(w < upper)) {
      throw InvalidArgument("relax: w = " + std::to_string(w) +
                            " outside the admissible interval (0, " + std::to_string(upper) +
                            ")");
    }
    alpha = 1.0 - upper / w;
  }
  return Denoiser(std::make_shared<RelaxedKernel>(t, w), t.native_shape(), t.sigma_f(), alpha,
                  t.oracle());
}

double red_value(const Denoiser& t, const Signal& x) {
  return 0.5 * inner(x, x - t.denoise(x));
}

double demicontraction_slack(const Denoiser& t, const Signal& x, const Signal& y, double alpha) {
  const Signal tx = t.denoise(x);
  const Signal step = tx - x;
  Signal sum = tx + x;
  sum.axpy(-2.0, y);
  const double c = norm2(step);
  return alpha * c * c - inner(step, sum);
}

AlphaEstimate estimate_alpha(const Denoiser& t, const std::vector<Signal>& samples,
                             const FixedPointOracle& oracle, const AlphaOptions& options) {
  if (!oracle.known()) throw InvalidArgument("estimate_alpha: fixed-point oracle required");
  if (options.count < 1) throw InvalidArgument("estimate_alpha: count must be >= 1");
  if (options.quantile && !(*options.quantile >= 0.0 && *options.quantile <= 1.0)) {
    throw InvalidArgument("estimate_alpha: quantile must lie in [0, 1]");
  }
  Rng rng(options.seed);
  std::vector<double> ratios;
  AlphaEstimate est;
  for (const auto& x : samples) {
    const Signal tx = t.denoise(x);
    const double step = norm2(tx - x);
    for (std::size_t j = 0; j < options.count; ++j) {
      const Signal y = oracle.sample(rng, options.fixed_point_scale);
      if (step < 1e-12 * (1.0 + norm2(x))) {
        ++est.skipped;
        continue;
      }
      // ||Tx - y||^2 - ||x - y||^2 = <Tx - x, Tx + x - 2y>, without the
      // cancellation of subtracting two squared norms.
      Signal sum = tx + x;
      sum.axpy(-2.0, y);
      ratios.push_back(inner(tx - x, sum) / (step * step));
    }
  }
  est.pairs_used = ratios.size();
  if (ratios.empty()) {
    est.identity_on_samples = true;
    est.alpha = std::numeric_limits<double>::quiet_NaN();
    return est;
  }
  if (options.quantile) {
    std::sort(ratios.begin(), ratios.end());
    const auto pos = static_cast<std::size_t>(
        std::llround(*options.quantile * static_cast<double>(ratios.size() - 1)));
    est.alpha = ratios[pos];
  } else {
    est.alpha = *std::max_element(ratios.begin(), ratios.end());
  }
  return est;
}

}  // namespace pnpplo
