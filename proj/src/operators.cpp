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

#include "pnpplo/operators.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "fft.hpp"
#include "pnpplo/error.hpp"
#include "pnpplo/rng.hpp"

namespace pnpplo {

using detail::cplx;

struct LinearOperator::NormCache {
  std::once_flag once;
  double value = 0.0;
};

LinearOperator::LinearOperator(std::shared_ptr<const OperatorKernel> kernel, Shape in_shape,
                               DomainTag in_tag, Shape out_shape, DomainTag out_tag,
                               std::optional<double> norm_bound)
    : kernel_(std::move(kernel)),
      in_shape_(in_shape),
      in_tag_(in_tag),
      out_shape_(out_shape),
      out_tag_(out_tag),
      norm_bound_(norm_bound),
      norm_cache_(std::make_shared<NormCache>()) {
  if (!kernel_) throw InvalidArgument("LinearOperator: null kernel");
  if (norm_bound_ && !(*norm_bound_ >= 0.0)) {
    throw InvalidArgument("LinearOperator: norm bound must be >= 0");
  }
}

Signal LinearOperator::apply(const Signal& x) const {
  if (x.shape() != in_shape_) {
    throw ShapeMismatch(name() + " apply: expected " + to_string(in_shape_) + ", got " +
                        to_string(x.shape()));
  }
  return kernel_->apply(x);
}

Signal LinearOperator::adjoint(const Signal& u) const {
  if (u.shape() != out_shape_) {
    throw ShapeMismatch(name() + " adjoint: expected " + to_string(out_shape_) + ", got " +
                        to_string(u.shape()));
  }
  return kernel_->adjoint(u);
}

double LinearOperator::norm_sq() const {
  std::call_once(norm_cache_->once, [this] {
    if (norm_bound_) {
      norm_cache_->value = *norm_bound_ * *norm_bound_;
    } else {
      const auto est = op_norm_estimate(*this, 1e-10, 5000);
      norm_cache_->value = est.value * est.value * (1.0 + 1e-6);
    }
  });
  return norm_cache_->value;
}

// ---------------------------------------------------------------------------
// Kernels

Kernel2D delta_kernel() { return Kernel2D{1, 1, {1.0}}; }

Kernel2D uniform_kernel(std::size_t size) {
  if (size == 0 || size % 2 == 0) throw InvalidArgument("uniform_kernel: size must be odd");
  const double w = 1.0 / static_cast<double>(size * size);
  return Kernel2D{size, size, std::vector<double>(size * size, w)};
}

Kernel2D gaussian_kernel(std::size_t size, double stddev) {
  if (size == 0 || size % 2 == 0) throw InvalidArgument("gaussian_kernel: size must be odd");
  if (!(stddev > 0.0)) throw InvalidArgument("gaussian_kernel: stddev must be positive");
  Kernel2D k{size, size, std::vector<double>(size * size)};
  const double half = static_cast<double>(size / 2);
  double sum = 0.0;
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = 0; c < size; ++c) {
      const double dr = static_cast<double>(r) - half;
      const double dc = static_cast<double>(c) - half;
      const double v = std::exp(-(dr * dr + dc * dc) / (2.0 * stddev * stddev));
      k.weights[r * size + c] = v;
      sum += v;
    }
  }
  for (double& v : k.weights) v /= sum;
  return k;
}

namespace {

// ---------------------------------------------------------------------------
// Identity

class IdentityKernel final : public OperatorKernel {
 public:
  Signal apply(const Signal& x) const override { return x; }
  Signal adjoint(const Signal& u) const override { return u; }
  std::string name() const override { return "identity"; }
};

// ---------------------------------------------------------------------------
// Dense

class DenseKernel final : public OperatorKernel {
 public:
  DenseKernel(std::size_t m, std::size_t n, std::vector<double> matrix)
      : m_(m), n_(n), a_(std::move(matrix)) {}

  Signal apply(const Signal& x) const override {
    std::vector<double> out(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n_; ++j) sum += a_[i * n_ + j] * x[j];
      out[i] = sum;
    }
    return Signal(Shape{m_, 1, 1}, std::move(out));
  }

  Signal adjoint(const Signal& u) const override {
    std::vector<double> out(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double ui = u[i];
      for (std::size_t j = 0; j < n_; ++j) out[j] += a_[i * n_ + j] * ui;
    }
    return Signal(Shape{n_, 1, 1}, std::move(out));
  }

  std::string name() const override { return "dense"; }

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<double> a_;
};

// ---------------------------------------------------------------------------
// Circular convolution

// Offsets of kernel taps relative to the centre, wrapped onto the grid.
std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

std::vector<cplx> transfer_function(const Kernel2D& k, std::size_t rows, std::size_t cols) {
  std::vector<cplx> h(rows * cols, cplx(0.0, 0.0));
  const auto cr = static_cast<std::ptrdiff_t>(k.rows / 2);
  const auto cc = static_cast<std::ptrdiff_t>(k.cols / 2);
  for (std::size_t p = 0; p < k.rows; ++p) {
    for (std::size_t q = 0; q < k.cols; ++q) {
      const std::size_t r = wrap(static_cast<std::ptrdiff_t>(p) - cr, rows);
      const std::size_t c = wrap(static_cast<std::ptrdiff_t>(q) - cc, cols);
      h[r * cols + c] += k.at(p, q);
    }
  }
  detail::fft2d(h, rows, cols, false);
  return h;
}

class CircularConv {
 public:
  CircularConv(Kernel2D kernel, Shape image, ConvPath path)
      : k_(std::move(kernel)), image_(image) {
    use_fft_ = path == ConvPath::fft ||
               (path == ConvPath::automatic && image.rows >= 32 && image.cols >= 32);
    h_ = transfer_function(k_, image.rows, image.cols);
  }

  Signal convolve(const Signal& x, bool adjoint) const {
    return use_fft_ ? via_fft(x, adjoint) : direct(x, adjoint);
  }

  double max_gain() const {
    double m = 0.0;
    for (const auto& v : h_) m = std::max(m, std::abs(v));
    return m;
  }

  const std::vector<cplx>& transfer() const { return h_; }

 private:
  // y[i,j] = sum_{p,q} k[p,q] x[i - (p - cr), j - (q - cc)]; the adjoint flips
  // the sign of the offset (correlation).
  Signal direct(const Signal& x, bool adjoint) const {
    const std::size_t rows = image_.rows, cols = image_.cols, ch = image_.channels;
    const auto cr = static_cast<std::ptrdiff_t>(k_.rows / 2);
    const auto cc = static_cast<std::ptrdiff_t>(k_.cols / 2);
    const std::ptrdiff_t sign = adjoint ? 1 : -1;
    // Wrapped source indices per tap offset, so the inner loops do no modulo.
    std::vector<std::size_t> row_of(k_.rows * rows), col_of(k_.cols * cols);
    for (std::size_t p = 0; p < k_.rows; ++p)
      for (std::size_t i = 0; i < rows; ++i)
        row_of[p * rows + i] = wrap(
            static_cast<std::ptrdiff_t>(i) + sign * (static_cast<std::ptrdiff_t>(p) - cr), rows);
    for (std::size_t q = 0; q < k_.cols; ++q)
      for (std::size_t j = 0; j < cols; ++j)
        col_of[q * cols + j] = wrap(
            static_cast<std::ptrdiff_t>(j) + sign * (static_cast<std::ptrdiff_t>(q) - cc), cols);
    Signal y(x.shape(), x.tag());
    const std::span<const double> src = x.data();
    const std::span<double> dst = y.data();
    for (std::size_t p = 0; p < k_.rows; ++p) {
      for (std::size_t q = 0; q < k_.cols; ++q) {
        const double w = k_.at(p, q);
        if (w == 0.0) continue;
        const std::size_t* cmap = &col_of[q * cols];
        // Columns [lo, hi) read a contiguous unwrapped source span.
        const std::ptrdiff_t shift = sign * (static_cast<std::ptrdiff_t>(q) - cc);
        const auto n = static_cast<std::ptrdiff_t>(cols);
        const auto lo = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(-shift, 0, n));
        const auto hi = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(n - shift, 0, n));
        for (std::size_t i = 0; i < rows; ++i) {
          const std::size_t r = row_of[p * rows + i];
          const double* in = &src[r * cols * ch];
          double* out = &dst[i * cols * ch];
          for (std::size_t j = 0; j < lo; ++j)
            for (std::size_t l = 0; l < ch; ++l) out[j * ch + l] += w * in[cmap[j] * ch + l];
          if (lo < hi) {
            const double* a = in + cmap[lo] * ch;
            double* b = out + lo * ch;
            const std::size_t len = (hi - lo) * ch;
            for (std::size_t t = 0; t < len; ++t) b[t] += w * a[t];
          }
          for (std::size_t j = hi; j < cols; ++j)
            for (std::size_t l = 0; l < ch; ++l) out[j * ch + l] += w * in[cmap[j] * ch + l];
        }
      }
    }
    return y;
  }

  Signal via_fft(const Signal& x, bool adjoint) const {
    const std::size_t rows = image_.rows, cols = image_.cols, ch = image_.channels;
    const double scale = 1.0 / static_cast<double>(rows * cols);
    Signal y(x.shape(), x.tag());
    std::vector<cplx> buf(rows * cols);
    for (std::size_t l = 0; l < ch; ++l) {
      for (std::size_t i = 0; i < rows * cols; ++i) buf[i] = cplx(x[i * ch + l], 0.0);
      detail::fft2d(buf, rows, cols, false);
      for (std::size_t i = 0; i < buf.size(); ++i) {
        buf[i] *= adjoint ? std::conj(h_[i]) : h_[i];
      }
      detail::fft2d(buf, rows, cols, true);
      for (std::size_t i = 0; i < rows * cols; ++i) y[i * ch + l] = buf[i].real() * scale;
    }
    return y;
  }

  Kernel2D k_;
  Shape image_;
  bool use_fft_ = false;
  std::vector<cplx> h_;
};

class ConvKernel final : public OperatorKernel {
 public:
  ConvKernel(Kernel2D kernel, Shape image, ConvPath path) : conv_(std::move(kernel), image, path) {}
  Signal apply(const Signal& x) const override { return conv_.convolve(x, false); }
  Signal adjoint(const Signal& u) const override { return conv_.convolve(u, true); }
  std::string name() const override { return "conv2d_circular"; }
  const CircularConv& conv() const { return conv_; }

 private:
  CircularConv conv_;
};

class DownsampleBlurKernel final : public OperatorKernel {
 public:
  DownsampleBlurKernel(Kernel2D kernel, std::size_t scale, Shape image, ConvPath path)
      : conv_(std::move(kernel), image, path), scale_(scale), image_(image) {}

  Signal apply(const Signal& x) const override {
    const Signal blurred = conv_.convolve(x, false);
    const Shape low = low_shape();
    Signal y(low, x.tag());
    for (std::size_t i = 0; i < low.rows; ++i)
      for (std::size_t j = 0; j < low.cols; ++j)
        for (std::size_t l = 0; l < low.channels; ++l)
          y.at(i, j, l) = blurred.at(i * scale_, j * scale_, l);
    return y;
  }

  Signal adjoint(const Signal& u) const override {
    Signal up(image_, u.tag());
    const Shape low = low_shape();
    for (std::size_t i = 0; i < low.rows; ++i)
      for (std::size_t j = 0; j < low.cols; ++j)
        for (std::size_t l = 0; l < low.channels; ++l)
          up.at(i * scale_, j * scale_, l) = u.at(i, j, l);
    return conv_.convolve(up, true);
  }

  std::string name() const override { return "downsample_blur"; }

  Shape low_shape() const {
    return Shape{image_.rows / scale_, image_.cols / scale_, image_.channels};
  }

  // ||S C||^2 is the largest eigenvalue of the low-resolution circulant
  // S C C* S*, whose symbol averages |H|^2 over the s^2 aliased frequencies.
  double exact_norm() const {
    const auto& h = conv_.transfer();
    const Shape low = low_shape();
    double best = 0.0;
    for (std::size_t k = 0; k < low.rows; ++k) {
      for (std::size_t l = 0; l < low.cols; ++l) {
        double sum = 0.0;
        for (std::size_t a = 0; a < scale_; ++a)
          for (std::size_t b = 0; b < scale_; ++b)
            sum += std::norm(h[(k + a * low.rows) * image_.cols + (l + b * low.cols)]);
        best = std::max(best, sum / static_cast<double>(scale_ * scale_));
      }
    }
    return std::sqrt(best);
  }

 private:
  CircularConv conv_;
  std::size_t scale_;
  Shape image_;
};

// ---------------------------------------------------------------------------
// Masked Fourier

class MaskedFourierKernel final : public OperatorKernel {
 public:
  explicit MaskedFourierKernel(SamplingMask mask) : mask_(std::move(mask)) {
    for (std::size_t i = 0; i < mask_.grid.size(); ++i)
      if (mask_.grid[i]) index_.push_back(i);
  }

  Signal apply(const Signal& x) const override {
    const std::size_t n = mask_.rows * mask_.cols;
    std::vector<cplx> buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = cplx(x[2 * i], x[2 * i + 1]);
    detail::fft2d(buf, mask_.rows, mask_.cols, false);
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    Signal y(Shape{index_.size(), 1, 2}, DomainTag::complex);
    for (std::size_t m = 0; m < index_.size(); ++m) {
      y[2 * m] = buf[index_[m]].real() * s;
      y[2 * m + 1] = buf[index_[m]].imag() * s;
    }
    return y;
  }

  Signal adjoint(const Signal& u) const override {
    const std::size_t n = mask_.rows * mask_.cols;
    std::vector<cplx> buf(n, cplx(0.0, 0.0));
    for (std::size_t m = 0; m < index_.size(); ++m) buf[index_[m]] = cplx(u[2 * m], u[2 * m + 1]);
    detail::fft2d(buf, mask_.rows, mask_.cols, true);
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    Signal x(Shape{mask_.rows, mask_.cols, 2}, DomainTag::complex);
    for (std::size_t i = 0; i < n; ++i) {
      x[2 * i] = buf[i].real() * s;
      x[2 * i + 1] = buf[i].imag() * s;
    }
    return x;
  }

  std::string name() const override { return "masked_fourier"; }

 private:
  SamplingMask mask_;
  std::vector<std::size_t> index_;
};

void require_odd_kernel(const Kernel2D& k) {
  if (k.rows == 0 || k.cols == 0 || k.rows % 2 == 0 || k.cols % 2 == 0) {
    throw InvalidArgument("convolution kernel dimensions must be odd, got " +
                          std::to_string(k.rows) + "x" + std::to_string(k.cols));
  }
  if (k.weights.size() != k.rows * k.cols) {
    throw InvalidArgument("convolution kernel weight count does not match its size");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Builders

LinearOperator identity_operator(Shape shape, DomainTag tag) {
  return LinearOperator(std::make_shared<IdentityKernel>(), shape, tag, shape, tag, 1.0);
}

LinearOperator dense_operator(std::size_t m, std::size_t n, std::vector<double> matrix) {
  if (m == 0 || n == 0) throw InvalidArgument("dense_operator: empty matrix");
  if (matrix.size() != m * n) {
    throw InvalidArgument("dense_operator: expected " + std::to_string(m * n) + " entries");
  }
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> a(
      matrix.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const double bound = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  return LinearOperator(std::make_shared<DenseKernel>(m, n, std::move(matrix)), Shape{n, 1, 1},
                        DomainTag::real, Shape{m, 1, 1}, DomainTag::real, bound);
}

LinearOperator conv2d_circular(const Kernel2D& kernel, Shape image, ConvPath path) {
  require_odd_kernel(kernel);
  if (image.size() == 0) throw InvalidArgument("conv2d_circular: empty image shape");
  auto k = std::make_shared<ConvKernel>(kernel, image, path);
  const double bound = k->conv().max_gain();
  return LinearOperator(std::move(k), image, DomainTag::real, image, DomainTag::real, bound);
}

LinearOperator downsample_blur(const Kernel2D& kernel, std::size_t scale, Shape image,
                               ConvPath path) {
  require_odd_kernel(kernel);
  if (scale == 0) throw InvalidArgument("downsample_blur: scale must be >= 1");
  if (image.rows % scale != 0 || image.cols % scale != 0) {
    throw InvalidArgument("downsample_blur: image " + to_string(image) +
                          " not divisible by scale " + std::to_string(scale));
  }
  if (scale == 1) return conv2d_circular(kernel, image, path);
  auto k = std::make_shared<DownsampleBlurKernel>(kernel, scale, image, path);
  const double bound = k->exact_norm();
  const Shape low = k->low_shape();
  return LinearOperator(std::move(k), image, DomainTag::real, low, DomainTag::real, bound);
}

std::string to_string(MaskKind kind) {
  switch (kind) {
    case MaskKind::random: return "random";
    case MaskKind::radial: return "radial";
    case MaskKind::cartesian: return "cartesian";
  }
  return "unknown";
}

MaskKind parse_mask_kind(const std::string& text) {
  if (text == "random") return MaskKind::random;
  if (text == "radial") return MaskKind::radial;
  if (text == "cartesian") return MaskKind::cartesian;
  throw InvalidArgument("unknown mask kind '" + text + "'");
}

std::size_t SamplingMask::count() const {
  return static_cast<std::size_t>(std::count(grid.begin(), grid.end(), std::uint8_t{1}));
}

namespace {

void finalize(SamplingMask& mask) {
  mask.fraction = static_cast<double>(mask.count()) /
                  static_cast<double>(mask.rows * mask.cols);
}

void random_mask(SamplingMask& mask, double fraction, Rng& rng) {
  const std::size_t n = mask.rows * mask.cols;
  const auto target = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  for (auto& cell : mask.grid) cell = rng.uniform() < fraction ? 1 : 0;
  // Exact-count correction: flip randomly chosen cells (DC excluded) until the
  // count matches; DC is forced on afterwards.
  std::size_t count = mask.count() - mask.grid[0];
  std::vector<std::size_t> on, off;
  for (std::size_t i = 1; i < n; ++i) (mask.grid[i] ? on : off).push_back(i);
  while (count > target && !on.empty()) {
    const std::size_t pick = rng.uniform_index(on.size());
    mask.grid[on[pick]] = 0;
    on[pick] = on.back();
    on.pop_back();
    --count;
  }
  while (count < target && !off.empty()) {
    const std::size_t pick = rng.uniform_index(off.size());
    mask.grid[off[pick]] = 1;
    off[pick] = off.back();
    off.pop_back();
    ++count;
  }
  mask.grid[0] = 1;
}

void cartesian_mask(SamplingMask& mask, double fraction, Rng& rng) {
  auto lines = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(mask.rows)));
  lines = std::clamp<std::size_t>(lines, 1, mask.rows);
  // Row 0 carries DC; the remaining lines are a uniform draw without
  // replacement (partial Fisher-Yates).
  std::vector<std::size_t> rows(mask.rows - 1);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i + 1;
  std::vector<std::size_t> chosen{0};
  for (std::size_t i = 0; i + 1 < lines; ++i) {
    const std::size_t j = i + rng.uniform_index(rows.size() - i);
    std::swap(rows[i], rows[j]);
    chosen.push_back(rows[i]);
  }
  for (std::size_t r : chosen)
    for (std::size_t c = 0; c < mask.cols; ++c) mask.grid[r * mask.cols + c] = 1;
}

// Spokes through the centre of the fftshift-ed grid at angles offset + j*pi/n,
// rasterized by nearest-cell stepping, then mapped back to the unshifted grid.
std::vector<std::uint8_t> radial_grid(std::size_t rows, std::size_t cols, std::size_t spokes,
                                      double offset) {
  std::vector<std::uint8_t> grid(rows * cols, 0);
  const double cy = static_cast<double>(rows / 2);
  const double cx = static_cast<double>(cols / 2);
  const double reach = std::hypot(static_cast<double>(rows), static_cast<double>(cols));
  const int steps = static_cast<int>(std::ceil(2.0 * reach));
  for (std::size_t s = 0; s < spokes; ++s) {
    const double angle = offset + std::numbers::pi * static_cast<double>(s) /
                                      static_cast<double>(spokes);
    const double dy = std::sin(angle), dx = std::cos(angle);
    for (int t = -steps; t <= steps; ++t) {
      const double step = 0.5 * t;
      const long r = std::lround(cy + step * dy);
      const long c = std::lround(cx + step * dx);
      if (r < 0 || c < 0 || r >= static_cast<long>(rows) || c >= static_cast<long>(cols)) continue;
      // Undo fftshift: shifted index i maps to (i - n/2) mod n.
      const std::size_t ur = (static_cast<std::size_t>(r) + rows - rows / 2) % rows;
      const std::size_t uc = (static_cast<std::size_t>(c) + cols - cols / 2) % cols;
      grid[ur * cols + uc] = 1;
    }
  }
  return grid;
}

void radial_mask(SamplingMask& mask, double fraction, Rng& rng) {
  const double offset = rng.uniform() * std::numbers::pi;
  const double target = fraction * static_cast<double>(mask.rows * mask.cols);
  const auto count_of = [](const std::vector<std::uint8_t>& g) {
    return static_cast<double>(std::count(g.begin(), g.end(), std::uint8_t{1}));
  };
  // Coverage grows monotonically-ish with spoke count; take the first count
  // that reaches the target, or its predecessor if that one is closer.
  std::vector<std::uint8_t> previous = radial_grid(mask.rows, mask.cols, 1, offset);
  if (count_of(previous) >= target) {
    mask.grid = std::move(previous);
    return;
  }
  const std::size_t max_spokes = 4 * std::max(mask.rows, mask.cols);
  for (std::size_t n = 2; n <= max_spokes; ++n) {
    auto current = radial_grid(mask.rows, mask.cols, n, offset);
    const double c = count_of(current);
    if (c >= target) {
      mask.grid = (c - target <= target - count_of(previous)) ? std::move(current)
                                                               : std::move(previous);
      return;
    }
    previous = std::move(current);
  }
  std::fill(mask.grid.begin(), mask.grid.end(), std::uint8_t{1});
}

}  // namespace

SamplingMask make_mask(MaskKind kind, double fraction, std::size_t rows, std::size_t cols,
                       std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw InvalidArgument("make_mask: fraction must lie in (0, 1]");
  }
  if (rows == 0 || cols == 0) throw InvalidArgument("make_mask: empty grid");
  SamplingMask mask{rows, cols, std::vector<std::uint8_t>(rows * cols, 0), 0.0, kind, seed};
  if (fraction == 1.0) {
    std::fill(mask.grid.begin(), mask.grid.end(), std::uint8_t{1});
    finalize(mask);
    return mask;
  }
  Rng rng(seed);
  switch (kind) {
    case MaskKind::random: random_mask(mask, fraction, rng); break;
    case MaskKind::cartesian: cartesian_mask(mask, fraction, rng); break;
    case MaskKind::radial: radial_mask(mask, fraction, rng); break;
  }
  mask.grid[0] = 1;
  finalize(mask);
  return mask;
}

LinearOperator masked_fourier(const SamplingMask& mask) {
  if (mask.rows == 0 || mask.cols == 0 || mask.grid.size() != mask.rows * mask.cols) {
    throw ShapeMismatch("masked_fourier: mask grid does not match its shape");
  }
  const std::size_t count = mask.count();
  if (count == 0) throw InvalidArgument("masked_fourier: mask selects no samples");
  return LinearOperator(std::make_shared<MaskedFourierKernel>(mask),
                        Shape{mask.rows, mask.cols, 2}, DomainTag::complex,
                        Shape{count, 1, 2}, DomainTag::complex, 1.0);
}

// ---------------------------------------------------------------------------
// Diagnostics

Signal random_signal(const Shape& shape, DomainTag tag, std::uint64_t seed) {
  Signal s(shape, tag);
  Rng rng(seed);
  for (double& v : s.data()) v = rng.gaussian();
  return s;
}

NormEstimate op_norm_estimate(const LinearOperator& op, double tol, int max_iter,
                              std::uint64_t seed) {
  if (!(tol > 0.0)) throw InvalidArgument("op_norm_estimate: tol must be positive");
  NormEstimate result;
  Signal v = random_signal(op.in_shape(), op.in_tag(), seed);
  double nv = norm2(v);
  if (nv == 0.0) return result;
  v *= 1.0 / nv;
  double previous = -1.0;
  for (int it = 1; it <= max_iter; ++it) {
    Signal w = op.adjoint(op.apply(v));
    const double rayleigh = std::max(0.0, inner(v, w));
    const double estimate = std::sqrt(rayleigh);
    result.value = estimate;
    result.iterations = it;
    const double nw = norm2(w);
    if (nw == 0.0) {
      result.converged = true;
      return result;
    }
    if (previous >= 0.0 && std::abs(estimate - previous) < tol) {
      result.converged = true;
      return result;
    }
    previous = estimate;
    v = std::move(w);
    v *= 1.0 / nw;
  }
  return result;
}

AdjointReport adjoint_check(const LinearOperator& op, int trials, double tol,
                            std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("adjoint_check: trials must be >= 1");
  AdjointReport report;
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    const Signal x = random_signal(op.in_shape(), op.in_tag(), rng.next_u64());
    const Signal u = random_signal(op.out_shape(), op.out_tag(), rng.next_u64());
    const double lhs = inner(op.apply(x), u);
    const double rhs = inner(x, op.adjoint(u));
    const double violation = std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
    report.worst_violation = std::max(report.worst_violation, violation);
    ++report.trials;
  }
  report.passed = report.worst_violation <= tol;
  return report;
}

}  // namespace pnpplo
