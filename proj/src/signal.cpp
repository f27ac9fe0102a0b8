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

#include "pnpplo/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pnpplo/error.hpp"
#include "pnpplo/rng.hpp"

namespace pnpplo {

std::string to_string(const Shape& shape) {
  return std::to_string(shape.rows) + "x" + std::to_string(shape.cols) + "x" +
         std::to_string(shape.channels);
}

namespace {

void validate(const Shape& shape, DomainTag tag, std::size_t length) {
  if (shape.rows == 0 || shape.cols == 0 || shape.channels == 0) {
    throw InvalidArgument("signal shape must be positive, got " + to_string(shape));
  }
  if (length != shape.size()) {
    throw ShapeMismatch("signal data length " + std::to_string(length) +
                        " does not match shape " + to_string(shape));
  }
  if (tag == DomainTag::complex && shape.channels % 2 != 0) {
    throw InvalidArgument("complex signal needs an even channel count, got " +
                          to_string(shape));
  }
}

}  // namespace

Signal::Signal(Shape shape, DomainTag tag)
    : shape_(shape), tag_(tag), data_(shape.size(), 0.0) {
  validate(shape_, tag_, data_.size());
}

Signal::Signal(Shape shape, std::vector<double> data, DomainTag tag)
    : shape_(shape), tag_(tag), data_(std::move(data)) {
  validate(shape_, tag_, data_.size());
}

Signal Signal::vector(std::initializer_list<double> values) {
  return vector(std::vector<double>(values));
}

Signal Signal::vector(std::vector<double> values) {
  const Shape shape{values.size(), 1, 1};
  return Signal(shape, std::move(values));
}

Signal Signal::filled(Shape shape, double value, DomainTag tag) {
  return Signal(shape, std::vector<double>(shape.size(), value), tag);
}

Signal Signal::reshaped(Shape shape, DomainTag tag) const {
  return Signal(shape, data_, tag);
}

Signal& Signal::operator+=(const Signal& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Signal& Signal::operator-=(const Signal& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Signal& Signal::operator*=(double scale) {
  for (double& v : data_) v *= scale;
  return *this;
}

Signal& Signal::axpy(double scale, const Signal& other) {
  require_same_shape(*this, other, "axpy");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += scale * other.data_[i];
  return *this;
}

Signal operator+(Signal a, const Signal& b) { return a += b; }
Signal operator-(Signal a, const Signal& b) { return a -= b; }
Signal operator*(double scale, Signal a) { return a *= scale; }

void require_same_shape(const Signal& a, const Signal& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeMismatch(std::string(what) + ": shape " + to_string(a.shape()) +
                        " vs " + to_string(b.shape()));
  }
}

double inner(const Signal& a, const Signal& b) {
  require_same_shape(a, b, "inner");
  const auto x = a.data();
  const auto y = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
  return sum;
}

double norm2(const Signal& a) {
  // Scaled accumulation avoids overflow for large magnitudes.
  double scale = 0.0;
  double ssq = 1.0;
  for (double v : a.data()) {
    if (v == 0.0) continue;
    const double av = std::abs(v);
    if (scale < av) {
      ssq = 1.0 + ssq * (scale / av) * (scale / av);
      scale = av;
    } else {
      ssq += (av / scale) * (av / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

double distance(const Signal& a, const Signal& b) {
  require_same_shape(a, b, "distance");
  return norm2(a - b);
}

double max_abs(const Signal& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

std::pair<Signal, Signal> split_complex(const Signal& z) {
  if (!z.is_complex()) throw InvalidArgument("split_complex: signal is not complex");
  const Shape half{z.shape().rows, z.shape().cols, z.shape().channels / 2};
  Signal re(half);
  Signal im(half);
  for (std::size_t i = 0; i < half.size(); ++i) {
    re[i] = z[2 * i];
    im[i] = z[2 * i + 1];
  }
  return {std::move(re), std::move(im)};
}

Signal merge_complex(const Signal& re, const Signal& im) {
  require_same_shape(re, im, "merge_complex");
  const Shape full{re.shape().rows, re.shape().cols, re.shape().channels * 2};
  Signal z(full, DomainTag::complex);
  for (std::size_t i = 0; i < re.size(); ++i) {
    z[2 * i] = re[i];
    z[2 * i + 1] = im[i];
  }
  return z;
}

Signal magnitude(const Signal& z) {
  auto [re, im] = split_complex(z);
  for (std::size_t i = 0; i < re.size(); ++i) re[i] = std::hypot(re[i], im[i]);
  return re;
}

Signal make_noise(const Shape& shape, DomainTag tag, const NoiseSpec& spec) {
  if (!(spec.sigma >= 0.0)) throw InvalidArgument("noise sigma must be >= 0");
  Signal n(shape, tag);
  if (spec.sigma == 0.0) return n;
  Rng rng(spec.seed);
  for (double& v : n.data()) v = spec.sigma * rng.gaussian();
  return n;
}

Signal add_noise(const Signal& x, const NoiseSpec& spec) {
  if (!(spec.sigma >= 0.0)) throw InvalidArgument("noise sigma must be >= 0");
  if (spec.sigma == 0.0) return x;
  return x + make_noise(x.shape(), x.tag(), spec);
}

double mse(const Signal& reference, const Signal& test) {
  require_same_shape(reference, test, "mse");
  double sum = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = reference[i] - test[i];
    sum += d * d;
  }
  return sum / static_cast<double>(reference.size());
}

double psnr(const Signal& reference, const Signal& test, double peak) {
  if (!(peak > 0.0)) throw InvalidArgument("psnr: peak must be positive");
  const double err = mse(reference, test);
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / err);
}

}  // namespace pnpplo
