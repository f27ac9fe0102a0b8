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

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace pnpplo {

struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t channels = 1;

  std::size_t size() const { return rows * cols * channels; }
  std::size_t pixels() const { return rows * cols; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& shape);

/// `complex` means channels are interleaved (re, im) pairs.
enum class DomainTag { real, complex };

/// Dense row-major, channel-interleaved array of doubles.
///
/// Element (r, c, ch) lives at ((r * cols) + c) * channels + ch. The Euclidean
/// geometry is the plain real inner product over all stored values, which for
/// complex-tagged data equals Re<a, b>.
class Signal {
 public:
  Signal() = default;
  explicit Signal(Shape shape, DomainTag tag = DomainTag::real);
  Signal(Shape shape, std::vector<double> data, DomainTag tag = DomainTag::real);

  /// Column vector of shape (n, 1, 1), handy for small dense problems.
  static Signal vector(std::initializer_list<double> values);
  static Signal vector(std::vector<double> values);
  static Signal filled(Shape shape, double value, DomainTag tag = DomainTag::real);

  const Shape& shape() const { return shape_; }
  DomainTag tag() const { return tag_; }
  bool is_complex() const { return tag_ == DomainTag::complex; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double at(std::size_t r, std::size_t c, std::size_t ch = 0) const {
    return data_[(r * shape_.cols + c) * shape_.channels + ch];
  }
  double& at(std::size_t r, std::size_t c, std::size_t ch = 0) {
    return data_[(r * shape_.cols + c) * shape_.channels + ch];
  }

  /// Same data, different tag/shape of equal size.
  Signal reshaped(Shape shape, DomainTag tag) const;

  Signal& operator+=(const Signal& other);
  Signal& operator-=(const Signal& other);
  Signal& operator*=(double scale);
  /// this += scale * other
  Signal& axpy(double scale, const Signal& other);

  friend bool operator==(const Signal&, const Signal&) = default;

 private:
  Shape shape_{};
  DomainTag tag_ = DomainTag::real;
  std::vector<double> data_;
};

Signal operator+(Signal a, const Signal& b);
Signal operator-(Signal a, const Signal& b);
Signal operator*(double scale, Signal a);

void require_same_shape(const Signal& a, const Signal& b, const char* what);

double inner(const Signal& a, const Signal& b);
double norm2(const Signal& a);
double distance(const Signal& a, const Signal& b);
double max_abs(const Signal& a);

/// Complex-tagged signal split into its real and imaginary planes (each a real
/// signal with half the channels), and the inverse.
std::pair<Signal, Signal> split_complex(const Signal& z);
Signal merge_complex(const Signal& re, const Signal& im);
/// Per-element modulus of a complex-tagged signal, as a real signal.
Signal magnitude(const Signal& z);

enum class NoiseKind { gaussian };

struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
  NoiseKind kind = NoiseKind::gaussian;
};

/// i.i.d. N(0, sigma^2) noise drawn from Rng(seed), one draw per stored value.
Signal make_noise(const Shape& shape, DomainTag tag, const NoiseSpec& spec);
/// x + make_noise(...). sigma == 0 returns x unchanged, bit for bit.
Signal add_noise(const Signal& x, const NoiseSpec& spec);

double mse(const Signal& reference, const Signal& test);
/// 10 log10(peak^2 / MSE) in dB; +infinity when the signals are identical.
double psnr(const Signal& reference, const Signal& test, double peak);

}  // namespace pnpplo
