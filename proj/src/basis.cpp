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

#include "pnpplo/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pnpplo/error.hpp"
#include "pnpplo/projections.hpp"
#include "pnpplo/rng.hpp"

namespace pnpplo {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void require_real_shape(const Signal& x, const Shape& shape, const char* what) {
  if (x.shape() != shape) {
    throw ShapeMismatch(std::string(what) + ": expected " + to_string(shape) + ", got " +
                        to_string(x.shape()));
  }
}

// One Haar level on the top-left h x w block of a channel plane, rows then
// columns, Mallat layout (approximation first).
void haar_forward_level(std::vector<double>& plane, std::size_t cols, std::size_t h,
                        std::size_t w) {
  std::vector<double> tmp(std::max(h, w));
  for (std::size_t r = 0; r < h; ++r) {
    double* row = &plane[r * cols];
    for (std::size_t k = 0; k < w / 2; ++k) {
      tmp[k] = (row[2 * k] + row[2 * k + 1]) * kInvSqrt2;
      tmp[w / 2 + k] = (row[2 * k] - row[2 * k + 1]) * kInvSqrt2;
    }
    std::copy(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(w), row);
  }
  for (std::size_t c = 0; c < w; ++c) {
    for (std::size_t k = 0; k < h / 2; ++k) {
      const double a = plane[(2 * k) * cols + c];
      const double b = plane[(2 * k + 1) * cols + c];
      tmp[k] = (a + b) * kInvSqrt2;
      tmp[h / 2 + k] = (a - b) * kInvSqrt2;
    }
    for (std::size_t r = 0; r < h; ++r) plane[r * cols + c] = tmp[r];
  }
}

void haar_inverse_level(std::vector<double>& plane, std::size_t cols, std::size_t h,
                        std::size_t w) {
  std::vector<double> tmp(std::max(h, w));
  for (std::size_t c = 0; c < w; ++c) {
    for (std::size_t k = 0; k < h / 2; ++k) {
      const double a = plane[k * cols + c];
      const double d = plane[(h / 2 + k) * cols + c];
      tmp[2 * k] = (a + d) * kInvSqrt2;
      tmp[2 * k + 1] = (a - d) * kInvSqrt2;
    }
    for (std::size_t r = 0; r < h; ++r) plane[r * cols + c] = tmp[r];
  }
  for (std::size_t r = 0; r < h; ++r) {
    double* row = &plane[r * cols];
    for (std::size_t k = 0; k < w / 2; ++k) {
      const double a = row[k];
      const double d = row[w / 2 + k];
      tmp[2 * k] = (a + d) * kInvSqrt2;
      tmp[2 * k + 1] = (a - d) * kInvSqrt2;
    }
    std::copy(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(w), row);
  }
}

}  // namespace

OrthoBasis OrthoBasis::dense(const std::vector<Signal>& columns) {
  if (columns.empty()) throw InvalidArgument("OrthoBasis::dense needs at least one column");
  return dense_orthonormal(orthonormalize(columns));
}

OrthoBasis OrthoBasis::dense_orthonormal(std::vector<Signal> columns) {
  if (columns.empty()) throw InvalidArgument("OrthoBasis: empty column set");
  OrthoBasis b;
  b.shape_ = columns.front().shape();
  for (const auto& c : columns) {
    if (c.shape() != b.shape_ || c.is_complex()) {
      throw ShapeMismatch("OrthoBasis: columns must share one real shape");
    }
  }
  for (std::size_t i = 0; i < columns.size(); ++i)
    for (std::size_t j = i; j < columns.size(); ++j)
      if (std::abs(inner(columns[i], columns[j]) - (i == j ? 1.0 : 0.0)) > 1e-10)
        throw InvalidArgument("OrthoBasis: columns are not orthonormal");
  b.columns_ = std::move(columns);
  return b;
}

OrthoBasis OrthoBasis::canonical(Shape shape) {
  OrthoBasis b;
  b.shape_ = shape;
  b.transform_ = Transform::canonical;
  b.selection_.resize(shape.size());
  std::iota(b.selection_.begin(), b.selection_.end(), std::size_t{0});
  return b;
}

OrthoBasis OrthoBasis::haar(Shape shape, int levels) {
  if (levels < 0) throw InvalidArgument("haar: levels must be >= 0");
  const std::size_t block = std::size_t{1} << levels;
  if (shape.rows % block != 0 || shape.cols % block != 0) {
    throw InvalidArgument("haar: shape " + to_string(shape) + " not divisible by 2^" +
                          std::to_string(levels));
  }
  OrthoBasis b = canonical(shape);
  b.transform_ = Transform::haar;
  b.levels_ = levels;
  return b;
}

OrthoBasis OrthoBasis::trivial(Shape shape) {
  OrthoBasis b;
  b.shape_ = shape;
  b.transform_ = Transform::canonical;
  return b;
}

std::size_t OrthoBasis::rank() const {
  return transform_ == Transform::none ? columns_.size() : selection_.size();
}

std::vector<double> OrthoBasis::forward(const Signal& x) const {
  std::vector<double> c = x.values();
  if (transform_ != Transform::haar) return c;
  const std::size_t rows = shape_.rows, cols = shape_.cols, ch = shape_.channels;
  std::vector<double> plane(rows * cols);
  for (std::size_t l = 0; l < ch; ++l) {
    for (std::size_t i = 0; i < rows * cols; ++i) plane[i] = c[i * ch + l];
    std::size_t h = rows, w = cols;
    for (int level = 0; level < levels_; ++level, h /= 2, w /= 2)
      haar_forward_level(plane, cols, h, w);
    for (std::size_t i = 0; i < rows * cols; ++i) c[i * ch + l] = plane[i];
  }
  return c;
}

Signal OrthoBasis::inverse(std::vector<double> c) const {
  if (transform_ == Transform::haar) {
    const std::size_t rows = shape_.rows, cols = shape_.cols, ch = shape_.channels;
    std::vector<double> plane(rows * cols);
    for (std::size_t l = 0; l < ch; ++l) {
      for (std::size_t i = 0; i < rows * cols; ++i) plane[i] = c[i * ch + l];
      for (int level = levels_ - 1; level >= 0; --level)
        haar_inverse_level(plane, cols, rows >> level, cols >> level);
      for (std::size_t i = 0; i < rows * cols; ++i) c[i * ch + l] = plane[i];
    }
  }
  return Signal(shape_, std::move(c));
}

std::vector<double> OrthoBasis::analyze(const Signal& x) const {
  require_real_shape(x, shape_, "OrthoBasis::analyze");
  if (transform_ == Transform::none) {
    std::vector<double> c(columns_.size());
    for (std::size_t i = 0; i < columns_.size(); ++i) c[i] = inner(columns_[i], x);
    return c;
  }
  const auto full = forward(x);
  std::vector<double> c(selection_.size());
  for (std::size_t i = 0; i < selection_.size(); ++i) c[i] = full[selection_[i]];
  return c;
}

Signal OrthoBasis::synthesize(std::span<const double> coefficients) const {
  if (coefficients.size() != rank()) {
    throw ShapeMismatch("OrthoBasis::synthesize: expected " + std::to_string(rank()) +
                        " coefficients");
  }
  if (transform_ == Transform::none) {
    Signal x(shape_);
    for (std::size_t i = 0; i < columns_.size(); ++i) x.axpy(coefficients[i], columns_[i]);
    return x;
  }
  std::vector<double> full(shape_.size(), 0.0);
  for (std::size_t i = 0; i < selection_.size(); ++i) full[selection_[i]] = coefficients[i];
  return inverse(std::move(full));
}

Signal OrthoBasis::project(const Signal& x) const {
  if (transform_ == Transform::none) return synthesize(analyze(x));
  require_real_shape(x, shape_, "OrthoBasis::project");
  const auto full = forward(x);
  std::vector<double> kept(full.size(), 0.0);
  for (std::size_t i : selection_) kept[i] = full[i];
  return inverse(std::move(kept));
}

OrthoBasis OrthoBasis::restricted(std::vector<std::size_t> coefficient_indices) const {
  if (transform_ == Transform::none) {
    throw InvalidArgument("OrthoBasis::restricted needs a transform-backed basis");
  }
  std::sort(coefficient_indices.begin(), coefficient_indices.end());
  coefficient_indices.erase(std::unique(coefficient_indices.begin(), coefficient_indices.end()),
                            coefficient_indices.end());
  for (std::size_t i : coefficient_indices) {
    if (i >= shape_.size()) throw InvalidArgument("OrthoBasis::restricted: index out of range");
  }
  OrthoBasis b = *this;
  b.selection_ = std::move(coefficient_indices);
  return b;
}

OrthoBasis OrthoBasis::complement() const {
  if (transform_ != Transform::none) {
    std::vector<std::uint8_t> kept(shape_.size(), 0);
    for (std::size_t i : selection_) kept[i] = 1;
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < kept.size(); ++i)
      if (!kept[i]) rest.push_back(i);
    OrthoBasis b = *this;
    b.selection_ = std::move(rest);
    return b;
  }
  // Extend the columns with canonical vectors and keep what Gram-Schmidt adds.
  std::vector<Signal> all = columns_;
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    Signal e(shape_);
    e[i] = 1.0;
    all.push_back(std::move(e));
  }
  auto q = orthonormalize(all);
  q.erase(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(columns_.size()));
  if (q.empty()) return trivial(shape_);
  return dense_orthonormal(std::move(q));
}

Signal OrthoBasis::sample(Rng& rng, double scale) const {
  std::vector<double> c(rank());
  for (double& v : c) v = scale * rng.gaussian();
  return synthesize(c);
}

std::vector<std::size_t> haar_detail_indices(Shape shape, int levels) {
  const std::size_t h = shape.rows >> levels;
  const std::size_t w = shape.cols >> levels;
  std::vector<std::size_t> idx;
  for (std::size_t r = 0; r < shape.rows; ++r)
    for (std::size_t c = 0; c < shape.cols; ++c)
      if (r >= h || c >= w)
        for (std::size_t l = 0; l < shape.channels; ++l)
          idx.push_back((r * shape.cols + c) * shape.channels + l);
  return idx;
}

}  // namespace pnpplo
