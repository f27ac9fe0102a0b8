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
#include <memory>
#include <span>
#include <vector>

#include "pnpplo/signal.hpp"

namespace pnpplo {

class Rng;

/// Orthonormal system spanning a subspace of real signals of one shape.
///
/// Two representations: explicit orthonormal columns (small problems), or a
/// full orthonormal transform (canonical or multilevel Haar) restricted to a
/// subset of its coefficients. Both answer analysis, synthesis, projection and
/// orthogonal complement exactly.
class OrthoBasis {
 public:
  /// Orthonormalizes `columns` (all of the same real shape).
  static OrthoBasis dense(const std::vector<Signal>& columns);
  /// Columns taken as already orthonormal (checked to 1e-10).
  static OrthoBasis dense_orthonormal(std::vector<Signal> columns);
  static OrthoBasis canonical(Shape shape);
  /// Multilevel orthonormal 2-D Haar transform applied per channel. Both
  /// image dimensions must be divisible by 2^levels.
  static OrthoBasis haar(Shape shape, int levels);
  /// Zero-dimensional subspace of signals of `shape`.
  static OrthoBasis trivial(Shape shape);

  const Shape& shape() const { return shape_; }
  std::size_t dimension() const { return shape_.size(); }
  std::size_t rank() const;

  std::vector<double> analyze(const Signal& x) const;
  Signal synthesize(std::span<const double> coefficients) const;
  Signal project(const Signal& x) const;

  /// Transform-backed bases only: keep the listed transform coefficients.
  OrthoBasis restricted(std::vector<std::size_t> coefficient_indices) const;
  OrthoBasis complement() const;

  /// Point of the subspace with i.i.d. N(0, scale^2) coefficients.
  Signal sample(Rng& rng, double scale = 1.0) const;

  bool is_transform() const { return transform_ != Transform::none; }
  int haar_levels() const { return levels_; }

 private:
  enum class Transform { none, canonical, haar };

  OrthoBasis() = default;
  std::vector<double> forward(const Signal& x) const;
  Signal inverse(std::vector<double> coefficients) const;

  Shape shape_{};
  Transform transform_ = Transform::none;
  int levels_ = 0;
  std::vector<Signal> columns_;          // dense
  std::vector<std::size_t> selection_;   // transform coefficients kept
};

/// Coefficient indices of the Haar detail bands (everything except the
/// coarsest approximation block), in the layout used by OrthoBasis::haar.
std::vector<std::size_t> haar_detail_indices(Shape shape, int levels);

}  // namespace pnpplo
