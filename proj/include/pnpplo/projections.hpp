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
#include <optional>
#include <vector>

#include "pnpplo/signal.hpp"

namespace pnpplo {

enum class SetKind { l2_ball, l1_ball, singleton, box, affine_subspace };

const char* to_string(SetKind kind);

/// Closed convex constraint set with an exact metric projection.
class ConvexSet {
 public:
  static ConvexSet l2_ball(Signal center, double radius);
  static ConvexSet l1_ball(Signal center, double radius);
  static ConvexSet singleton(Signal point);
  /// Element-wise bounds; lower and upper share the set's shape.
  static ConvexSet box(Signal lower, Signal upper);
  static ConvexSet box(Shape shape, double lower, double upper,
                       DomainTag tag = DomainTag::real);
  /// offset + span(spanning). The spanning set is orthonormalized on
  /// construction; dependent vectors are dropped.
  static ConvexSet affine_subspace(const std::vector<Signal>& spanning, Signal offset);

  SetKind kind() const { return kind_; }
  const Shape& shape() const { return anchor_.shape(); }
  /// Ball centre, singleton point, or affine offset.
  const Signal& center() const { return anchor_; }
  double radius() const { return radius_; }
  const std::vector<Signal>& basis() const { return basis_; }

  Signal project(const Signal& x) const;
  /// Membership with the tolerance-relaxed radius; the default tolerance is
  /// 1e-12 * (1 + radius).
  bool contains(const Signal& x, std::optional<double> tol = std::nullopt) const;
  double default_tolerance() const { return 1e-12 * (1.0 + radius_); }
  /// Euclidean distance from x to the set.
  double distance(const Signal& x) const;

 private:
  ConvexSet(SetKind kind, Signal anchor, double radius);
  void check_shape(const Signal& x, const char* what) const;

  SetKind kind_;
  Signal anchor_;
  double radius_ = 0.0;
  Signal upper_;               // box only; anchor_ holds the lower bound
  std::vector<Signal> basis_;  // affine only
};

/// Noise-ball radius epsilon * sqrt(n0 * sigma^2).
double radius_from_noise(std::size_t n0, double sigma, double epsilon);

/// Orthonormalize with modified Gram-Schmidt, repeating the pass when the
/// Gram matrix drifts from the identity by more than 1e-10.
std::vector<Signal> orthonormalize(const std::vector<Signal>& vectors);

/// Euclidean projection of v onto {z : ||z||_1 <= radius} (sort-based).
std::vector<double> project_l1_ball(std::vector<double> v, double radius);

}  // namespace pnpplo
