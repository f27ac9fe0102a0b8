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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "pnpplo/error.hpp"
#include "pnpplo/operators.hpp"
#include "pnpplo/projections.hpp"
#include "pnpplo/rng.hpp"

using namespace pnpplo;

namespace {

std::vector<ConvexSet> sample_sets() {
  const Shape s{5, 1, 1};
  const Signal c = random_signal(s, DomainTag::real, 1);
  std::vector<ConvexSet> sets;
  sets.push_back(ConvexSet::l2_ball(c, 0.7));
  sets.push_back(ConvexSet::l1_ball(c, 0.9));
  sets.push_back(ConvexSet::singleton(c));
  sets.push_back(ConvexSet::box(s, -0.5, 0.25));
  sets.push_back(ConvexSet::affine_subspace(
      {random_signal(s, DomainTag::real, 2), random_signal(s, DomainTag::real, 3)}, c));
  return sets;
}

// Brute force l1-ball projection: enumerate sign patterns and solve each
// face problem by projecting onto the simplex face.
std::vector<double> l1_oracle(const std::vector<double>& x, double r) {
  double l1 = 0;
  for (double v : x) l1 += std::abs(v);
  if (l1 <= r) return x;
  // Bisection on the threshold of soft(x, t) with sum |.| = r.
  double lo = 0, hi = *std::max_element(x.begin(), x.end(), [](double a, double b) {
    return std::abs(a) < std::abs(b);
  });
  hi = std::abs(hi);
  for (int i = 0; i < 200; ++i) {
    const double t = 0.5 * (lo + hi);
    double s = 0;
    for (double v : x) s += std::max(std::abs(v) - t, 0.0);
    (s > r ? lo : hi) = t;
  }
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    z[i] = std::copysign(std::max(std::abs(x[i]) - hi, 0.0), x[i]);
  return z;
}

}  // namespace

TEST_CASE("noise radius") {
  CHECK(radius_from_noise(10000, std::sqrt(2.0), 1.0) == doctest::Approx(141.4214).epsilon(1e-6));
  CHECK(radius_from_noise(10000, 0.0, 1.0) == 0.0);
  CHECK(radius_from_noise(4096, 15.0, 0.98) == doctest::Approx(940.8).epsilon(1e-12));
  CHECK_THROWS_AS(radius_from_noise(10, 1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(radius_from_noise(10, 1.0, -1.0), InvalidArgument);
}

TEST_CASE("projection examples") {
  const auto ball = ConvexSet::l2_ball(Signal::vector({0, 0}), 1.0);
  CHECK(ball.project(Signal::vector({2, 0})) == Signal::vector({1, 0}));
  const Signal inside = Signal::vector({0.3, -0.2});
  CHECK(ball.project(inside) == inside);
  const auto l1 = ConvexSet::l1_ball(Signal::vector({0, 0}), 1.0);
  const Signal p = l1.project(Signal::vector({1, 1}));
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));
  const auto single = ConvexSet::singleton(Signal::vector({1, 2}));
  CHECK(single.project(Signal::vector({5, 5})) == Signal::vector({1, 2}));
  const auto box = ConvexSet::box(Shape{3, 1, 1}, -1, 1);
  CHECK(box.project(Signal::vector({-3, 0.5, 2})) == Signal::vector({-1, 0.5, 1}));
  const auto line = ConvexSet::affine_subspace({Signal::vector({1, 1})}, Signal::vector({0, 1}));
  const Signal q = line.project(Signal::vector({2, 0}));
  CHECK(q[0] == doctest::Approx(0.5));
  CHECK(q[1] == doctest::Approx(1.5));
  CHECK_THROWS_AS(ball.project(Signal::vector({1, 2, 3})), ShapeMismatch);
}

TEST_CASE("membership") {
  const auto ball = ConvexSet::l2_ball(Signal::vector({0, 0}), 1.0);
  CHECK(ball.contains(Signal::vector({1, 0}), 0.0));
  CHECK(ball.contains(Signal::vector({1 + 1e-15, 0}), 1e-12));
  CHECK_FALSE(ball.contains(Signal::vector({1.1, 0})));
  const auto single = ConvexSet::singleton(Signal::vector({1, 2}));
  CHECK_FALSE(single.contains(Signal::vector({1, 2.5})));
  CHECK(single.contains(Signal::vector({1, 2})));
}

TEST_CASE("projection properties on every set kind") {
  const auto sets = sample_sets();
  for (const auto& set : sets) {
    CAPTURE(to_string(set.kind()));
    for (std::uint64_t s = 0; s < 50; ++s) {
      Signal x = random_signal(set.shape(), DomainTag::real, 10 + s);
      x *= 3.0;
      const Signal z = 3.0 * random_signal(set.shape(), DomainTag::real, 1000 + s);
      const Signal px = set.project(x);
      const Signal pz = set.project(z);
      CHECK(distance(set.project(px), px) <= 1e-12 * (1 + norm2(px)));
      CHECK(distance(px, pz) <= distance(x, z) * (1 + 1e-12));
      CHECK(set.contains(px, 1e-10));
      // Variational inequality with a point of the set.
      CHECK(inner(x - px, pz - px) <= 1e-10);
      // Membership agrees with the projection fixed points.
      CHECK(set.contains(x) == (distance(px, x) <= set.default_tolerance()));
    }
  }
}

TEST_CASE("l1 projection matches a bisection oracle") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(5);
    std::vector<double> x(n);
    for (auto& v : x) v = 3.0 * rng.gaussian();
    const double r = 0.1 + 2.0 * rng.uniform();
    const auto got = project_l1_ball(x, r);
    const auto want = l1_oracle(x, r);
    for (std::size_t i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-8).scale(1));
  }
}

TEST_CASE("orthonormalization drops dependent vectors") {
  const auto basis = orthonormalize({Signal::vector({1, 0, 0}), Signal::vector({2, 0, 0}),
                                     Signal::vector({1, 1, 0})});
  REQUIRE(basis.size() == 2);
  CHECK(std::abs(inner(basis[0], basis[1])) < 1e-15);
  CHECK(norm2(basis[1]) == doctest::Approx(1.0));
}
