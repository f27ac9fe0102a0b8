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

#include <cmath>

#include "doctest.h"
#include "pnpplo/error.hpp"
#include "pnpplo/landweber.hpp"
#include "pnpplo/operators.hpp"
#include "pnpplo/rng.hpp"

using namespace pnpplo;

namespace {

const LinearOperator& diag21() {
  static const LinearOperator a = dense_operator(2, 2, {2, 0, 0, 1});
  return a;
}

const ConvexSet& ball05() {
  static const ConvexSet q = ConvexSet::l2_ball(Signal::vector({0, 0}), 0.5);
  return q;
}

}  // namespace

TEST_CASE("fidelity") {
  CHECK(fidelity(diag21(), ball05(), Signal::vector({0.1, 0.1})) == 0.0);
  const double f = fidelity(diag21(), ball05(), Signal::vector({1, 1}));
  CHECK(f == doctest::Approx(0.5 * std::pow(std::sqrt(5.0) - 0.5, 2)).epsilon(1e-14));
  CHECK(f == doctest::Approx(1.50697).epsilon(1e-5));
  const auto single = ConvexSet::singleton(Signal::vector({1, 3}));
  CHECK(fidelity(diag21(), single, Signal::vector({1, 1})) == doctest::Approx(0.5 * (1 + 4)));
  CHECK_THROWS_AS(fidelity(diag21(), ball05(), Signal::vector({1, 1, 1})), ShapeMismatch);
}

TEST_CASE("gradient") {
  CHECK(norm2(grad_fidelity(diag21(), ball05(), Signal::vector({0.1, 0.1}))) == 0.0);
  const Signal g = grad_fidelity(diag21(), ball05(), Signal::vector({1, 1}));
  const double c = 1 - 0.5 / std::sqrt(5.0);
  CHECK(g[0] == doctest::Approx(4 * c).epsilon(1e-14));
  CHECK(g[1] == doctest::Approx(c).epsilon(1e-14));
  CHECK(g[0] == doctest::Approx(3.10557).epsilon(1e-5));
}

TEST_CASE("gradient matches central differences at exterior points") {
  const auto a = dense_operator(3, 4, {1, 2, 0, -1, 0.5, 3, 1, 1, -2, 0, 4, 0.5});
  const auto q = ConvexSet::l2_ball(Signal::vector({0.2, -0.1, 0.3}), 0.4);
  int tested = 0;
  for (std::uint64_t s = 0; tested < 100; ++s) {
    const Signal x = random_signal(Shape{4, 1, 1}, DomainTag::real, s);
    if (q.distance(a.apply(x)) <= 1e-3) continue;
    ++tested;
    const Signal g = grad_fidelity(a, q, x);
    const double h = 1e-6;
    for (std::size_t i = 0; i < 4; ++i) {
      Signal xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (fidelity(a, q, xp) - fidelity(a, q, xm)) / (2 * h);
      CHECK(std::abs(fd - g[i]) <= 1e-5 * (std::abs(g[i]) + norm2(g)));
    }
  }
}

TEST_CASE("landweber operator") {
  const Signal inside = Signal::vector({0.1, 0.1});
  CHECK(landweber_apply(diag21(), ball05(), inside, 4.0) == inside);
  const auto id = identity_operator(Shape{2, 1, 1});
  const auto single = ConvexSet::singleton(Signal::vector({3, -2}));
  const Signal l = landweber_apply(id, single, Signal::vector({1, 1}), 1.0);
  CHECK(l == Signal::vector({3, -2}));
  const Signal d = landweber_apply(diag21(), ball05(), Signal::vector({1, 1}), 4.0);
  CHECK(d[0] == doctest::Approx(0.22361).epsilon(1e-4));
  CHECK(d[1] == doctest::Approx(0.80590).epsilon(1e-4));
  CHECK_THROWS_AS(landweber_apply(diag21(), ball05(), inside, 0.0), InvalidArgument);
}

TEST_CASE("landweber operator is 1-SQNE toward the preimage") {
  const auto a = dense_operator(3, 4, {1, 2, 0, -1, 0.5, 3, 1, 1, -2, 0, 4, 0.5});
  const auto q = ConvexSet::l2_ball(Signal::vector({0.2, -0.1, 0.3}), 0.4);
  Rng rng(2);
  for (std::uint64_t s = 0; s < 300; ++s) {
    const Signal x = 3.0 * random_signal(Shape{4, 1, 1}, DomainTag::real, s);
    // z with Az in Q: scale a random point until it lands inside.
    Signal z = random_signal(Shape{4, 1, 1}, DomainTag::real, 1000 + s);
    while (!q.contains(a.apply(z))) z *= 0.5;
    const Signal lx = landweber_apply(a, q, x, a.norm_sq());
    const double lhs = std::pow(distance(lx, z), 2);
    const double rhs = std::pow(distance(x, z), 2) - std::pow(distance(lx, x), 2);
    CHECK(lhs <= rhs + 1e-10 * (1 + std::abs(rhs)));
  }
}

TEST_CASE("tau") {
  CHECK(tau(diag21(), ball05(), Signal::vector({0.1, 0.1})).value == 1.0);
  const auto id = identity_operator(Shape{3, 1, 1});
  const auto q = ConvexSet::l2_ball(Signal::vector({1, 2, 3}), 0.5);
  CHECK(tau(id, q, Signal::vector({-4, 0, 9})).value == doctest::Approx(1.0).epsilon(1e-15));
  const auto t = tau(diag21(), ball05(), Signal::vector({1, 1}));
  CHECK_FALSE(t.stalled);
  CHECK(t.value == doctest::Approx(20.0 / 17.0).epsilon(1e-14));
}

TEST_CASE("stall detection") {
  // Range of A is the first axis; the centre is off-range so the residual
  // becomes orthogonal to range(A) once Ax reaches the axis foot point.
  const auto a = dense_operator(2, 2, {1, 0, 0, 0});
  const auto q = ConvexSet::singleton(Signal::vector({1, 5}));
  const Signal x = Signal::vector({1, 0});
  CHECK(tau(a, q, x).stalled);
  CHECK(polyak_step(a, q, x).stalled);
}

TEST_CASE("extrapolated landweber") {
  const Signal x = Signal::vector({1, 1});
  const Signal one = extrapolated_landweber_apply(diag21(), ball05(), x, 1.0);
  CHECK(distance(one, landweber_apply(diag21(), ball05(), x, diag21().norm_sq())) <= 1e-15);
  const double t = tau(diag21(), ball05(), x).value;
  const Signal via_norm = extrapolated_landweber_apply(diag21(), ball05(), x, t);
  const Signal via_mu = extrapolated_landweber_tau(diag21(), ball05(), x);
  CHECK(distance(via_norm, via_mu) <= 1e-12);
  const Signal inside = Signal::vector({0.1, 0.1});
  CHECK(extrapolated_landweber_tau(diag21(), ball05(), inside) == inside);
  CHECK_THROWS_AS(extrapolated_landweber_apply(diag21(), ball05(), x, 0.5), InvalidArgument);
  CHECK_THROWS_AS(extrapolated_landweber_apply(diag21(), ball05(), x, t + 1e-6), InvalidArgument);
}

TEST_CASE("polyak step") {
  CHECK(polyak_step(diag21(), ball05(), Signal::vector({0.1, 0.1})).value == 1.0);
  CHECK(polyak_step(diag21(), ball05(), Signal::vector({1, 1})).value ==
        doctest::Approx(5.0 / 34.0).epsilon(1e-14));
  const auto id = identity_operator(Shape{2, 1, 1});
  const auto single = ConvexSet::singleton(Signal::vector({3, -2}));
  CHECK(polyak_step(id, single, Signal::vector({1, 7})).value == doctest::Approx(0.5));
}

TEST_CASE("half of the tau step equals the Polyak gradient step") {
  const auto a = dense_operator(3, 4, {1, 2, 0, -1, 0.5, 3, 1, 1, -2, 0, 4, 0.5});
  const auto q = ConvexSet::l2_ball(Signal::vector({0.2, -0.1, 0.3}), 0.4);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Signal x = 2.0 * random_signal(Shape{4, 1, 1}, DomainTag::real, s);
    if (q.contains(a.apply(x))) continue;
    const Signal lt = extrapolated_landweber_tau(a, q, x);
    const Signal half = 0.5 * x + 0.5 * lt;
    const double t = polyak_step(a, q, x).value;
    Signal gd = x;
    gd.axpy(-t, grad_fidelity(a, q, x));
    CHECK(distance(half, gd) <= 1e-12 * (1 + norm2(x)));
  }
}
