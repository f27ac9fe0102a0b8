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
#include <memory>

#include "doctest.h"
#include "pnpplo/error.hpp"
#include "pnpplo/landweber.hpp"
#include "pnpplo/theory.hpp"
#include "support/instances.hpp"

using namespace pnpplo;
using pnpplo::testing::diag_instance;
using pnpplo::testing::random_instance;
using pnpplo::testing::RandomInstanceOptions;

namespace {

SolveConfig fixed_budget(int k) {
  SolveConfig c;
  c.max_iters = k;
  c.stop_tol = 0.0;
  c.keep_iterates = true;
  c.trace_denoiser_residual = false;
  return c;
}

double worst_gap(const std::vector<Signal>& a, const std::vector<Signal>& b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, distance(a[i], b[i]) / (1.0 + norm2(a[i])));
  return worst;
}

class OpaqueKernel : public DenoiserKernel {
 public:
  Signal denoise(const Signal& x) const override { return 0.5 * x; }
  std::string name() const override { return "opaque"; }
};

}  // namespace

TEST_CASE("pnp_plo: starting inside F keeps the iterate fixed") {
  const auto p = diag_instance();
  const Signal x0 = Signal::vector({1, 1});
  const auto r = pnp_plo(p, fixed_budget(25), x0);
  REQUIRE(r.trace.iterates.size() == 26);
  for (const auto& x : r.trace.iterates) CHECK(distance(x, x0) <= 1e-13);

  const SCFPProblem axis{dense_operator(2, 2, {1, 0, 0, 2}),
                         ConvexSet::l2_ball(Signal::vector({1, 0}), 0.1),
                         subspace_denoiser(OrthoBasis::dense({Signal::vector({1, 0})})),
                         std::nullopt};
  const Signal e1 = Signal::vector({1, 0});
  const auto exact = pnp_plo(axis, fixed_budget(25), e1);
  for (const auto& x : exact.trace.iterates) CHECK(x == e1);
}

TEST_CASE("pnp_plo: diagonal instance reaches the feasible interval") {
  const auto p = diag_instance();
  SolveConfig c;
  c.max_iters = 10000;
  c.stop_tol = 1e-13;
  const auto r = pnp_plo(p, c, Signal::vector({-3, 5}));
  CHECK(distance(p.t.denoise(r.x), r.x) <= 1e-6);
  CHECK(distance(p.a.apply(r.x), Signal::vector({1, 2})) <= 0.1 + 1e-6);
  CHECK(std::abs(r.x[0] - 1.0) <= 0.1 / std::sqrt(5.0) + 1e-6);
  CHECK(r.trace.theory_applies);
  const Signal oracle = oracle_feasible_point(p, 1e-9);
  CHECK(std::abs(oracle[0] - oracle[1]) <= 1e-9);
  CHECK(std::abs(oracle[0] - 1.0) <= 0.1 / std::sqrt(5.0) + 1e-9);
  const SolutionSetProjector proj(p);
  CHECK(proj.distance(r.x) <= 1e-4);
}

TEST_CASE("pnp_plo: converged random instances are feasible") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto inst = random_instance(seed, {.min_dim = 6, .max_dim = 16});
    for (double w : {0.5, 1.0, 1.5}) {
      SolveConfig c;
      c.max_iters = 10000;
      c.stop_tol = 1e-12;
      c.w = w;
      const auto r = pnp_plo(inst.problem, c, inst.x0);
      CAPTURE(seed);
      CAPTURE(w);
      CHECK(r.trace.status == SolveStatus::converged);
      CHECK(distance(inst.problem.t.denoise(r.x), r.x) <= 1e-6);
      CHECK(inst.problem.q.distance(inst.problem.a.apply(r.x)) <= 1e-6);
    }
  }
}

TEST_CASE("pnp_plo: singleton Q with delta 1 matches pnp_fbs") {
  for (std::uint64_t seed = 10; seed < 15; ++seed) {
    auto inst = random_instance(seed, {.singleton = true});
    const double lambda = 0.7;
    SolveConfig c = fixed_budget(100);
    c.step = StepRule::constant(1.0);
    c.lambda = LambdaSchedule::constant(lambda);
    c.w = 1.0;
    const auto plo = pnp_plo(inst.problem, c, inst.x0);
    const auto fbs =
        pnp_fbs(inst.problem, lambda / inst.problem.a.norm_sq(), fixed_budget(100), inst.x0);
    CHECK(worst_gap(plo.trace.iterates, fbs.trace.iterates) <= 1e-10);
  }
}

TEST_CASE("pnp_plo: singleton Q with diminishing lambda matches red_pro") {
  for (std::uint64_t seed = 20; seed < 25; ++seed) {
    auto inst = random_instance(seed, {.singleton = true});
    SolveConfig c = fixed_budget(100);
    c.step = StepRule::constant(1.0);
    c.lambda = LambdaSchedule::diminishing(0.9, 0.1);
    c.w = 0.8;
    const auto plo = pnp_plo(inst.problem, c, inst.x0);
    const double norm_sq = inst.problem.a.norm_sq();
    const auto pro = red_pro(inst.problem, StepRule::diminishing(0.9 / norm_sq, 0.1), 0.8,
                             fixed_budget(100), inst.x0);
    CHECK(worst_gap(plo.trace.iterates, pro.trace.iterates) <= 1e-10);
  }
}

TEST_CASE("pnp_plo: parameter validation") {
  const auto p = diag_instance();
  const Signal x0 = Signal::vector({0, 0});
  SolveConfig c = fixed_budget(5);
  c.w = 2.5;
  CHECK_THROWS_AS(pnp_plo(p, c, x0), InvalidArgument);
  c.allow_unsafe = true;
  CHECK_FALSE(pnp_plo(p, c, x0).trace.theory_applies);

  SolveConfig low = fixed_budget(5);
  low.lambda = LambdaSchedule::constant(1e-4);
  CHECK_THROWS_AS(pnp_plo(p, low, x0), InvalidArgument);
  low.allow_unsafe = true;
  CHECK_FALSE(pnp_plo(p, low, x0).trace.theory_applies);

  SolveConfig bad_delta = fixed_budget(5);
  bad_delta.step = StepRule::constant(0.5);
  CHECK_THROWS_AS(pnp_plo(p, bad_delta, x0), InvalidArgument);
  bad_delta.step = StepRule::diminishing(1.0, 0.1);
  CHECK_THROWS_AS(pnp_plo(p, bad_delta, x0), InvalidArgument);

  SolveConfig zero = fixed_budget(5);
  zero.max_iters = 0;
  CHECK_THROWS_AS(pnp_plo(p, zero, x0), InvalidArgument);
  CHECK_THROWS_AS(pnp_plo(p, fixed_budget(5), Signal::vector({0, 0, 0})), ShapeMismatch);

  SCFPProblem opaque = p;
  opaque.t = Denoiser(std::make_shared<OpaqueKernel>(), std::nullopt, 0.0, std::nullopt,
                      FixedPointOracle());
  CHECK_THROWS_AS(pnp_plo(opaque, fixed_budget(5), x0), InvalidArgument);
  SolveConfig explicit_w = fixed_budget(5);
  explicit_w.w = 1.0;
  CHECK_FALSE(pnp_plo(opaque, explicit_w, x0).trace.theory_applies);
}

TEST_CASE("pnp_plo: repeated runs are bit-identical") {
  auto inst = random_instance(3);
  SolveConfig c = fixed_budget(200);
  c.trace_denoiser_residual = true;
  const auto a = pnp_plo(inst.problem, c, inst.x0);
  const auto b = pnp_plo(inst.problem, c, inst.x0);
  CHECK(a.x == b.x);
  REQUIRE(a.trace.rows.size() == b.trace.rows.size());
  for (std::size_t i = 0; i < a.trace.rows.size(); ++i) {
    const auto& ra = a.trace.rows[i];
    const auto& rb = b.trace.rows[i];
    CHECK(ra.k == rb.k);
    CHECK(ra.f == rb.f);
    CHECK(ra.residual == rb.residual);
    CHECK(ra.step == rb.step);
    CHECK(ra.dist_q == rb.dist_q);
    CHECK(ra.denoiser_residual == rb.denoiser_residual);
  }
}

TEST_CASE("pnp_plo: trace bookkeeping") {
  auto inst = random_instance(4);
  SolveConfig c = fixed_budget(50);
  c.trace_every = 7;
  const auto r = pnp_plo(inst.problem, c, inst.x0);
  CHECK(r.trace.iterations == 50);
  CHECK(r.trace.status == SolveStatus::max_iters);
  REQUIRE(r.trace.rows.size() == 8);
  for (std::size_t i = 0; i < r.trace.rows.size(); ++i) {
    CHECK(r.trace.rows[i].k == static_cast<int>(7 * i));
    CHECK(r.trace.rows[i].psnr.has_value());
    CHECK_FALSE(r.trace.rows[i].wall_ms.has_value());
  }
  CHECK(r.trace.rows[0].f == doctest::Approx(fidelity(inst.problem.a, inst.problem.q, inst.x0)));
}

TEST_CASE("red_sd: identity denoiser is gradient descent, zero step is constant") {
  auto inst = random_instance(5);
  inst.problem.t = scaling_denoiser(inst.x0.shape(), 1.0);
  const double mu = 0.5 / inst.problem.a.norm_sq();
  const auto r = red_sd(inst.problem, mu, 3.0, fixed_budget(30), inst.x0);
  Signal x = inst.x0;
  for (int k = 0; k < 30; ++k) {
    x = x - mu * grad_fidelity(inst.problem.a, inst.problem.q, x);
    CHECK(distance(r.trace.iterates[k + 1], x) <= 1e-12 * (1.0 + norm2(x)));
  }
  const auto still = red_sd(inst.problem, 0.0, 1.0, fixed_budget(10), inst.x0);
  for (const auto& xi : still.trace.iterates) CHECK(xi == inst.x0);
  CHECK_THROWS_AS(red_sd(inst.problem, -1.0, 1.0, fixed_budget(1), inst.x0), InvalidArgument);
}

TEST_CASE("red_sd: diagonal instance approaches the minimizer set") {
  // With lambda = 0 the iteration is gradient descent on f; the minimizers are
  // the preimage of Q and the long run reaches f < 1e-8.
  const auto p = diag_instance();
  const auto r = red_sd(p, 0.2, 0.0, fixed_budget(2000), Signal::vector({-3, 5}));
  CHECK(fidelity(p.a, p.q, r.x) < 1e-8);
  const auto reg = red_sd(p, 0.05, 1.0, fixed_budget(20000), Signal::vector({-3, 5}));
  CHECK(fidelity(p.a, p.q, reg.x) < 1e-2);
}

TEST_CASE("red_pro: zero step iterates the relaxed denoiser") {
  auto inst = random_instance(6);
  const auto r = red_pro(inst.problem, StepRule::constant(0.0), 0.5, fixed_budget(80), inst.x0);
  const Signal target = inst.problem.t.denoise(inst.x0);
  CHECK(distance(r.x, target) <= 1e-10 * (1.0 + norm2(target)));
  CHECK(r.trace.theory_applies);
  CHECK_THROWS_AS(red_pro(inst.problem, StepRule::constant(0.0), 1.2, fixed_budget(1), inst.x0),
                  InvalidArgument);
  CHECK_THROWS_AS(red_pro(inst.problem, StepRule::tau(), 0.5, fixed_budget(1), inst.x0),
                  InvalidArgument);
}

TEST_CASE("red_pro: diminishing schedule values") {
  const auto rule = StepRule::diminishing(2.0, 0.1);
  CHECK(rule.at(1) == 2.0);
  CHECK(rule.at(1024) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rule.at(2) < rule.at(1));
  CHECK(StepRule::constant(0.3).at(17) == 0.3);
  CHECK_THROWS_AS(StepRule::tau().at(1), InvalidArgument);
}

TEST_CASE("red_pro: diagonal instance converges into F") {
  const auto p = diag_instance();
  const auto r = red_pro(p, StepRule::diminishing(0.2, 0.1), 0.9, fixed_budget(100000),
                         Signal::vector({-3, 5}));
  const SolutionSetProjector proj(p);
  CHECK(proj.distance(r.x) <= 1e-4);
}

TEST_CASE("pnp_fbs: degenerate steps") {
  auto inst = random_instance(7);
  inst.problem.t = scaling_denoiser(inst.x0.shape(), 0.5);
  const auto r = pnp_fbs(inst.problem, 0.0, fixed_budget(6), inst.x0);
  CHECK(distance(r.x, (1.0 / 64.0) * inst.x0) <= 1e-15 * norm2(inst.x0));

  inst.problem.t = scaling_denoiser(inst.x0.shape(), 1.0);
  const double s = 0.8 / inst.problem.a.norm_sq();
  const auto gd = pnp_fbs(inst.problem, s, fixed_budget(20), inst.x0);
  Signal x = inst.x0;
  for (int k = 0; k < 20; ++k) x = x - s * grad_fidelity(inst.problem.a, inst.problem.q, x);
  CHECK(distance(gd.x, x) <= 1e-12 * (1.0 + norm2(x)));
  CHECK_THROWS_AS(pnp_fbs(inst.problem, -0.1, fixed_budget(1), inst.x0), InvalidArgument);
}

TEST_CASE("oracle_feasible_point") {
  SUBCASE("identity operator with an unconstrained prior returns y") {
    const Shape shape{3, 1, 1};
    const Signal y = Signal::vector({0.5, -1.0, 2.0});
    const SCFPProblem p{identity_operator(shape), ConvexSet::singleton(y),
                        subspace_denoiser(OrthoBasis::canonical(shape)), std::nullopt};
    CHECK(distance(oracle_feasible_point(p, 1e-10), y) <= 1e-10);
  }
  SUBCASE("empty solution set is declared infeasible") {
    auto p = diag_instance();
    p.q = ConvexSet::l2_ball(Signal::vector({1, -2}), 0.1);
    CHECK_THROWS_AS(oracle_feasible_point(p, 1e-8, 2000), NumericalError);
    const SolutionSetProjector proj(p);
    CHECK_FALSE(proj.feasible());
    CHECK_THROWS_AS(proj.project(Signal::vector({0, 0})), NumericalError);
  }
  SUBCASE("unknown fixed-point set is rejected") {
    auto p = diag_instance();
    p.t = Denoiser(std::make_shared<OpaqueKernel>(), std::nullopt, 0.0, std::nullopt,
                   FixedPointOracle());
    CHECK_THROWS(oracle_feasible_point(p, 1e-8));
  }
}

TEST_CASE("solution set projector") {
  const auto p = diag_instance();
  const SolutionSetProjector proj(p);
  CHECK(proj.feasible());
  const Signal inside = Signal::vector({1.01, 1.01});
  CHECK(distance(proj.project(inside), inside) <= 1e-12);
  const Signal far = Signal::vector({3, 0});
  const Signal z = proj.project(far);
  CHECK(std::abs(z[0] - z[1]) <= 1e-12);
  CHECK(std::abs(z[0] - 1.0) <= 0.1 / std::sqrt(5.0) + 1e-12);
  // (3, 0) projects onto span{(1,1)} at t = 1.5, clipped to the interval end.
  CHECK(z[0] == doctest::Approx(1.0 + 0.1 / std::sqrt(5.0)).epsilon(1e-9));
  CHECK(proj.distance(far) == doctest::Approx(distance(far, z)));
}

TEST_CASE("check_fejer") {
  const Signal star = Signal::vector({1, 1});
  const std::vector<Signal> still(10, star);
  const auto flat = check_fejer(still, star, 0.5);
  CHECK(flat.passed);
  CHECK(flat.worst_margin == 0.0);
  CHECK(flat.steps == 9);

  for (std::uint64_t seed = 30; seed < 34; ++seed) {
    auto inst = random_instance(seed);
    const Signal ref = oracle_feasible_point(inst.problem, 1e-10);
    for (double w : {0.5, 1.0, 1.5}) {
      SolveConfig c = fixed_budget(300);
      c.w = w;
      const auto r = pnp_plo(inst.problem, c, inst.x0);
      const auto rep = check_fejer(r.trace.iterates, ref, fejer_constant(-1.0, w));
      CAPTURE(seed);
      CAPTURE(w);
      CHECK(rep.passed);
      CHECK(rep.violations == 0);
    }
  }

  auto inst = random_instance(40);
  const Signal ref = oracle_feasible_point(inst.problem, 1e-10);
  SolveConfig over = fixed_budget(30);
  over.w = 3.0;
  over.allow_unsafe = true;
  const auto r = pnp_plo(inst.problem, over, inst.x0);
  const auto rep = check_fejer(r.trace.iterates, ref, fejer_constant(-1.0, 3.0));
  CHECK_FALSE(rep.passed);
  CHECK(rep.violations > 0);
  CHECK(rep.worst_margin < 0.0);
}

TEST_CASE("fejer constant") {
  CHECK(fejer_constant(-1.0, 1.0) == 0.5);
  CHECK(fejer_constant(-1.0, 1.5) == doctest::Approx(0.5 / 3.0));
  CHECK(fejer_constant(0.0, 0.5) == 0.5);
}

TEST_CASE("check_rate_bounds") {
  for (std::uint64_t seed = 50; seed < 54; ++seed) {
    auto inst = random_instance(seed);
    const SolutionSetProjector proj(inst.problem);
    const Signal ref = proj.project(inst.x0);
    const double d0 = distance(inst.x0, ref);
    SolveConfig c = fixed_budget(1000);
    c.keep_iterates = false;
    c.w = 1.0;
    const auto tau_run = pnp_plo(inst.problem, c, inst.x0);
    const auto rep = check_rate_bounds(tau_run.trace, d0 * d0, fejer_constant(-1.0, 1.0));
    CHECK(rep.passed);
    CHECK(rep.summable);

    c.step = StepRule::polyak();
    const auto polyak = pnp_plo(inst.problem, c, inst.x0);
    const auto prep =
        check_rate_bounds(polyak.trace, d0 * d0, fejer_constant(-1.0, 1.0), proj.distance(inst.x0));
    CAPTURE(seed);
    CHECK(prep.passed);
    CHECK(prep.polyak_violations == 0);
    CHECK(prep.lipschitz_estimate > 0.0);
  }

  SolveTrace fake;
  fake.rows.resize(3);
  for (auto& row : fake.rows) row.residual = 1.0;
  const auto bad = check_rate_bounds(fake, 1.0, 0.5);
  CHECK_FALSE(bad.passed);
  CHECK(bad.partial_sum_violations == 1);
  CHECK_FALSE(bad.summable);
}

TEST_CASE("fit_linear_rate") {
  std::vector<double> geometric;
  for (int k = 0; k < 40; ++k) geometric.push_back(std::pow(0.5, k));
  const auto g = fit_linear_rate(geometric);
  CHECK(std::abs(g.q_hat - 0.5) <= 1e-6);
  CHECK(g.fit_residual <= 1e-10);
  CHECK_FALSE(g.stalled);

  const auto flat = fit_linear_rate(std::vector<double>(30, 0.25));
  CHECK(flat.q_hat == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(flat.stalled);

  std::vector<double> truncated = {1.0, 0.1, 0.01, 1e-3, 1e-20, 1e-3};
  const auto t = fit_linear_rate(truncated, {.tail_fraction = 1.0});
  CHECK(t.window_end == 4);
  CHECK(t.q_hat == doctest::Approx(0.1).epsilon(1e-9));

  auto inst = random_instance(60);
  SolveConfig c = fixed_budget(400);
  const auto r = pnp_plo(inst.problem, c, inst.x0);
  const SolutionSetProjector proj(inst.problem);
  std::vector<double> d;
  for (const auto& x : r.trace.iterates) d.push_back(proj.distance(x));
  const auto rate = fit_linear_rate(d);
  CHECK(rate.q_hat > 0.0);
  CHECK(rate.q_hat < 1.0);
}
