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
#include "pnpplo/basis.hpp"
#include "pnpplo/denoisers.hpp"
#include "pnpplo/error.hpp"
#include "pnpplo/operators.hpp"
#include "pnpplo/rng.hpp"

using namespace pnpplo;

namespace {

struct Case {
  std::string label;
  Denoiser t;
  double sample_scale;
};

std::vector<Case> builtins() {
  const Shape img{8, 8, 1};
  const OrthoBasis haar = OrthoBasis::haar(img, 2);
  const OrthoBasis details = haar.restricted(haar_detail_indices(img, 2));
  const Shape v{6, 1, 1};
  const OrthoBasis sub = OrthoBasis::dense({random_signal(v, DomainTag::real, 1),
                                            random_signal(v, DomainTag::real, 2)});
  std::vector<Case> cases;
  cases.push_back({"subspace", subspace_denoiser(sub), 1.0});
  cases.push_back({"haar subspace", subspace_denoiser(details.complement()), 1.0});
  cases.push_back({"linear", linear_denoiser(3, {1, 0, 0, 0, 0.5, 0.1, 0, 0.1, 0.2}), 1.0});
  cases.push_back({"scaling", scaling_denoiser(v, 0.3), 1.0});
  cases.push_back({"soft threshold", soft_threshold_denoiser(details, 0.5), 1.0});
  cases.push_back({"reflection", reflection_denoiser(sub), 1.0});
  return cases;
}

}  // namespace

TEST_CASE("denoiser examples") {
  const auto proj = subspace_denoiser(OrthoBasis::dense({Signal::vector({1, 1})}));
  const Signal p = proj(Signal::vector({2, 0}));
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(1.0));
  CHECK(proj(Signal::vector({3, 3}))[0] == doctest::Approx(3.0));
  CHECK(scaling_denoiser(Shape{2, 1, 1}, 0.0)(Signal::vector({4, -1})) == Signal::vector({0, 0}));
  CHECK(scaling_denoiser(Shape{2, 1, 1}, 0.5)(Signal::vector({2, 4})) == Signal::vector({1, 2}));
  const auto w = linear_denoiser(2, {1, 0, 0, 0.5});
  CHECK(w(Signal::vector({3, 2})) == Signal::vector({3, 1}));
  REQUIRE(w.oracle().known());
  CHECK(w.oracle().basis().rank() == 1);
  const auto soft = soft_threshold_denoiser(OrthoBasis::canonical(Shape{2, 1, 1}), 1.0);
  const Signal s = soft(Signal::vector({2, 0.5}));
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[1] == doctest::Approx(0.0));
  CHECK(*proj.alpha() == -1.0);
  CHECK(*reflection_denoiser(OrthoBasis::dense({Signal::vector({1, 0})})).alpha() == 0.0);
}

TEST_CASE("construction checks") {
  CHECK_THROWS_AS(linear_denoiser(2, {1, 0.3, 0, 1}), InvalidArgument);     // not symmetric
  CHECK_THROWS_AS(linear_denoiser(2, {1.5, 0, 0, 0.5}), InvalidArgument);   // spectrum > 1
  CHECK_THROWS_AS(linear_denoiser(2, {-0.5, 0, 0, 0.5}), InvalidArgument);  // spectrum < 0
  CHECK_THROWS_AS(scaling_denoiser(Shape{2, 1, 1}, 1.5), InvalidArgument);
  const auto proj = subspace_denoiser(OrthoBasis::dense({Signal::vector({1, 1})}));
  CHECK_THROWS_AS(proj(Signal::vector({1, 2, 3})), ShapeMismatch);
}

TEST_CASE("relaxation") {
  const auto zero = scaling_denoiser(Shape{2, 1, 1}, 0.0);
  const auto half = relax(zero, 0.5);
  CHECK(half(Signal::vector({2, 4})) == Signal::vector({1, 2}));
  const auto proj = subspace_denoiser(OrthoBasis::dense({Signal::vector({1, 1})}));
  const Signal x = Signal::vector({2, -1});
  CHECK(relax(proj, 1.0)(x) == proj(x));
  CHECK_NOTHROW(relax(proj, 1.5));
  try {
    relax(proj, 2.5);
    FAIL("w = 2.5 must be rejected");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("(0, 2") != std::string::npos);
  }
  CHECK(*relax(proj, 1.5).alpha() == doctest::Approx(1.0 - 2.0 / 1.5));
}

TEST_CASE("red value") {
  const auto proj = subspace_denoiser(OrthoBasis::dense({Signal::vector({1, 1})}));
  CHECK(red_value(proj, Signal::vector({2, 2})) == doctest::Approx(0.0));
  const Signal x = Signal::vector({3, -1});
  CHECK(red_value(scaling_denoiser(Shape{2, 1, 1}, 0.0), x) == doctest::Approx(0.5 * 10.0));
  CHECK(red_value(scaling_denoiser(Shape{2, 1, 1}, 0.5), Signal::vector({2, 0})) == doctest::Approx(1.0));
}

TEST_CASE("alpha estimator") {
  const Shape v{4, 1, 1};
  std::vector<Signal> xs;
  for (std::uint64_t s = 0; s < 50; ++s) xs.push_back(random_signal(v, DomainTag::real, s));
  SUBCASE("zero denoiser with y = 0") {
    const auto zero = scaling_denoiser(v, 0.0);
    const auto est = estimate_alpha(zero, xs, zero.oracle());
    CHECK(est.alpha == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(est.pairs_used == 50);
  }
  SUBCASE("projection and reflection") {
    const OrthoBasis sub = OrthoBasis::dense({random_signal(v, DomainTag::real, 77)});
    const auto proj = subspace_denoiser(sub);
    CHECK(estimate_alpha(proj, xs, proj.oracle()).alpha <= -1.0 + 1e-10);
    CHECK(std::abs(estimate_alpha(proj, xs, proj.oracle()).alpha + 1.0) <= 1e-8);
    const auto refl = reflection_denoiser(sub);
    CHECK(std::abs(estimate_alpha(refl, xs, refl.oracle()).alpha) <= 1e-10);
  }
  SUBCASE("identity on samples") {
    const auto id = scaling_denoiser(v, 1.0);
    const auto est = estimate_alpha(id, xs, id.oracle());
    CHECK(est.identity_on_samples);
    CHECK(est.skipped == 50);
  }
  SUBCASE("quantile option") {
    const auto lin = linear_denoiser(4, {1, 0, 0, 0, 0, 0.5, 0, 0, 0, 0, 0.2, 0, 0, 0, 0, 0});
    AlphaOptions opt;
    opt.quantile = 0.5;
    const double median = estimate_alpha(lin, xs, lin.oracle(), opt).alpha;
    const double worst = estimate_alpha(lin, xs, lin.oracle()).alpha;
    CHECK(median <= worst);
    CHECK(worst <= -1.0 + 1e-12);
  }
}

TEST_CASE("fixed points, demicontraction and SQNE of built-ins") {
  for (const auto& c : builtins()) {
    CAPTURE(c.label);
    const Denoiser& t = c.t;
    REQUIRE(t.oracle().known());
    REQUIRE(t.alpha().has_value());
    const double alpha = *t.alpha();
    Rng rng(5);
    const Shape shape = t.oracle().basis().shape();
    for (int i = 0; i < 1000; ++i) {
      const Signal z = t.oracle().sample(rng, 1.0);
      if (i < 50) CHECK(distance(t(z), z) <= 1e-10 * (1 + norm2(z)));
      const Signal x = 2.0 * random_signal(shape, DomainTag::real, 5000 + i);
      CHECK(demicontraction_slack(t, x, z, alpha) >= -1e-10 * (1 + norm2(x - z) * norm2(x - z)));
    }
    // Relaxation keeps the fixed points and is SQNE.
    for (double w : {0.3, 0.5 * (1 - alpha), 0.9 * (1 - alpha)}) {
      const Denoiser tw = relax(t, w);
      const double rho = (1 - alpha - w) / w;
      for (int i = 0; i < 100; ++i) {
        const Signal z = t.oracle().sample(rng, 1.0);
        CHECK(distance(tw(z), z) <= 1e-12 * (1 + norm2(z)));
        const Signal x = random_signal(shape, DomainTag::real, 9000 + i);
        const double lhs = std::pow(distance(tw(x), z), 2);
        const double rhs = std::pow(distance(x, z), 2) - rho * std::pow(distance(tw(x), x), 2);
        CHECK(lhs <= rhs + 1e-10 * (1 + rhs));
      }
    }
  }
}

TEST_CASE("red value lower bound when 0 is a fixed point") {
  for (const auto& c : builtins()) {
    CAPTURE(c.label);
    const double alpha = *c.t.alpha();
    const Shape shape = c.t.oracle().basis().shape();
    for (int i = 0; i < 100; ++i) {
      const Signal x = random_signal(shape, DomainTag::real, 300 + i);
      const Signal r = x - c.t(x);
      CHECK(inner(x, r) >= 0.5 * (1 - alpha) * inner(r, r) - 1e-12 * (1 + inner(x, x)));
    }
  }
}

TEST_CASE("complex inputs are denoised per plane") {
  const Shape img{4, 4, 1};
  const auto soft = soft_threshold_denoiser(OrthoBasis::canonical(img), 0.5);
  const Signal re = random_signal(img, DomainTag::real, 1);
  const Signal im = random_signal(img, DomainTag::real, 2);
  const Signal out = soft(merge_complex(re, im));
  CHECK(out.is_complex());
  const auto [ore, oim] = split_complex(out);
  CHECK(ore == soft(re));
  CHECK(oim == soft(im));
}

TEST_CASE("haar basis is orthonormal") {
  const Shape img{16, 8, 2};
  const OrthoBasis haar = OrthoBasis::haar(img, 3);
  const Signal x = random_signal(img, DomainTag::real, 4);
  const auto c = haar.analyze(x);
  double sq = 0;
  for (double v : c) sq += v * v;
  CHECK(std::sqrt(sq) == doctest::Approx(norm2(x)).epsilon(1e-13));
  CHECK(distance(haar.synthesize(c), x) <= 1e-12 * norm2(x));
  const OrthoBasis det = haar.restricted(haar_detail_indices(img, 3));
  const OrthoBasis app = det.complement();
  CHECK(det.rank() + app.rank() == img.size());
  CHECK(distance(det.project(x) + app.project(x), x) <= 1e-12 * norm2(x));
  // The approximation space holds the block-constant images.
  CHECK(distance(app.project(Signal::filled(img, 3.0)), Signal::filled(img, 3.0)) <= 1e-12);
  CHECK_THROWS_AS(OrthoBasis::haar(Shape{12, 8, 1}, 3), InvalidArgument);
}
