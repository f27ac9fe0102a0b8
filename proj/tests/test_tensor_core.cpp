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
#include <limits>

#include "doctest.h"
#include "pnpplo/error.hpp"
#include "pnpplo/operators.hpp"
#include "pnpplo/rng.hpp"
#include "pnpplo/signal.hpp"

using namespace pnpplo;

TEST_CASE("signal shape invariants") {
  CHECK_THROWS_AS(Signal(Shape{0, 2, 1}), InvalidArgument);
  CHECK_THROWS_AS(Signal(Shape{2, 2, 1}, std::vector<double>(3)), ShapeMismatch);
  CHECK_THROWS_AS(Signal(Shape{2, 2, 1}, DomainTag::complex), InvalidArgument);
  const Signal z(Shape{2, 3, 2}, DomainTag::complex);
  CHECK(z.size() == 12);
  CHECK(z.is_complex());
}

TEST_CASE("inner product examples") {
  CHECK(inner(Signal::vector({1, 0}), Signal::vector({0, 1})) == 0.0);
  CHECK(inner(Signal::vector({1, 2}), Signal::vector({3, 4})) == 11.0);
  CHECK_THROWS_AS(inner(Signal::vector({1, 2}), Signal::vector({1, 2, 3})), ShapeMismatch);
  const Signal a = random_signal(Shape{7, 5, 1}, DomainTag::real, 3);
  CHECK(inner(a, a) == doctest::Approx(norm2(a) * norm2(a)).epsilon(1e-14));
}

TEST_CASE("norm examples") {
  CHECK(norm2(Signal::vector({3, 4})) == 5.0);
  CHECK(norm2(Signal(Shape{4, 4, 1})) == 0.0);
  const Signal a = random_signal(Shape{9, 1, 1}, DomainTag::real, 11);
  for (double c : {-3.5, 0.0, 0.25, 1e150}) {
    CHECK(norm2(c * a) == doctest::Approx(std::abs(c) * norm2(a)).epsilon(1e-13));
  }
  // Large values must not overflow.
  CHECK(norm2(Signal::vector({3e200, 4e200})) == doctest::Approx(5e200));
}

TEST_CASE("Cauchy-Schwarz on random pairs") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Signal a = random_signal(Shape{6, 1, 1}, DomainTag::real, 2 * s);
    const Signal b = random_signal(Shape{6, 1, 1}, DomainTag::real, 2 * s + 1);
    CHECK(std::abs(inner(a, b)) <= norm2(a) * norm2(b) * (1 + 1e-12));
  }
}

TEST_CASE("noise") {
  const Signal x = random_signal(Shape{16, 16, 1}, DomainTag::real, 5);
  SUBCASE("sigma zero is bit exact") { CHECK(add_noise(x, NoiseSpec{0.0, 9}) == x); }
  SUBCASE("deterministic per seed") {
    CHECK(add_noise(x, NoiseSpec{2.0, 9}) == add_noise(x, NoiseSpec{2.0, 9}));
    CHECK_FALSE(add_noise(x, NoiseSpec{2.0, 9}) == add_noise(x, NoiseSpec{2.0, 10}));
  }
  SUBCASE("norm concentration") {
    const Shape shape{128, 128, 1};
    const Signal n = make_noise(shape, DomainTag::real, NoiseSpec{std::sqrt(2.0), 42});
    const double ratio = norm2(n) / std::sqrt(16384.0 * 2.0);
    CHECK(ratio >= 0.95);
    CHECK(ratio <= 1.05);
  }
  CHECK_THROWS_AS(add_noise(x, NoiseSpec{-1.0, 1}), InvalidArgument);
}

TEST_CASE("psnr examples") {
  const Signal a = Signal::filled(Shape{8, 8, 1}, 100.0);
  CHECK(psnr(a, a, 255.0) == std::numeric_limits<double>::infinity());
  const Signal b = Signal::filled(Shape{8, 8, 1}, 101.0);
  CHECK(psnr(a, b, 255.0) == doctest::Approx(48.1308).epsilon(1e-5));
  CHECK(psnr(Signal::filled(Shape{8, 8, 1}, 0.0), Signal::filled(Shape{8, 8, 1}, 255.0), 255.0) ==
        doctest::Approx(0.0));
  CHECK_THROWS_AS(psnr(a, Signal(Shape{4, 4, 1}), 255.0), ShapeMismatch);
  CHECK_THROWS(psnr(a, b, 0.0));
  const Signal r = random_signal(Shape{8, 8, 1}, DomainTag::real, 1);
  CHECK(psnr(a, r, 255.0) == psnr(r, a, 255.0));
}

TEST_CASE("complex helpers") {
  const Signal re = Signal::vector({1, 2});
  const Signal im = Signal::vector({3, -4});
  const Signal z = merge_complex(re, im);
  CHECK(z.is_complex());
  CHECK(z.shape() == Shape{2, 1, 2});
  const auto [r2, i2] = split_complex(z);
  CHECK(r2 == re);
  CHECK(i2 == im);
  const Signal m = magnitude(z);
  CHECK(m[0] == doctest::Approx(std::sqrt(10.0)));
  CHECK(m[1] == doctest::Approx(std::sqrt(20.0)));
}

TEST_CASE("rng reproducibility") {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  // SplitMix64 reference values for seed 0.
  SplitMix64 sm(0);
  CHECK(sm.next() == 0xe220a8397b1dcdafULL);
  CHECK(sm.next() == 0x6e789e6aa1b965f4ULL);
  Rng g(1);
  double mean = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double v = g.gaussian();
    mean += v;
    sq += v * v;
  }
  mean /= n;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
  Rng u(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    CHECK((v >= 0.0 && v < 1.0));
    CHECK(u.uniform_index(7) < 7);
  }
}
