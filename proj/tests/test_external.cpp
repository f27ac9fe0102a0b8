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

#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <thread>

#include "doctest.h"
#include "pnpplo/error.hpp"
#include "pnpplo/external_denoiser.hpp"
#include "pnpplo/io.hpp"
#include "pnpplo/operators.hpp"

using namespace pnpplo;

namespace {

std::string mock(const char* mode) {
  return std::string("'") + PNPPLO_CLI_PATH + "' mock-denoiser --mode " + mode;
}

Signal float_exact_signal(const Shape& shape, std::uint64_t seed) {
  return to_stored_precision(100.0 * random_signal(shape, DomainTag::real, seed));
}

}  // namespace

TEST_CASE("wire encoding is little-endian with the documented layout") {
  wire::Frame f;
  f.rows = 2;
  f.cols = 1;
  f.channels = 1;
  f.sigma_f = 1.5f;
  f.samples = {1.0f, -2.0f};
  const auto bytes = wire::encode(wire::kRequestMagic, f);
  REQUIRE(bytes.size() == wire::kHeaderBytes + 8);
  CHECK(std::memcmp(bytes.data(), "DNZ1", 4) == 0);
  CHECK(bytes[4] == 2);
  CHECK(bytes[5] == 0);
  CHECK(bytes[8] == 1);
  CHECK(bytes[12] == 1);
  // 1.5f = 0x3fc00000
  CHECK(bytes[16] == 0x00);
  CHECK(bytes[18] == 0xc0);
  CHECK(bytes[19] == 0x3f);
  // -2.0f = 0xc0000000
  CHECK(bytes[27] == 0xc0);
}

TEST_CASE("frames read back and reject bad input") {
  int fds[2];
  REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) == 0);
  wire::Frame f;
  f.rows = 1;
  f.cols = 3;
  f.channels = 1;
  f.sigma_f = 0.25f;
  f.samples = {1.0f, 2.0f, 3.0f};
  wire::write_all(fds[0], wire::encode(wire::kResponseMagic, f));
  wire::Frame g;
  REQUIRE(wire::read_frame(fds[1], wire::kResponseMagic, g, 1000));
  CHECK(g.samples == f.samples);
  CHECK(g.sigma_f == f.sigma_f);
  wire::write_all(fds[0], wire::encode(wire::kRequestMagic, f));
  CHECK_THROWS_AS(wire::read_frame(fds[1], wire::kResponseMagic, g, 1000), TransportError);
  auto bytes = wire::encode(wire::kResponseMagic, f);
  bytes.resize(bytes.size() - 3);
  wire::write_all(fds[0], bytes);
  ::shutdown(fds[0], SHUT_WR);
  CHECK_THROWS_AS(wire::read_frame(fds[1], wire::kResponseMagic, g, 1000), TransportError);
  ::close(fds[0]);
  ::close(fds[1]);
}

TEST_CASE("clean EOF before a frame is not an error") {
  int fds[2];
  REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) == 0);
  ::close(fds[0]);
  wire::Frame g;
  CHECK_FALSE(wire::read_frame(fds[1], wire::kResponseMagic, g, 1000));
  ::close(fds[1]);
}

TEST_CASE("mock identity and scaling peers are bit exact") {
  const Shape s{9, 7, 2};
  const Signal x = float_exact_signal(s, 3);
  const auto id = external_denoiser(mock("identity"), 2.5);
  CHECK_FALSE(id.alpha().has_value());
  CHECK_FALSE(id.oracle().known());
  for (int rep = 0; rep < 3; ++rep) CHECK(id(x) == x);
  const auto half = external_denoiser(mock("scale_half"), 2.5);
  CHECK(half(x) == 0.5 * x);
  const Signal other = float_exact_signal(Shape{4, 4, 1}, 8);
  CHECK(half(other) == 0.5 * other);
}

TEST_CASE("complex signals travel as real planes") {
  const Signal z = to_stored_precision(random_signal(Shape{4, 4, 2}, DomainTag::complex, 4));
  const auto half = external_denoiser(mock("scale_half"), 1.0);
  const Signal out = half(z);
  CHECK(out.is_complex());
  CHECK(out == 0.5 * z);
}

TEST_CASE("protocol violations surface as transport errors") {
  const Signal x = float_exact_signal(Shape{4, 4, 1}, 1);
  for (const char* mode : {"bad_magic", "truncate", "crash"}) {
    CAPTURE(mode);
    const auto t = external_denoiser(mock(mode), 1.0);
    CHECK_THROWS_AS(t(x), TransportError);
    // The client stays unusable after a protocol failure.
    CHECK_THROWS_AS(t(x), TransportError);
  }
  const auto missing = external_denoiser("/nonexistent/denoiser-binary", 1.0);
  CHECK_THROWS_AS(missing(x), TransportError);
  const auto silent = external_denoiser("sleep 5", 1.0, ExternalDenoiserOptions{200});
  CHECK_THROWS_AS(silent(x), TransportError);
}

TEST_CASE("concurrent callers share one client safely") {
  const auto half = external_denoiser(mock("scale_half"), 1.0);
  std::vector<std::thread> threads;
  std::vector<int> ok(4, 0);
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      const Signal x = float_exact_signal(Shape{8, 8, 1}, 50 + t);
      int good = 0;
      for (int i = 0; i < 20; ++i) good += half(x) == 0.5 * x;
      ok[t] = good;
    });
  }
  for (auto& th : threads) th.join();
  for (int v : ok) CHECK(v == 20);
}
