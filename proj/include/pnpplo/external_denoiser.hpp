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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pnpplo/denoisers.hpp"

namespace pnpplo {

/// DNZ1/DNR1 framing spoken with an external denoiser over its stdin/stdout.
///
///   request : "DNZ1" u32 rows u32 cols u32 channels f32 sigma_f f32[n] samples
///   response: "DNR1" u32 rows u32 cols u32 channels f32 sigma_f f32[n] samples
///
/// All integers and floats little-endian; samples row-major and
/// channel-interleaved. One response per request, no pipelining.
namespace wire {

inline constexpr char kRequestMagic[4] = {'D', 'N', 'Z', '1'};
inline constexpr char kResponseMagic[4] = {'D', 'N', 'R', '1'};
inline constexpr std::size_t kHeaderBytes = 4 + 3 * 4 + 4;

struct Frame {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t channels = 0;
  float sigma_f = 0.0f;
  std::vector<float> samples;
};

std::vector<std::uint8_t> encode(const char (&magic)[4], const Frame& frame);

/// Blocking exact read/write on a file descriptor. read_exact returns the
/// number of bytes read before EOF (short on EOF); errors throw TransportError.
std::size_t read_exact(int fd, std::span<std::uint8_t> buffer, int timeout_ms);
void write_all(int fd, std::span<const std::uint8_t> bytes);

/// Reads one frame whose magic must equal `magic`. Throws TransportError on
/// any mismatch or short read. Returns false on clean EOF before the magic.
bool read_frame(int fd, const char (&magic)[4], Frame& frame, int timeout_ms);

}  // namespace wire

struct ExternalDenoiserOptions {
  /// Per-read timeout; a silent peer beyond this is a transport error.
  int timeout_ms = 120000;
};

/// Spawns `command` through /bin/sh and talks to it over a socket pair bound to
/// the peer's stdin/stdout. No alpha is advertised and no fixed-point oracle is
/// available. Requests on one client are serialized.
Denoiser external_denoiser(const std::string& command, double sigma_f,
                           const ExternalDenoiserOptions& options = {});

enum class MockMode { identity, scale_half, bad_magic, truncate, crash };

MockMode parse_mock_mode(const std::string& text);

/// Reference peer: serves requests from in_fd until EOF. Returns a process exit
/// status (0 on clean shutdown).
int serve_mock_denoiser(MockMode mode, int in_fd, int out_fd);

}  // namespace pnpplo
