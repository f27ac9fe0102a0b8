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

#include "pnpplo/external_denoiser.hpp"

#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <bit>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>
#include <thread>

#include "pnpplo/error.hpp"

extern char** environ;

namespace pnpplo {

namespace wire {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::vector<std::uint8_t> encode(const char (&magic)[4], const Frame& frame) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 4 * frame.samples.size());
  out.insert(out.end(), magic, magic + 4);
  put_u32(out, frame.rows);
  put_u32(out, frame.cols);
  put_u32(out, frame.channels);
  put_u32(out, std::bit_cast<std::uint32_t>(frame.sigma_f));
  for (float v : frame.samples) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

std::size_t read_exact(int fd, std::span<std::uint8_t> buffer, int timeout_ms) {
  std::size_t done = 0;
  while (done < buffer.size()) {
    pollfd pfd{fd, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, timeout_ms);
    if (ready == 0) throw TransportError("external denoiser: read timed out");
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("external denoiser: poll failed: ") + std::strerror(errno));
    }
    const ssize_t n = ::read(fd, buffer.data() + done, buffer.size() - done);
    if (n == 0) return done;
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      if (errno == ECONNRESET) return done;
      throw TransportError(std::string("external denoiser: read failed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
  return done;
}

void write_all(int fd, std::span<const std::uint8_t> bytes) {
  std::size_t done = 0;
  while (done < bytes.size()) {
    // send() with MSG_NOSIGNAL keeps a dead peer from raising SIGPIPE; fall
    // back to write() for descriptors that are not sockets.
    ssize_t n = ::send(fd, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL);
    if (n < 0 && errno == ENOTSOCK) n = ::write(fd, bytes.data() + done, bytes.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("external denoiser: write failed: ") +
                           std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

bool read_frame(int fd, const char (&magic)[4], Frame& frame, int timeout_ms) {
  std::uint8_t header[kHeaderBytes];
  const std::size_t got = read_exact(fd, header, timeout_ms);
  if (got == 0) return false;
  if (got < 4) throw TransportError("external denoiser: truncated frame magic");
  if (std::memcmp(header, magic, 4) != 0) {
    throw TransportError("external denoiser: bad frame magic");
  }
  if (got < kHeaderBytes) throw TransportError("external denoiser: truncated frame header");
  frame.rows = get_u32(header + 4);
  frame.cols = get_u32(header + 8);
  frame.channels = get_u32(header + 12);
  frame.sigma_f = std::bit_cast<float>(get_u32(header + 16));
  const std::uint64_t count = static_cast<std::uint64_t>(frame.rows) * frame.cols * frame.channels;
  if (count > (std::uint64_t{1} << 31)) throw TransportError("external denoiser: frame too large");
  std::vector<std::uint8_t> payload(static_cast<std::size_t>(count) * 4);
  if (read_exact(fd, payload, timeout_ms) != payload.size()) {
    throw TransportError("external denoiser: truncated frame payload");
  }
  frame.samples.resize(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < frame.samples.size(); ++i)
    frame.samples[i] = std::bit_cast<float>(get_u32(payload.data() + 4 * i));
  return true;
}

}  // namespace wire

namespace {

// Owns the peer process and our end of its socket pair.
class PeerProcess {
 public:
  explicit PeerProcess(const std::string& command) {
    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
      throw TransportError(std::string("external denoiser: socketpair failed: ") +
                           std::strerror(errno));
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, fds[1], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
    // Own process group, so the whole peer pipeline can be killed at once.
    posix_spawnattr_t attr;
    posix_spawnattr_init(&attr);
    posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
    posix_spawnattr_setpgroup(&attr, 0);
    const char* argv[] = {"sh", "-c", command.c_str(), nullptr};
    const int rc = ::posix_spawn(&pid_, "/bin/sh", &actions, &attr,
                                 const_cast<char* const*>(argv), environ);
    posix_spawnattr_destroy(&attr);
    posix_spawn_file_actions_destroy(&actions);
    ::close(fds[1]);
    if (rc != 0) {
      ::close(fds[0]);
      throw TransportError("external denoiser: failed to spawn '" + command +
                           "': " + std::strerror(rc));
    }
    fd_ = fds[0];
  }

  PeerProcess(const PeerProcess&) = delete;
  PeerProcess& operator=(const PeerProcess&) = delete;

  ~PeerProcess() {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    // Give the peer a moment to exit on EOF before forcing it.
    for (int i = 0; i < 200; ++i) {
      if (::waitpid(pid_, nullptr, WNOHANG) != 0) {
        ::kill(-pid_, SIGKILL);
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    ::kill(-pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
  }

  int fd() const { return fd_; }

 private:
  pid_t pid_ = -1;
  int fd_ = -1;
};

class ExternalKernel final : public DenoiserKernel {
 public:
  ExternalKernel(const std::string& command, double sigma_f, ExternalDenoiserOptions options)
      : command_(command), sigma_f_(static_cast<float>(sigma_f)), options_(options),
        peer_(std::make_unique<PeerProcess>(command)) {}

  Signal denoise(const Signal& x) const override {
    std::lock_guard lock(mutex_);
    if (broken_) throw TransportError("external denoiser '" + command_ + "' is unusable");
    try {
      return round_trip(x);
    } catch (const TransportError&) {
      broken_ = true;
      throw;
    }
  }

  std::string name() const override { return "external"; }

 private:
  Signal round_trip(const Signal& x) const {
    wire::Frame request;
    request.rows = static_cast<std::uint32_t>(x.shape().rows);
    request.cols = static_cast<std::uint32_t>(x.shape().cols);
    request.channels = static_cast<std::uint32_t>(x.shape().channels);
    request.sigma_f = sigma_f_;
    request.samples.assign(x.data().begin(), x.data().end());
    wire::write_all(peer_->fd(), wire::encode(wire::kRequestMagic, request));

    wire::Frame response;
    if (!wire::read_frame(peer_->fd(), wire::kResponseMagic, response, options_.timeout_ms)) {
      throw TransportError("external denoiser: peer closed the connection");
    }
    if (response.rows != request.rows || response.cols != request.cols ||
        response.channels != request.channels) {
      throw TransportError("external denoiser: response shape does not match request");
    }
    if (std::bit_cast<std::uint32_t>(response.sigma_f) !=
        std::bit_cast<std::uint32_t>(request.sigma_f)) {
      throw TransportError("external denoiser: response does not echo sigma_f");
    }
    std::vector<double> out(response.samples.begin(), response.samples.end());
    return Signal(x.shape(), std::move(out), x.tag());
  }

  std::string command_;
  float sigma_f_;
  ExternalDenoiserOptions options_;
  std::unique_ptr<PeerProcess> peer_;
  mutable std::mutex mutex_;
  mutable bool broken_ = false;
};

}  // namespace

Denoiser external_denoiser(const std::string& command, double sigma_f,
                           const ExternalDenoiserOptions& options) {
  if (command.empty()) throw InvalidArgument("external_denoiser: empty command");
  return Denoiser(std::make_shared<ExternalKernel>(command, sigma_f, options), std::nullopt,
                  sigma_f, std::nullopt, FixedPointOracle());
}

MockMode parse_mock_mode(const std::string& text) {
  if (text == "identity") return MockMode::identity;
  if (text == "scale_half" || text == "scale-half") return MockMode::scale_half;
  if (text == "bad_magic" || text == "bad-magic") return MockMode::bad_magic;
  if (text == "truncate") return MockMode::truncate;
  if (text == "crash") return MockMode::crash;
  throw InvalidArgument("unknown mock denoiser mode '" + text + "'");
}

int serve_mock_denoiser(MockMode mode, int in_fd, int out_fd) {
  for (;;) {
    wire::Frame frame;
    try {
      if (!wire::read_frame(in_fd, wire::kRequestMagic, frame, -1)) return 0;
    } catch (const TransportError&) {
      return 2;
    }
    switch (mode) {
      case MockMode::identity:
        wire::write_all(out_fd, wire::encode(wire::kResponseMagic, frame));
        break;
      case MockMode::scale_half:
        for (float& v : frame.samples) v *= 0.5f;
        wire::write_all(out_fd, wire::encode(wire::kResponseMagic, frame));
        break;
      case MockMode::bad_magic: {
        static constexpr char kWrong[4] = {'X', 'X', 'X', 'X'};
        wire::write_all(out_fd, wire::encode(kWrong, frame));
        break;
      }
      case MockMode::truncate: {
        auto bytes = wire::encode(wire::kResponseMagic, frame);
        bytes.resize(wire::kHeaderBytes + (bytes.size() - wire::kHeaderBytes) / 2);
        wire::write_all(out_fd, bytes);
        return 0;
      }
      case MockMode::crash:
        return 3;
    }
  }
}

}  // namespace pnpplo
