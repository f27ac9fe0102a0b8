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

#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace pnpplo::detail {

namespace {

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwArray = std::unique_ptr<fftw_complex[], FftwFree>;

FftwArray allocate(std::size_t n) {
  return FftwArray(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

// Planning touches FFTW global state and must be serialized; executing an
// existing plan on fresh fftw_malloc'd arrays is thread-safe.
class PlanCache {
 public:
  fftw_plan get(std::size_t rows, std::size_t cols, bool inverse) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(rows, cols, inverse);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    auto in = allocate(rows * cols);
    auto out = allocate(rows * cols);
    fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols),
                                      in.get(), out.get(),
                                      inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                      FFTW_ESTIMATE);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<std::size_t, std::size_t, bool>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void fft2d(std::vector<cplx>& data, std::size_t rows, std::size_t cols, bool inverse) {
  const std::size_t n = rows * cols;
  fftw_plan plan = cache().get(rows, cols, inverse);
  auto in = allocate(n);
  auto out = allocate(n);
  std::memcpy(in.get(), data.data(), sizeof(fftw_complex) * n);
  fftw_execute_dft(plan, in.get(), out.get());
  std::memcpy(static_cast<void*>(data.data()), out.get(), sizeof(fftw_complex) * n);
}

}  // namespace pnpplo::detail
