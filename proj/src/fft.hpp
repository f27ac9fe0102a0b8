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

#include <complex>
#include <cstddef>
#include <vector>

namespace pnpplo::detail {

using cplx = std::complex<double>;

/// In-place 2-D DFT over a row-major rows x cols grid, unnormalized in both
/// directions (forward uses exp(-i...)). Backed by FFTW with cached plans;
/// safe to call from several threads.
void fft2d(std::vector<cplx>& data, std::size_t rows, std::size_t cols, bool inverse);

}  // namespace pnpplo::detail
