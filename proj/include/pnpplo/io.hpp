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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pnpplo/signal.hpp"
#include "pnpplo/solvers.hpp"

namespace pnpplo {

/// Binary grayscale PGM (P5, maxval <= 255). Values are rounded half away
/// from zero and clamped to [0, 255] on save.
void save_pgm(const std::string& path, const Signal& image);
Signal load_pgm(const std::string& path);
std::uint8_t quantize_8bit(double value);

/// "RAWF32 <rows> <cols> <channels>\n" then little-endian float32 samples,
/// row-major and channel-interleaved.
void save_rawf32(const std::string& path, const Signal& image);
Signal load_rawf32(const std::string& path);
void write_rawf32(std::ostream& out, const Signal& image);
Signal read_rawf32(std::istream& in);

/// Picks the format from the extension (".pgm" or anything else for RAWF32).
void save_image(const std::string& path, const Signal& image);
Signal load_image(const std::string& path);

/// Rounds every sample through float32, the precision images are stored at.
Signal to_stored_precision(const Signal& x);

/// Shortest decimal form that reads back to the same double; "inf", "-inf",
/// "nan" for non-finite values.
std::string format_number(double value);
double parse_number(const std::string& text);

inline constexpr const char* kTraceHeader =
    "k,f,residual,step,dist_Q,denoiser_residual,psnr,wall_ms";
inline constexpr const char* kSummaryHeader =
    "task,solver,step_rule,w,epsilon,K,iters_run,final_f,final_psnr,wall_ms";

void write_trace_csv(std::ostream& out, const SolveTrace& trace);
void save_trace_csv(const std::string& path, const SolveTrace& trace);
/// Reads the rows back (k, f, residual, step, dist_q and the optional columns).
std::vector<TraceRow> read_trace_csv(std::istream& in);
std::vector<TraceRow> load_trace_csv(const std::string& path);

struct SummaryRow {
  std::string task;
  std::string solver;
  std::string step_rule;
  double w = 1.0;
  double epsilon = 1.0;
  int k_max = 0;
  int iters_run = 0;
  double final_f = 0.0;
  std::optional<double> final_psnr;
  std::optional<double> wall_ms;
};

void write_summary_header(std::ostream& out);
void write_summary_row(std::ostream& out, const SummaryRow& row);
std::vector<SummaryRow> read_summary_csv(std::istream& in);

/// Splits one CSV line on commas (no quoting; fields never contain commas).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace pnpplo
