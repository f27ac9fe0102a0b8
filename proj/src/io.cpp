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

#include "pnpplo/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "pnpplo/error.hpp"

namespace pnpplo {
namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

std::uint32_t float_bits_le(float v) {
  std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
  return bits;
}

float float_from_le(std::uint32_t bits) {
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
  return std::bit_cast<float>(bits);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

// Next whitespace-delimited PGM header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string token;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      if (!token.empty()) return token;
    } else {
      token.push_back(static_cast<char>(c));
    }
    c = in.get();
  }
  if (token.empty()) throw IoError("PGM: truncated header");
  return token;
}

std::size_t parse_dim(const std::string& text, const char* what) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value == 0) {
    throw IoError(std::string(what) + ": bad dimension '" + text + "'");
  }
  return value;
}

std::string extension(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot == std::string::npos || path.find('/', dot) != std::string::npos) return {};
  std::string ext = path.substr(dot + 1);
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return ext;
}

std::string optional_cell(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

std::optional<double> parse_optional(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  return parse_number(cell);
}

int parse_int(const std::string& text) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw IoError("CSV: bad integer '" + text + "'");
  }
  return value;
}

}  // namespace

std::uint8_t quantize_8bit(double value) {
  if (std::isnan(value)) return 0;
  const double r = std::round(value);  // half away from zero
  if (r <= 0.0) return 0;
  if (r >= 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

void save_pgm(const std::string& path, const Signal& image) {
  const Shape& s = image.shape();
  if (s.channels != 1 || image.is_complex()) {
    throw InvalidArgument("PGM holds single-channel real images, got " + to_string(s));
  }
  auto out = open_out(path);
  out << "P5\n" << s.cols << ' ' << s.rows << "\n255\n";
  std::vector<char> bytes(image.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = static_cast<char>(quantize_8bit(image[i]));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

Signal load_pgm(const std::string& path) {
  auto in = open_in(path);
  if (pgm_token(in) != "P5") throw IoError("PGM: '" + path + "' is not a binary P5 file");
  const std::size_t cols = parse_dim(pgm_token(in), "PGM");
  const std::size_t rows = parse_dim(pgm_token(in), "PGM");
  const std::size_t maxval = parse_dim(pgm_token(in), "PGM");
  if (maxval > 255) throw IoError("PGM: only 8-bit files are supported (maxval " + std::to_string(maxval) + ")");
  std::vector<unsigned char> bytes(rows * cols);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != bytes.size()) {
    throw IoError("PGM: truncated payload in '" + path + "'");
  }
  Signal image(Shape{rows, cols, 1});
  for (std::size_t i = 0; i < bytes.size(); ++i) image[i] = bytes[i];
  return image;
}

void write_rawf32(std::ostream& out, const Signal& image) {
  const Shape& s = image.shape();
  out << "RAWF32 " << s.rows << ' ' << s.cols << ' ' << s.channels << '\n';
  std::vector<std::uint32_t> words(image.size());
  for (std::size_t i = 0; i < words.size(); ++i) words[i] = float_bits_le(static_cast<float>(image[i]));
  out.write(reinterpret_cast<const char*>(words.data()),
            static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
  if (!out) throw IoError("RAWF32: write failed");
}

Signal read_rawf32(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("RAWF32: missing header");
  std::istringstream header(line);
  std::string magic, r, c, ch, extra;
  header >> magic >> r >> c >> ch;
  if (magic != "RAWF32" || ch.empty() || (header >> extra)) {
    throw IoError("RAWF32: malformed header '" + line + "'");
  }
  const Shape shape{parse_dim(r, "RAWF32"), parse_dim(c, "RAWF32"), parse_dim(ch, "RAWF32")};
  std::vector<std::uint32_t> words(shape.size());
  in.read(reinterpret_cast<char*>(words.data()),
          static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
  if (static_cast<std::size_t>(in.gcount()) != words.size() * sizeof(std::uint32_t)) {
    throw IoError("RAWF32: truncated payload (expected " + std::to_string(shape.size()) + " samples)");
  }
  if (in.peek() != std::char_traits<char>::eof()) throw IoError("RAWF32: trailing bytes after payload");
  Signal image(shape);
  for (std::size_t i = 0; i < words.size(); ++i) image[i] = float_from_le(words[i]);
  return image;
}

void save_rawf32(const std::string& path, const Signal& image) {
  auto out = open_out(path);
  write_rawf32(out, image);
}

Signal load_rawf32(const std::string& path) {
  auto in = open_in(path);
  return read_rawf32(in);
}

void save_image(const std::string& path, const Signal& image) {
  if (extension(path) == "pgm") save_pgm(path, image); else save_rawf32(path, image);
}

Signal load_image(const std::string& path) {
  return extension(path) == "pgm" ? load_pgm(path) : load_rawf32(path);
}

Signal to_stored_precision(const Signal& x) {
  Signal out = x;
  for (auto& v : out.data()) v = static_cast<double>(static_cast<float>(v));
  return out;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

double parse_number(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw IoError("bad number '" + text + "'");
  }
  return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (!cells.empty() && !cells.back().empty() && cells.back().back() == '\r') cells.back().pop_back();
  return cells;
}

void write_trace_csv(std::ostream& out, const SolveTrace& trace) {
  out << kTraceHeader << '\n';
  for (const auto& row : trace.rows) {
    out << row.k << ',' << format_number(row.f) << ',' << format_number(row.residual) << ','
        << format_number(row.step) << ',' << format_number(row.dist_q) << ','
        << optional_cell(row.denoiser_residual) << ',' << optional_cell(row.psnr) << ','
        << optional_cell(row.wall_ms) << '\n';
  }
}

void save_trace_csv(const std::string& path, const SolveTrace& trace) {
  auto out = open_out(path);
  write_trace_csv(out, trace);
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != split_csv_line(kTraceHeader)) {
    throw IoError("trace CSV: unexpected header");
  }
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 8) throw IoError("trace CSV: expected 8 cells, got " + std::to_string(cells.size()));
    TraceRow row;
    row.k = parse_int(cells[0]);
    row.f = parse_number(cells[1]);
    row.residual = parse_number(cells[2]);
    row.step = parse_number(cells[3]);
    row.dist_q = parse_number(cells[4]);
    row.denoiser_residual = parse_optional(cells[5]);
    row.psnr = parse_optional(cells[6]);
    row.wall_ms = parse_optional(cells[7]);
    rows.push_back(row);
  }
  return rows;
}

std::vector<TraceRow> load_trace_csv(const std::string& path) {
  auto in = open_in(path);
  return read_trace_csv(in);
}

void write_summary_header(std::ostream& out) { out << kSummaryHeader << '\n'; }

void write_summary_row(std::ostream& out, const SummaryRow& row) {
  out << row.task << ',' << row.solver << ',' << row.step_rule << ',' << format_number(row.w) << ','
      << format_number(row.epsilon) << ',' << row.k_max << ',' << row.iters_run << ','
      << format_number(row.final_f) << ',' << optional_cell(row.final_psnr) << ','
      << optional_cell(row.wall_ms) << '\n';
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != split_csv_line(kSummaryHeader)) {
    throw IoError("summary CSV: unexpected header");
  }
  std::vector<SummaryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 10) throw IoError("summary CSV: expected 10 cells");
    SummaryRow row;
    row.task = cells[0];
    row.solver = cells[1];
    row.step_rule = cells[2];
    row.w = parse_number(cells[3]);
    row.epsilon = parse_number(cells[4]);
    row.k_max = parse_int(cells[5]);
    row.iters_run = parse_int(cells[6]);
    row.final_f = parse_number(cells[7]);
    row.final_psnr = parse_optional(cells[8]);
    row.wall_ms = parse_optional(cells[9]);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pnpplo
