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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pnpplo/io.hpp"
#include "pnpplo/operators.hpp"
#include "pnpplo/solvers.hpp"

namespace pnpplo {

enum class Task { deblur_uniform9, deblur_gaussian, sr_x3, sr_x2, csmri };
enum class SolverKind { pnp_plo, red_sd, red_pro, pnp_fbs };
enum class DenoiserKind { haar_soft, haar_subspace, external };
/// Grid whose sample count is used as n0 in the noise-radius formula.
enum class N0Grid { measurement, reconstruction };

const char* to_string(Task task);
const char* to_string(SolverKind solver);
const char* to_string(DenoiserKind kind);
Task parse_task(const std::string& text);
SolverKind parse_solver(const std::string& text);
DenoiserKind parse_denoiser(const std::string& text);

/// Flat key = value configuration. Unset optionals take per-task defaults
/// (see README for the key list).
struct ExperimentConfig {
  Task task = Task::deblur_gaussian;
  std::optional<double> sigma;
  std::uint64_t seed = 1;

  SolverKind solver = SolverKind::pnp_plo;
  StepKind step_rule = StepKind::tau_extrapolated;
  /// delta for pnp_plo with step_rule = constant; mu for red_pro with constant.
  double step_value = 1.0;
  double lambda = 1.0;
  double lambda_exponent = 0.0;
  double relax_floor = 1e-3;
  std::optional<double> w;
  std::optional<double> epsilon;
  std::optional<int> k_max;
  double stop_tol = 0.0;
  bool allow_unsafe = false;
  int trace_every = 1;

  // Baselines.
  double mu = 1.0;
  double red_lambda = 0.1;
  double mu0 = 1.0;
  double mu_exponent = 0.1;
  std::optional<double> fbs_step;

  DenoiserKind denoiser = DenoiserKind::haar_soft;
  std::optional<double> sigma_f;
  int haar_levels = 3;
  std::string denoiser_cmd;
  int denoiser_timeout_ms = 120000;

  /// Ground-truth image; empty selects the built-in synthetic image.
  std::string input;
  std::size_t rows = 0;
  std::size_t cols = 0;
  /// Pre-degraded measurement (RAWF32); skips the noise draw.
  std::string measurement;

  MaskKind mask = MaskKind::random;
  double mask_fraction = 0.3;
  N0Grid n0_grid = N0Grid::measurement;
  double peak = 255.0;
  bool timing = false;

  std::string trace_out;
  std::string image_out;
  std::string summary_out;
  std::string degraded_out;
};

/// Applies one "key=value" assignment; unknown keys and bad values throw
/// IoError.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
/// Round-trips through parse_config.
std::string format_config(const ExperimentConfig& config);

/// Resolved per-task defaults.
double default_sigma(Task task);
double default_sigma_f(Task task);
int default_iterations(Task task);
std::size_t task_scale(Task task);
Shape default_image_shape(Task task);

/// Piecewise-smooth test image with integer values in [0, 255].
Signal synthetic_image(std::size_t rows, std::size_t cols);

/// The forward operator of a task on images of `image` shape. The only place
/// operators are built for experiments.
LinearOperator build_operator(const ExperimentConfig& config, const Shape& image);

struct Degraded {
  LinearOperator a;
  Signal y;
  /// Real image the measurement was taken from, when known.
  std::optional<Signal> ground_truth;
  Shape image_shape;
};

/// y = A(x) + n with n drawn from `seed` (per real scalar, sigma each).
Degraded degrade(const Signal& image, const ExperimentConfig& config);

/// Bilinear upsampling by an integer factor: output sample i sits at input
/// coordinate i / scale (clamped at the far edge), matching the sampling
/// grid of the downsampling operators. scale = 1 returns y.
Signal upsample_init(const Signal& y, std::size_t scale);

/// x^0 for a task: y for deblurring, upsample_init(y, s) for
/// super-resolution, the zero-filled A*(y) for MRI.
Signal initial_point(const ExperimentConfig& config, const Degraded& degraded);

/// (sqrt(n0 sigma^2) - 0.2) / sqrt(n0 sigma^2), or 1 when sigma = 0.
double default_epsilon(std::size_t n0, double sigma);

Denoiser build_denoiser(const ExperimentConfig& config, const Shape& image);

struct ExperimentReport {
  SummaryRow summary;
  SolveTrace trace;
  /// Restored image at stored (float32) precision; magnitude for MRI.
  Signal restored;
  std::optional<double> input_psnr;
  double sigma_eta = 0.0;
  std::size_t n0 = 0;
};

/// degrade -> solve -> metrics; writes the configured output files.
ExperimentReport run_experiment(const ExperimentConfig& config);

struct GridEntry {
  std::optional<ExperimentReport> report;
  std::string error;
};

struct GridRow {
  std::string solver;
  std::size_t runs = 0;
  std::size_t failures = 0;
  std::optional<double> average_psnr;
  std::optional<double> max_psnr;
};

struct GridResult {
  std::vector<GridEntry> entries;
  std::vector<GridRow> table;
};

/// Runs every config on up to `workers` threads (0 = hardware concurrency).
/// Failures are recorded per entry and the grid continues.
GridResult grid_search(const std::vector<ExperimentConfig>& configs, std::size_t workers = 0);
void write_grid_table(std::ostream& out, const GridResult& result);

}  // namespace pnpplo
