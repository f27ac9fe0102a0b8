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

#include "pnpplo/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "pnpplo/basis.hpp"
#include "pnpplo/error.hpp"
#include "pnpplo/external_denoiser.hpp"
#include "pnpplo/landweber.hpp"
#include "pnpplo/projections.hpp"

namespace pnpplo {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    const double x = parse_number(v);
    if (!std::isfinite(x)) throw IoError("");
    return x;
  } catch (const IoError&) {
    throw IoError("config: '" + key + "' expects a finite number, got '" + v + "'");
  }
}

template <typename Int>
Int to_integer(const std::string& key, const std::string& v) {
  Int x{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw IoError("config: '" + key + "' expects an integer, got '" + v + "'");
  }
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw IoError("config: '" + key + "' expects a boolean, got '" + v + "'");
}

template <typename Parse>
auto enum_value(const std::string& key, const std::string& v, Parse parse) {
  try {
    return parse(v);
  } catch (const InvalidArgument& e) {
    throw IoError("config: '" + key + "': " + e.what());
  }
}

int haar_depth(const Shape& shape, int wanted) {
  int levels = 0;
  while (levels < wanted) {
    const std::size_t block = std::size_t{1} << (levels + 1);
    if (shape.rows % block != 0 || shape.cols % block != 0) break;
    ++levels;
  }
  return levels;
}

double bilinear_tap(std::size_t i, std::size_t scale, std::size_t n, std::size_t& lo, std::size_t& hi) {
  const double pos = std::min(static_cast<double>(i) / static_cast<double>(scale),
                              static_cast<double>(n - 1));
  lo = static_cast<std::size_t>(std::floor(pos));
  hi = std::min(lo + 1, n - 1);
  return pos - static_cast<double>(lo);
}

std::string step_rule_name(const ExperimentConfig& c) {
  switch (c.solver) {
    case SolverKind::pnp_plo: return to_string(c.step_rule);
    case SolverKind::red_sd: return "constant";
    case SolverKind::red_pro:
      return c.step_rule == StepKind::constant ? "constant" : "diminishing";
    case SolverKind::pnp_fbs: return "constant";
  }
  return "unknown";
}

}  // namespace

const char* to_string(Task task) {
  switch (task) {
    case Task::deblur_uniform9: return "deblur_uniform9";
    case Task::deblur_gaussian: return "deblur_gaussian";
    case Task::sr_x3: return "sr_x3";
    case Task::sr_x2: return "sr_x2";
    case Task::csmri: return "csmri";
  }
  return "unknown";
}

const char* to_string(SolverKind solver) {
  switch (solver) {
    case SolverKind::pnp_plo: return "pnp_plo";
    case SolverKind::red_sd: return "red_sd";
    case SolverKind::red_pro: return "red_pro";
    case SolverKind::pnp_fbs: return "pnp_fbs";
  }
  return "unknown";
}

const char* to_string(DenoiserKind kind) {
  switch (kind) {
    case DenoiserKind::haar_soft: return "haar_soft";
    case DenoiserKind::haar_subspace: return "haar_subspace";
    case DenoiserKind::external: return "external";
  }
  return "unknown";
}

Task parse_task(const std::string& text) {
  for (Task t : {Task::deblur_uniform9, Task::deblur_gaussian, Task::sr_x3, Task::sr_x2, Task::csmri})
    if (text == to_string(t)) return t;
  throw InvalidArgument("unknown task '" + text + "'");
}

SolverKind parse_solver(const std::string& text) {
  for (SolverKind s : {SolverKind::pnp_plo, SolverKind::red_sd, SolverKind::red_pro, SolverKind::pnp_fbs})
    if (text == to_string(s)) return s;
  throw InvalidArgument("unknown solver '" + text + "'");
}

DenoiserKind parse_denoiser(const std::string& text) {
  for (DenoiserKind d : {DenoiserKind::haar_soft, DenoiserKind::haar_subspace, DenoiserKind::external})
    if (text == to_string(d)) return d;
  throw InvalidArgument("unknown denoiser '" + text + "'");
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "task") c.task = enum_value(key, v, parse_task);
  else if (key == "sigma") c.sigma = to_double(key, v);
  else if (key == "seed") c.seed = to_integer<std::uint64_t>(key, v);
  else if (key == "solver") c.solver = enum_value(key, v, parse_solver);
  else if (key == "step_rule") c.step_rule = enum_value(key, v, parse_step_kind);
  else if (key == "step_value" || key == "delta") c.step_value = to_double(key, v);
  else if (key == "lambda") c.lambda = to_double(key, v);
  else if (key == "lambda_exponent") c.lambda_exponent = to_double(key, v);
  else if (key == "relax_floor") c.relax_floor = to_double(key, v);
  else if (key == "w") c.w = to_double(key, v);
  else if (key == "epsilon") c.epsilon = to_double(key, v);
  else if (key == "K") c.k_max = to_integer<int>(key, v);
  else if (key == "stop_tol") c.stop_tol = to_double(key, v);
  else if (key == "allow_unsafe") c.allow_unsafe = to_bool(key, v);
  else if (key == "trace_every") c.trace_every = to_integer<int>(key, v);
  else if (key == "mu") c.mu = to_double(key, v);
  else if (key == "red_lambda") c.red_lambda = to_double(key, v);
  else if (key == "mu0") c.mu0 = to_double(key, v);
  else if (key == "mu_exponent") c.mu_exponent = to_double(key, v);
  else if (key == "fbs_step") c.fbs_step = to_double(key, v);
  else if (key == "denoiser") c.denoiser = enum_value(key, v, parse_denoiser);
  else if (key == "sigma_f") c.sigma_f = to_double(key, v);
  else if (key == "haar_levels") c.haar_levels = to_integer<int>(key, v);
  else if (key == "denoiser_cmd") c.denoiser_cmd = v;
  else if (key == "denoiser_timeout_ms") c.denoiser_timeout_ms = to_integer<int>(key, v);
  else if (key == "input") c.input = v;
  else if (key == "rows") c.rows = to_integer<std::size_t>(key, v);
  else if (key == "cols") c.cols = to_integer<std::size_t>(key, v);
  else if (key == "measurement") c.measurement = v;
  else if (key == "mask") c.mask = enum_value(key, v, parse_mask_kind);
  else if (key == "mask_fraction") c.mask_fraction = to_double(key, v);
  else if (key == "n0_grid") {
    if (v == "measurement") c.n0_grid = N0Grid::measurement;
    else if (v == "reconstruction") c.n0_grid = N0Grid::reconstruction;
    else throw IoError("config: n0_grid must be measurement or reconstruction");
  }
  else if (key == "peak") c.peak = to_double(key, v);
  else if (key == "timing") c.timing = to_bool(key, v);
  else if (key == "trace_out") c.trace_out = v;
  else if (key == "image_out") c.image_out = v;
  else if (key == "summary_out") c.summary_out = v;
  else if (key == "degraded_out") c.degraded_out = v;
  else throw IoError("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw IoError("config line " + std::to_string(number) + ": expected key = value");
    }
    apply_setting(config, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  return parse_config(in);
}

std::string format_config(const ExperimentConfig& c) {
  std::ostringstream out;
  const auto put = [&](const char* key, const std::string& value) {
    out << key << " = " << value << '\n';
  };
  const auto num = [](double v) { return format_number(v); };
  put("task", to_string(c.task));
  if (c.sigma) put("sigma", num(*c.sigma));
  put("seed", std::to_string(c.seed));
  put("solver", to_string(c.solver));
  put("step_rule", to_string(c.step_rule));
  put("step_value", num(c.step_value));
  put("lambda", num(c.lambda));
  put("lambda_exponent", num(c.lambda_exponent));
  put("relax_floor", num(c.relax_floor));
  if (c.w) put("w", num(*c.w));
  if (c.epsilon) put("epsilon", num(*c.epsilon));
  if (c.k_max) put("K", std::to_string(*c.k_max));
  put("stop_tol", num(c.stop_tol));
  put("allow_unsafe", c.allow_unsafe ? "true" : "false");
  put("trace_every", std::to_string(c.trace_every));
  put("mu", num(c.mu));
  put("red_lambda", num(c.red_lambda));
  put("mu0", num(c.mu0));
  put("mu_exponent", num(c.mu_exponent));
  if (c.fbs_step) put("fbs_step", num(*c.fbs_step));
  put("denoiser", to_string(c.denoiser));
  if (c.sigma_f) put("sigma_f", num(*c.sigma_f));
  put("haar_levels", std::to_string(c.haar_levels));
  if (!c.denoiser_cmd.empty()) put("denoiser_cmd", c.denoiser_cmd);
  put("denoiser_timeout_ms", std::to_string(c.denoiser_timeout_ms));
  if (!c.input.empty()) put("input", c.input);
  if (c.rows) put("rows", std::to_string(c.rows));
  if (c.cols) put("cols", std::to_string(c.cols));
  if (!c.measurement.empty()) put("measurement", c.measurement);
  put("mask", to_string(c.mask));
  put("mask_fraction", num(c.mask_fraction));
  put("n0_grid", c.n0_grid == N0Grid::measurement ? "measurement" : "reconstruction");
  put("peak", num(c.peak));
  put("timing", c.timing ? "true" : "false");
  if (!c.trace_out.empty()) put("trace_out", c.trace_out);
  if (!c.image_out.empty()) put("image_out", c.image_out);
  if (!c.summary_out.empty()) put("summary_out", c.summary_out);
  if (!c.degraded_out.empty()) put("degraded_out", c.degraded_out);
  return out.str();
}

double default_sigma(Task task) {
  switch (task) {
    case Task::deblur_uniform9:
    case Task::deblur_gaussian: return std::sqrt(2.0);
    case Task::sr_x3:
    case Task::sr_x2: return 5.0;
    case Task::csmri: return 15.0;
  }
  return 0.0;
}

double default_sigma_f(Task task) {
  switch (task) {
    case Task::deblur_uniform9:
    case Task::deblur_gaussian: return 1.9;
    case Task::sr_x3:
    case Task::sr_x2: return 5.0;
    case Task::csmri: return 15.0;
  }
  return 1.0;
}

int default_iterations(Task) { return 1000; }

std::size_t task_scale(Task task) {
  switch (task) {
    case Task::sr_x3: return 3;
    case Task::sr_x2: return 2;
    default: return 1;
  }
}

Shape default_image_shape(Task task) {
  return task == Task::sr_x3 ? Shape{96, 96, 1} : Shape{64, 64, 1};
}

Signal synthetic_image(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw InvalidArgument("synthetic_image: empty shape");
  Signal img(Shape{rows, cols, 1});
  const double h = static_cast<double>(rows);
  const double w = static_cast<double>(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double y = (static_cast<double>(r) + 0.5) / h;
      const double x = (static_cast<double>(c) + 0.5) / w;
      double v = 40.0 + 60.0 * x + 20.0 * y;
      if (x > 0.12 && x < 0.45 && y > 0.15 && y < 0.55) v = 210.0;
      const double dx = x - 0.68, dy = y - 0.62;
      if (dx * dx + dy * dy < 0.05) v = 120.0 + 60.0 * std::cos(12.0 * dx);
      if (y > 0.78 && y < 0.9 && std::fmod(std::floor(x * 16.0), 2.0) == 0.0) v = 25.0;
      if (x + y > 1.55) v = 240.0 - 40.0 * y;
      img.at(r, c) = std::round(std::clamp(v, 0.0, 255.0));
    }
  }
  return img;
}

LinearOperator build_operator(const ExperimentConfig& config, const Shape& image) {
  switch (config.task) {
    case Task::deblur_uniform9:
      return conv2d_circular(uniform_kernel(9), image);
    case Task::deblur_gaussian:
      return conv2d_circular(gaussian_kernel(9, 1.6), image);
    case Task::sr_x3:
    case Task::sr_x2: {
      const std::size_t s = task_scale(config.task);
      if (image.rows % s != 0 || image.cols % s != 0) {
        throw InvalidArgument("task " + std::string(to_string(config.task)) + ": scale " +
                              std::to_string(s) + " does not divide " + to_string(image));
      }
      return downsample_blur(gaussian_kernel(7, 1.6), s, image);
    }
    case Task::csmri: {
      if (image.channels != 1) throw InvalidArgument("csmri: single-channel images only");
      if (!(config.mask_fraction > 0.0 && config.mask_fraction <= 1.0)) {
        throw InvalidArgument("csmri: mask_fraction must lie in (0, 1]");
      }
      const auto mask = make_mask(config.mask, config.mask_fraction, image.rows, image.cols,
                                  config.seed ^ 0x6d61736bULL);
      return masked_fourier(mask);
    }
  }
  throw InvalidArgument("unknown task");
}

Degraded degrade(const Signal& image, const ExperimentConfig& config) {
  if (image.is_complex()) throw InvalidArgument("degrade: expects a real image");
  LinearOperator a = build_operator(config, image.shape());
  const Signal x = config.task == Task::csmri
                       ? merge_complex(image, Signal(image.shape()))
                       : image;
  const double sigma = config.sigma.value_or(default_sigma(config.task));
  if (sigma < 0.0) throw InvalidArgument("degrade: sigma must be >= 0");
  Signal y = add_noise(a.apply(x), NoiseSpec{sigma, config.seed});
  return Degraded{std::move(a), std::move(y), image, image.shape()};
}

Signal upsample_init(const Signal& y, std::size_t scale) {
  if (scale == 0) throw InvalidArgument("upsample_init: scale must be >= 1");
  if (scale == 1) return y;
  const Shape in = y.shape();
  const Shape out{in.rows * scale, in.cols * scale, in.channels};
  Signal x(out, y.tag());
  for (std::size_t r = 0; r < out.rows; ++r) {
    std::size_t r0, r1;
    const double fr = bilinear_tap(r, scale, in.rows, r0, r1);
    for (std::size_t c = 0; c < out.cols; ++c) {
      std::size_t c0, c1;
      const double fc = bilinear_tap(c, scale, in.cols, c0, c1);
      for (std::size_t ch = 0; ch < in.channels; ++ch) {
        const double top = (1.0 - fc) * y.at(r0, c0, ch) + fc * y.at(r0, c1, ch);
        const double bottom = (1.0 - fc) * y.at(r1, c0, ch) + fc * y.at(r1, c1, ch);
        x.at(r, c, ch) = (1.0 - fr) * top + fr * bottom;
      }
    }
  }
  return x;
}

Signal initial_point(const ExperimentConfig& config, const Degraded& d) {
  switch (config.task) {
    case Task::deblur_uniform9:
    case Task::deblur_gaussian: return d.y;
    case Task::sr_x3:
    case Task::sr_x2: return upsample_init(d.y, task_scale(config.task));
    case Task::csmri: return d.a.adjoint(d.y);
  }
  return d.y;
}

double default_epsilon(std::size_t n0, double sigma) {
  if (sigma == 0.0) return 1.0;
  const double full = std::sqrt(static_cast<double>(n0) * sigma * sigma);
  return (full - 0.2) / full;
}

Denoiser build_denoiser(const ExperimentConfig& config, const Shape& image) {
  const double sigma_f = config.sigma_f.value_or(default_sigma_f(config.task));
  switch (config.denoiser) {
    case DenoiserKind::haar_soft: {
      const int levels = haar_depth(image, config.haar_levels);
      const OrthoBasis haar = OrthoBasis::haar(image, levels);
      return soft_threshold_denoiser(haar.restricted(haar_detail_indices(image, levels)), sigma_f);
    }
    case DenoiserKind::haar_subspace: {
      const int levels = haar_depth(image, config.haar_levels);
      const OrthoBasis haar = OrthoBasis::haar(image, levels);
      return subspace_denoiser(haar.restricted(haar_detail_indices(image, levels)).complement());
    }
    case DenoiserKind::external:
      if (config.denoiser_cmd.empty()) throw InvalidArgument("denoiser = external needs denoiser_cmd");
      return external_denoiser(config.denoiser_cmd, sigma_f,
                               ExternalDenoiserOptions{config.denoiser_timeout_ms});
  }
  throw InvalidArgument("unknown denoiser");
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (config.trace_every < 1) throw InvalidArgument("trace_every must be >= 1");
  Signal image;
  if (!config.input.empty()) {
    image = load_image(config.input);
  } else {
    const Shape shape = default_image_shape(config.task);
    image = synthetic_image(config.rows ? config.rows : shape.rows,
                            config.cols ? config.cols : shape.cols);
  }

  std::optional<Degraded> degraded;
  if (!config.measurement.empty()) {
    LinearOperator a = build_operator(config, image.shape());
    Signal y = load_rawf32(config.measurement);
    if (y.size() != a.out_shape().size()) {
      throw IoError("measurement '" + config.measurement + "' has " + std::to_string(y.size()) +
                    " samples, operator expects " + to_string(a.out_shape()));
    }
    y = y.reshaped(a.out_shape(), a.out_tag());
    std::optional<Signal> truth;
    if (!config.input.empty()) truth = image;
    degraded.emplace(Degraded{std::move(a), std::move(y), std::move(truth), image.shape()});
  } else {
    degraded.emplace(degrade(image, config));
  }
  const Degraded& d = *degraded;
  if (!config.degraded_out.empty()) save_rawf32(config.degraded_out, d.y);

  const double sigma = config.sigma.value_or(default_sigma(config.task));
  ExperimentReport report;
  report.n0 = config.n0_grid == N0Grid::measurement ? d.y.size() : d.a.in_shape().size();
  const double epsilon = config.epsilon.value_or(default_epsilon(report.n0, sigma));
  report.sigma_eta = radius_from_noise(report.n0, sigma, epsilon);
  ConvexSet q = report.sigma_eta > 0.0 ? ConvexSet::l2_ball(d.y, report.sigma_eta)
                                       : ConvexSet::singleton(d.y);
  SCFPProblem problem{d.a, std::move(q), build_denoiser(config, d.image_shape), d.ground_truth};

  SolveConfig sc;
  sc.max_iters = config.k_max.value_or(default_iterations(config.task));
  sc.lambda = LambdaSchedule{config.lambda, config.lambda_exponent};
  sc.relax_floor = config.relax_floor;
  sc.w = config.w;
  sc.stop_tol = config.stop_tol;
  sc.trace_every = config.trace_every;
  sc.allow_unsafe = config.allow_unsafe;
  sc.record_time = config.timing;
  sc.peak = config.peak;

  const Signal x0 = initial_point(config, d);
  SolveResult result;
  switch (config.solver) {
    case SolverKind::pnp_plo:
      switch (config.step_rule) {
        case StepKind::tau_extrapolated: sc.step = StepRule::tau(); break;
        case StepKind::polyak: sc.step = StepRule::polyak(); break;
        case StepKind::constant: sc.step = StepRule::constant(config.step_value); break;
        case StepKind::diminishing:
          throw InvalidArgument("pnp_plo: step_rule must be tau, polyak or constant");
      }
      result = pnp_plo(problem, sc, x0);
      break;
    case SolverKind::red_sd:
      result = red_sd(problem, config.mu, config.red_lambda, sc, x0);
      break;
    case SolverKind::red_pro: {
      const StepRule rule = config.step_rule == StepKind::constant
                                ? StepRule::constant(config.step_value)
                                : StepRule::diminishing(config.mu0, config.mu_exponent);
      double w = 0.0;
      if (config.w) {
        w = *config.w;
      } else if (const auto alpha = problem.t.alpha()) {
        w = 0.9 * (1.0 - *alpha) / 2.0;
      } else {
        throw InvalidArgument("red_pro: denoiser advertises no alpha, set w explicitly");
      }
      result = red_pro(problem, rule, w, sc, x0);
      break;
    }
    case SolverKind::pnp_fbs:
      result = pnp_fbs(problem, config.fbs_step.value_or(1.0 / d.a.norm_sq()), sc, x0);
      break;
  }

  const Signal final_image = result.x.is_complex() ? magnitude(result.x) : result.x;
  report.restored = to_stored_precision(final_image);
  if (d.ground_truth) {
    const Signal start_image = x0.is_complex() ? magnitude(x0) : x0;
    if (start_image.shape() == d.ground_truth->shape()) {
      report.input_psnr = psnr(*d.ground_truth, start_image, config.peak);
    }
  }

  SummaryRow& s = report.summary;
  s.task = to_string(config.task);
  s.solver = to_string(config.solver);
  s.step_rule = step_rule_name(config);
  s.w = result.trace.w;
  s.epsilon = epsilon;
  s.k_max = sc.max_iters;
  s.iters_run = result.trace.iterations;
  s.final_f = fidelity(problem.a, problem.q, result.x);
  if (d.ground_truth) s.final_psnr = psnr(*d.ground_truth, report.restored, config.peak);
  report.trace = std::move(result.trace);

  if (!config.image_out.empty()) save_image(config.image_out, report.restored);
  if (!config.trace_out.empty()) save_trace_csv(config.trace_out, report.trace);
  if (config.timing) {
    s.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  if (!config.summary_out.empty()) {
    std::ofstream out(config.summary_out, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + config.summary_out + "' for writing");
    write_summary_header(out);
    write_summary_row(out, s);
    if (!out) throw IoError("write failed for '" + config.summary_out + "'");
  }
  return report;
}

GridResult grid_search(const std::vector<ExperimentConfig>& configs, std::size_t workers) {
  if (configs.empty()) throw InvalidArgument("grid_search: no configurations");
  GridResult result;
  result.entries.resize(configs.size());
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, configs.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        result.entries[i].report = run_experiment(configs[i]);
      } catch (const std::exception& e) {
        result.entries[i].error = e.what();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  pool.clear();

  for (std::size_t i = 0; i < configs.size(); ++i) {
    const std::string name = to_string(configs[i].solver);
    auto row = std::find_if(result.table.begin(), result.table.end(),
                            [&](const GridRow& r) { return r.solver == name; });
    if (row == result.table.end()) {
      GridRow fresh;
      fresh.solver = name;
      result.table.push_back(fresh);
      row = result.table.end() - 1;
    }
    ++row->runs;
    const auto& entry = result.entries[i];
    if (!entry.report || !entry.report->summary.final_psnr) {
      ++row->failures;
      continue;
    }
    const double p = *entry.report->summary.final_psnr;
    const std::size_t ok = row->runs - row->failures;
    row->average_psnr = row->average_psnr ? *row->average_psnr + (p - *row->average_psnr) / static_cast<double>(ok) : p;
    row->max_psnr = row->max_psnr ? std::max(*row->max_psnr, p) : p;
  }
  return result;
}

void write_grid_table(std::ostream& out, const GridResult& result) {
  out << "solver,runs,failures,average_psnr,max_psnr\n";
  for (const auto& row : result.table) {
    out << row.solver << ',' << row.runs << ',' << row.failures << ','
        << (row.average_psnr ? format_number(*row.average_psnr) : "") << ','
        << (row.max_psnr ? format_number(*row.max_psnr) : "") << '\n';
  }
}

}  // namespace pnpplo
