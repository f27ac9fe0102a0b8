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

#include "pnpplo/pnpplo.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>
#include <new>
#include <string>

#include "pnpplo/error.hpp"
#include "pnpplo/experiments.hpp"
#include "pnpplo/external_denoiser.hpp"
#include "pnpplo/rng.hpp"

struct pnp_signal {
  pnpplo::Signal value;
};

struct pnp_config {
  pnpplo::ExperimentConfig value;
};

struct pnp_report {
  pnpplo::ExperimentReport value;
};

struct pnp_grid {
  pnpplo::GridResult value;
};

namespace {

thread_local std::string g_last_error;

pnp_status fail(pnp_status status, const char* message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
pnp_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return PNP_OK;
  } catch (const pnpplo::ShapeMismatch& e) {
    return fail(PNP_ERR_SHAPE, e.what());
  } catch (const pnpplo::InvalidArgument& e) {
    return fail(PNP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const pnpplo::NumericalError& e) {
    return fail(PNP_ERR_NUMERICAL, e.what());
  } catch (const pnpplo::IoError& e) {
    return fail(PNP_ERR_IO, e.what());
  } catch (const pnpplo::TransportError& e) {
    return fail(PNP_ERR_TRANSPORT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PNP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PNP_ERR_INTERNAL, e.what());
  }
}

#define PNP_REQUIRE(cond, what) \
  if (!(cond)) return fail(PNP_ERR_INVALID_ARGUMENT, what)

double nan_or(const std::optional<double>& v) {
  return v ? *v : std::numeric_limits<double>::quiet_NaN();
}

pnp_solve_status solve_status(pnpplo::SolveStatus s) {
  switch (s) {
    case pnpplo::SolveStatus::converged: return PNP_SOLVE_CONVERGED;
    case pnpplo::SolveStatus::max_iters: return PNP_SOLVE_MAX_ITERS;
    case pnpplo::SolveStatus::infeasible_direction: return PNP_SOLVE_INFEASIBLE_DIRECTION;
  }
  return PNP_SOLVE_MAX_ITERS;
}

void fill_summary(const pnpplo::ExperimentReport& r, pnp_summary* out) {
  out->iters_run = r.summary.iters_run;
  out->k_max = r.summary.k_max;
  out->w = r.summary.w;
  out->epsilon = r.summary.epsilon;
  out->final_f = r.summary.final_f;
  out->final_psnr = nan_or(r.summary.final_psnr);
  out->input_psnr = nan_or(r.input_psnr);
  out->sigma_eta = r.sigma_eta;
  out->n0 = r.n0;
  out->status = solve_status(r.trace.status);
  out->theory_applies = r.trace.theory_applies ? 1 : 0;
}

pnpplo::Signal config_image(const pnpplo::ExperimentConfig& c) {
  if (!c.input.empty()) return pnpplo::load_image(c.input);
  const pnpplo::Shape shape = pnpplo::default_image_shape(c.task);
  return pnpplo::synthetic_image(c.rows ? c.rows : shape.rows, c.cols ? c.cols : shape.cols);
}

}  // namespace

extern "C" {

const char* pnp_version(void) { return "0.1.0"; }

const char* pnp_status_string(pnp_status status) {
  switch (status) {
    case PNP_OK: return "ok";
    case PNP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PNP_ERR_SHAPE: return "shape mismatch";
    case PNP_ERR_NUMERICAL: return "numerical failure";
    case PNP_ERR_IO: return "i/o error";
    case PNP_ERR_TRANSPORT: return "transport error";
    case PNP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* pnp_last_error(void) { return g_last_error.c_str(); }

pnp_status pnp_signal_create(size_t rows, size_t cols, size_t channels, int is_complex,
                             const double* data, pnp_signal** out) {
  PNP_REQUIRE(out, "out is NULL");
  return guarded([&] {
    const pnpplo::Shape shape{rows, cols, channels};
    const auto tag = is_complex ? pnpplo::DomainTag::complex : pnpplo::DomainTag::real;
    pnpplo::Signal s(shape, tag);
    if (data) std::memcpy(s.data().data(), data, sizeof(double) * s.size());
    *out = new pnp_signal{std::move(s)};
  });
}

void pnp_signal_destroy(pnp_signal* signal) { delete signal; }

pnp_status pnp_signal_shape(const pnp_signal* signal, size_t* rows, size_t* cols, size_t* channels,
                            int* is_complex) {
  PNP_REQUIRE(signal, "signal is NULL");
  const auto& s = signal->value.shape();
  if (rows) *rows = s.rows;
  if (cols) *cols = s.cols;
  if (channels) *channels = s.channels;
  if (is_complex) *is_complex = signal->value.is_complex() ? 1 : 0;
  return PNP_OK;
}

pnp_status pnp_signal_copy_data(const pnp_signal* signal, double* out, size_t capacity) {
  PNP_REQUIRE(signal && out, "NULL argument");
  if (capacity < signal->value.size()) return fail(PNP_ERR_INVALID_ARGUMENT, "buffer too small");
  std::memcpy(out, signal->value.data().data(), sizeof(double) * signal->value.size());
  return PNP_OK;
}

pnp_status pnp_signal_load(const char* path, pnp_signal** out) {
  PNP_REQUIRE(path && out, "NULL argument");
  return guarded([&] { *out = new pnp_signal{pnpplo::load_image(path)}; });
}

pnp_status pnp_signal_save(const char* path, const pnp_signal* signal) {
  PNP_REQUIRE(path && signal, "NULL argument");
  return guarded([&] { pnpplo::save_image(path, signal->value); });
}

pnp_status pnp_psnr(const pnp_signal* reference, const pnp_signal* test, double peak, double* out) {
  PNP_REQUIRE(reference && test && out, "NULL argument");
  return guarded([&] { *out = pnpplo::psnr(reference->value, test->value, peak); });
}

pnp_status pnp_config_create(pnp_config** out) {
  PNP_REQUIRE(out, "out is NULL");
  return guarded([&] { *out = new pnp_config{}; });
}

pnp_status pnp_config_load(const char* path, pnp_config** out) {
  PNP_REQUIRE(path && out, "NULL argument");
  return guarded([&] { *out = new pnp_config{pnpplo::load_config(path)}; });
}

pnp_status pnp_config_clone(const pnp_config* config, pnp_config** out) {
  PNP_REQUIRE(config && out, "NULL argument");
  return guarded([&] { *out = new pnp_config{config->value}; });
}

void pnp_config_destroy(pnp_config* config) { delete config; }

pnp_status pnp_config_set(pnp_config* config, const char* key, const char* value) {
  PNP_REQUIRE(config && key && value, "NULL argument");
  return guarded([&] { pnpplo::apply_setting(config->value, key, value); });
}

pnp_status pnp_config_format(const pnp_config* config, char* buffer, size_t capacity,
                             size_t* needed) {
  PNP_REQUIRE(config && needed, "NULL argument");
  return guarded([&] {
    const std::string text = pnpplo::format_config(config->value);
    *needed = text.size() + 1;
    if (buffer && capacity >= text.size() + 1) std::memcpy(buffer, text.c_str(), text.size() + 1);
  });
}

pnp_status pnp_degrade(const pnp_config* config, const char* measurement_path,
                       const char* truth_path) {
  PNP_REQUIRE(config && measurement_path, "NULL argument");
  return guarded([&] {
    const pnpplo::Signal image = config_image(config->value);
    const pnpplo::Degraded d = pnpplo::degrade(image, config->value);
    pnpplo::save_rawf32(measurement_path, d.y);
    if (truth_path) pnpplo::save_image(truth_path, image);
  });
}

pnp_status pnp_run_experiment(const pnp_config* config, pnp_report** out) {
  PNP_REQUIRE(config && out, "NULL argument");
  return guarded([&] { *out = new pnp_report{pnpplo::run_experiment(config->value)}; });
}

void pnp_report_destroy(pnp_report* report) { delete report; }

pnp_status pnp_report_summary(const pnp_report* report, pnp_summary* out) {
  PNP_REQUIRE(report && out, "NULL argument");
  fill_summary(report->value, out);
  return PNP_OK;
}

pnp_status pnp_report_write_summary(const pnp_report* report, const char* path) {
  PNP_REQUIRE(report && path, "NULL argument");
  return guarded([&] {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw pnpplo::IoError(std::string("cannot open '") + path + "' for writing");
    pnpplo::write_summary_header(out);
    pnpplo::write_summary_row(out, report->value.summary);
  });
}

pnp_status pnp_report_write_trace(const pnp_report* report, const char* path) {
  PNP_REQUIRE(report && path, "NULL argument");
  return guarded([&] { pnpplo::save_trace_csv(path, report->value.trace); });
}

pnp_status pnp_report_restored(const pnp_report* report, pnp_signal** out) {
  PNP_REQUIRE(report && out, "NULL argument");
  return guarded([&] { *out = new pnp_signal{report->value.restored}; });
}

pnp_status pnp_grid_run(const pnp_config* const* configs, size_t count, size_t workers,
                        pnp_grid** out) {
  PNP_REQUIRE(configs && out && count > 0, "grid needs at least one config");
  return guarded([&] {
    std::vector<pnpplo::ExperimentConfig> list;
    for (size_t i = 0; i < count; ++i) {
      if (!configs[i]) throw pnpplo::InvalidArgument("NULL config in grid");
      list.push_back(configs[i]->value);
    }
    *out = new pnp_grid{pnpplo::grid_search(list, workers)};
  });
}

void pnp_grid_destroy(pnp_grid* grid) { delete grid; }

size_t pnp_grid_size(const pnp_grid* grid) { return grid ? grid->value.entries.size() : 0; }

size_t pnp_grid_failures(const pnp_grid* grid) {
  if (!grid) return 0;
  size_t n = 0;
  for (const auto& e : grid->value.entries) n += e.report ? 0 : 1;
  return n;
}

const char* pnp_grid_entry_error(const pnp_grid* grid, size_t index) {
  if (!grid || index >= grid->value.entries.size()) return "";
  return grid->value.entries[index].error.c_str();
}

pnp_status pnp_grid_write_table(const pnp_grid* grid, const char* path) {
  PNP_REQUIRE(grid && path, "NULL argument");
  return guarded([&] {
    if (std::strcmp(path, "-") == 0) {
      pnpplo::write_grid_table(std::cout, grid->value);
      std::cout.flush();
      return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw pnpplo::IoError(std::string("cannot open '") + path + "' for writing");
    pnpplo::write_grid_table(out, grid->value);
  });
}

pnp_status pnp_grid_entry_summary(const pnp_grid* grid, size_t index, pnp_summary* out) {
  PNP_REQUIRE(grid && out && index < grid->value.entries.size(), "bad grid index");
  const auto& entry = grid->value.entries[index];
  if (!entry.report) return fail(PNP_ERR_NUMERICAL, entry.error.c_str());
  fill_summary(*entry.report, out);
  return PNP_OK;
}

pnp_status pnp_estimate_alpha(const pnp_config* config, size_t samples, size_t per_sample,
                              double sample_scale, uint64_t seed, pnp_alpha_result* out) {
  PNP_REQUIRE(config && out && samples > 0 && per_sample > 0, "bad estimate_alpha arguments");
  return guarded([&] {
    const pnpplo::Shape shape = config_image(config->value).shape();
    const pnpplo::Denoiser t = pnpplo::build_denoiser(config->value, shape);
    if (!t.oracle().known()) {
      throw pnpplo::InvalidArgument("denoiser '" + t.name() + "' has no fixed-point oracle");
    }
    std::vector<pnpplo::Signal> xs;
    for (size_t i = 0; i < samples; ++i) {
      pnpplo::Signal x = pnpplo::random_signal(shape, pnpplo::DomainTag::real, seed + i);
      x *= sample_scale;
      xs.push_back(std::move(x));
    }
    pnpplo::AlphaOptions options;
    options.count = per_sample;
    options.seed = seed ^ 0x5eed;
    const auto est = pnpplo::estimate_alpha(t, xs, t.oracle(), options);
    out->alpha = est.alpha;
    out->pairs_used = est.pairs_used;
    out->skipped = est.skipped;
    out->identity_on_samples = est.identity_on_samples ? 1 : 0;
    out->has_advertised = t.alpha() ? 1 : 0;
    out->advertised = nan_or(t.alpha());
  });
}

pnp_status pnp_check_adjoint(const pnp_config* config, int trials, double tolerance, uint64_t seed,
                             pnp_adjoint_result* out) {
  PNP_REQUIRE(config && out && trials > 0, "bad check_adjoint arguments");
  return guarded([&] {
    const pnpplo::Shape shape = config_image(config->value).shape();
    const pnpplo::LinearOperator a = pnpplo::build_operator(config->value, shape);
    const auto report = pnpplo::adjoint_check(a, trials, tolerance, seed);
    const auto norm = pnpplo::op_norm_estimate(a, 1e-10, 5000, seed ^ 0x9e37);
    out->passed = report.passed ? 1 : 0;
    out->worst_violation = report.worst_violation;
    out->trials = report.trials;
    out->norm_estimate = norm.value;
    out->has_norm_bound = a.norm_bound() ? 1 : 0;
    out->norm_bound = nan_or(a.norm_bound());
  });
}

pnp_status pnp_serve_mock_denoiser(const char* mode, int in_fd, int out_fd) {
  PNP_REQUIRE(mode, "mode is NULL");
  return guarded([&] {
    const int code = pnpplo::serve_mock_denoiser(pnpplo::parse_mock_mode(mode), in_fd, out_fd);
    if (code == 3) throw pnpplo::TransportError("mock peer crashed on request");
    if (code != 0) throw pnpplo::TransportError("mock peer received a bad frame");
  });
}

}  // extern "C"
