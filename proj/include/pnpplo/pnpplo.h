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

/* C interface to the pnpplo library. All objects are opaque handles owned by
 * the caller and released with the matching *_destroy function. Every call
 * returns a pnp_status; on failure pnp_last_error() describes the cause for
 * the calling thread. */
#ifndef PNPPLO_PNPPLO_H
#define PNPPLO_PNPPLO_H

#include <stddef.h>
#include <stdint.h>

#if defined(PNPPLO_BUILDING_LIBRARY)
#define PNP_API __attribute__((visibility("default")))
#else
#define PNP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pnp_status {
  PNP_OK = 0,
  PNP_ERR_INVALID_ARGUMENT = 1,
  PNP_ERR_SHAPE = 2,
  PNP_ERR_NUMERICAL = 3,
  PNP_ERR_IO = 4,
  PNP_ERR_TRANSPORT = 5,
  PNP_ERR_INTERNAL = 6
} pnp_status;

typedef enum pnp_solve_status {
  PNP_SOLVE_CONVERGED = 0,
  PNP_SOLVE_MAX_ITERS = 1,
  PNP_SOLVE_INFEASIBLE_DIRECTION = 2
} pnp_solve_status;

PNP_API const char* pnp_version(void);
PNP_API const char* pnp_status_string(pnp_status status);
/* Message of the last failed call on this thread ("" if none). */
PNP_API const char* pnp_last_error(void);

/* ---- signals ---------------------------------------------------------- */

typedef struct pnp_signal pnp_signal;

/* data may be NULL (zeros); otherwise rows*cols*channels doubles. */
PNP_API pnp_status pnp_signal_create(size_t rows, size_t cols, size_t channels, int is_complex,
                                     const double* data, pnp_signal** out);
PNP_API void pnp_signal_destroy(pnp_signal* signal);
PNP_API pnp_status pnp_signal_shape(const pnp_signal* signal, size_t* rows, size_t* cols,
                                    size_t* channels, int* is_complex);
PNP_API pnp_status pnp_signal_copy_data(const pnp_signal* signal, double* out, size_t capacity);
/* PGM for a ".pgm" extension, RAWF32 otherwise. */
PNP_API pnp_status pnp_signal_load(const char* path, pnp_signal** out);
PNP_API pnp_status pnp_signal_save(const char* path, const pnp_signal* signal);
PNP_API pnp_status pnp_psnr(const pnp_signal* reference, const pnp_signal* test, double peak,
                            double* out);

/* ---- experiment configuration ----------------------------------------- */

typedef struct pnp_config pnp_config;

PNP_API pnp_status pnp_config_create(pnp_config** out);
PNP_API pnp_status pnp_config_load(const char* path, pnp_config** out);
PNP_API pnp_status pnp_config_clone(const pnp_config* config, pnp_config** out);
PNP_API void pnp_config_destroy(pnp_config* config);
PNP_API pnp_status pnp_config_set(pnp_config* config, const char* key, const char* value);
/* Writes the key = value text form. When buffer is too small (or NULL) only
 * *needed is set, including the terminating NUL. */
PNP_API pnp_status pnp_config_format(const pnp_config* config, char* buffer, size_t capacity,
                                     size_t* needed);

/* ---- degradation ------------------------------------------------------ */

/* Builds the task's measurement from the configured image and writes it
 * (RAWF32) to measurement_path; truth_path, when not NULL, receives the
 * ground-truth image. */
PNP_API pnp_status pnp_degrade(const pnp_config* config, const char* measurement_path,
                               const char* truth_path);

/* ---- experiments ------------------------------------------------------ */

typedef struct pnp_report pnp_report;

typedef struct pnp_summary {
  int iters_run;
  int k_max;
  double w;
  double epsilon;
  double final_f;
  double final_psnr;   /* NaN when no ground truth */
  double input_psnr;   /* NaN when no ground truth */
  double sigma_eta;
  size_t n0;
  pnp_solve_status status;
  int theory_applies;
} pnp_summary;

/* Runs degrade -> solve -> metrics and writes the configured outputs. */
PNP_API pnp_status pnp_run_experiment(const pnp_config* config, pnp_report** out);
PNP_API void pnp_report_destroy(pnp_report* report);
PNP_API pnp_status pnp_report_summary(const pnp_report* report, pnp_summary* out);
/* Summary CSV header and row. */
PNP_API pnp_status pnp_report_write_summary(const pnp_report* report, const char* path);
PNP_API pnp_status pnp_report_write_trace(const pnp_report* report, const char* path);
PNP_API pnp_status pnp_report_restored(const pnp_report* report, pnp_signal** out);

typedef struct pnp_grid pnp_grid;

/* workers = 0 uses the hardware concurrency. */
PNP_API pnp_status pnp_grid_run(const pnp_config* const* configs, size_t count, size_t workers,
                                pnp_grid** out);
PNP_API void pnp_grid_destroy(pnp_grid* grid);
PNP_API size_t pnp_grid_size(const pnp_grid* grid);
PNP_API size_t pnp_grid_failures(const pnp_grid* grid);
/* "" for successful entries. The pointer lives as long as the grid. */
PNP_API const char* pnp_grid_entry_error(const pnp_grid* grid, size_t index);
/* Per-solver "solver,runs,failures,average_psnr,max_psnr" table; "-" is stdout. */
PNP_API pnp_status pnp_grid_write_table(const pnp_grid* grid, const char* path);
PNP_API pnp_status pnp_grid_entry_summary(const pnp_grid* grid, size_t index, pnp_summary* out);

/* ---- diagnostics ------------------------------------------------------ */

typedef struct pnp_alpha_result {
  double alpha;
  size_t pairs_used;
  size_t skipped;
  int identity_on_samples;
  int has_advertised;
  double advertised;
} pnp_alpha_result;

/* Demicontraction estimate for the configured built-in denoiser on its
 * image shape, from `samples` Gaussian inputs of standard deviation
 * sample_scale and `per_sample` oracle fixed points each. */
PNP_API pnp_status pnp_estimate_alpha(const pnp_config* config, size_t samples, size_t per_sample,
                                      double sample_scale, uint64_t seed, pnp_alpha_result* out);

typedef struct pnp_adjoint_result {
  int passed;
  double worst_violation;
  int trials;
  double norm_estimate;
  int has_norm_bound;
  double norm_bound;
} pnp_adjoint_result;

/* Adjoint identity check and power-iteration norm of the configured task
 * operator. */
PNP_API pnp_status pnp_check_adjoint(const pnp_config* config, int trials, double tolerance,
                                     uint64_t seed, pnp_adjoint_result* out);

/* Serves the DNZ1/DNR1 reference peer on the given descriptors until EOF.
 * mode: identity, scale_half, bad_magic, truncate, crash. */
PNP_API pnp_status pnp_serve_mock_denoiser(const char* mode, int in_fd, int out_fd);

#ifdef __cplusplus
}
#endif

#endif
