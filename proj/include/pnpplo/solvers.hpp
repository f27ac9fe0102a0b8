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
#include <optional>
#include <string>
#include <vector>

#include "pnpplo/denoisers.hpp"
#include "pnpplo/operators.hpp"
#include "pnpplo/projections.hpp"
#include "pnpplo/signal.hpp"

namespace pnpplo {

enum class StepKind { tau_extrapolated, polyak, constant, diminishing };

const char* to_string(StepKind kind);
StepKind parse_step_kind(const std::string& text);

/// Extrapolation rule for PnP-PLO, or the mu schedule of RED-PRO.
///
/// constant(v): delta = v for PnP-PLO, mu = v for RED-PRO.
/// diminishing(mu0, p): mu_k = mu0 * k^-p for k = 1, 2, ... (RED-PRO only).
struct StepRule {
  StepKind kind = StepKind::tau_extrapolated;
  double value = 1.0;
  double mu0 = 1.0;
  double exponent = 0.1;

  static StepRule tau() { return {StepKind::tau_extrapolated}; }
  static StepRule polyak() { return {StepKind::polyak}; }
  static StepRule constant(double v) { return {StepKind::constant, v}; }
  static StepRule diminishing(double mu0, double exponent) {
    return {StepKind::diminishing, 1.0, mu0, exponent};
  }

  /// Schedule value at 1-based iteration k (constant or diminishing kinds).
  double at(std::size_t k) const;
};

/// Relaxation parameters lambda_k, constant or lambda0 * k^-exponent with
/// 1-based k.
struct LambdaSchedule {
  double lambda0 = 1.0;
  double exponent = 0.0;

  static LambdaSchedule constant(double lambda) { return {lambda, 0.0}; }
  static LambdaSchedule diminishing(double lambda0, double exponent) {
    return {lambda0, exponent};
  }
  double at(std::size_t k) const;
};

struct SCFPProblem {
  LinearOperator a;
  ConvexSet q;
  Denoiser t;
  std::optional<Signal> ground_truth;
};

struct SolveConfig {
  int max_iters = 1000;
  LambdaSchedule lambda = LambdaSchedule::constant(1.0);
  /// Lower bound on lambda_k.
  double relax_floor = 1e-3;
  /// Denoiser weight; when unset the solver picks 1 if admissible, else the
  /// middle of (0, 1 - alpha). Required for denoisers without alpha.
  std::optional<double> w;
  StepRule step = StepRule::tau();
  /// Stop once ||x^{k+1} - x^k|| < stop_tol * max(||x^0||, 1e-300); zero
  /// disables early stopping.
  double stop_tol = 1e-9;
  int trace_every = 1;
  /// Runs outside the proven parameter ranges (w, lambda_k) instead of
  /// rejecting them. Marks the trace as not covered by the convergence theory.
  bool allow_unsafe = false;
  bool keep_iterates = false;
  /// Compute ||T(x^k) - x^k|| for each recorded row (one extra denoiser call).
  bool trace_denoiser_residual = true;
  bool record_time = false;
  double peak = 255.0;
};

/// One recorded iterate. `step` is the scalar s in x + s A*(P_Q(Ax) - Ax)
/// (or in x - s grad f for the gradient baselines).
struct TraceRow {
  int k = 0;
  double f = 0.0;
  /// 0.5 ||Ax - c||^2 where c is the centre of Q (data misfit).
  double data_fidelity = 0.0;
  double residual = 0.0;
  double step = 0.0;
  double dist_q = 0.0;
  double grad_norm = 0.0;
  std::optional<double> denoiser_residual;
  std::optional<double> psnr;
  std::optional<double> wall_ms;
};

enum class SolveStatus { converged, max_iters, infeasible_direction };

const char* to_string(SolveStatus status);

struct SolveTrace {
  std::string solver;
  std::vector<TraceRow> rows;
  /// x^0, x^1, ... when SolveConfig::keep_iterates is set.
  std::vector<Signal> iterates;
  SolveStatus status = SolveStatus::max_iters;
  int iterations = 0;
  double w = 1.0;
  std::optional<double> alpha;
  /// False when the run used parameters outside the proven ranges.
  bool theory_applies = true;
};

struct SolveResult {
  Signal x;
  SolveTrace trace;
};

/// PnP with projected (extrapolated) Landweber operator:
///   v^k = (1 - lambda_k) x^k + lambda_k L_delta x^k,
///   x^{k+1} = w T(v^k) + (1 - w) v^k.
/// step = polyak forces lambda_k = 1/2 and delta = 2 ||A||^2 t_k.
SolveResult pnp_plo(const SCFPProblem& problem, const SolveConfig& config, const Signal& x0);

/// x^{k+1} = x^k - mu (grad f(x^k) + lambda (x^k - T(x^k))).
SolveResult red_sd(const SCFPProblem& problem, double mu, double lambda_reg,
                   const SolveConfig& config, const Signal& x0);

/// x^{k+1} = T_w(x^k - mu_k grad f(x^k)).
SolveResult red_pro(const SCFPProblem& problem, const StepRule& mu_schedule, double w,
                    const SolveConfig& config, const Signal& x0);

/// x^{k+1} = T(x^k - s grad f(x^k)).
SolveResult pnp_fbs(const SCFPProblem& problem, double s, const SolveConfig& config,
                    const Signal& x0);

/// w T(v) + (1 - w) v, the relaxed denoiser step shared by every solver.
Signal apply_relaxed(const Denoiser& t, double w, const Signal& v);

/// Resolves the denoiser weight for a config (see SolveConfig::w); throws
/// InvalidArgument when it is inadmissible and allow_unsafe is off.
double resolve_weight(const Denoiser& t, const SolveConfig& config);

}  // namespace pnpplo
