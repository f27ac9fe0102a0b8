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

#include "pnpplo/solvers.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>

#include "pnpplo/error.hpp"
#include "pnpplo/landweber.hpp"

namespace pnpplo {

const char* to_string(StepKind kind) {
  switch (kind) {
    case StepKind::tau_extrapolated: return "tau";
    case StepKind::polyak: return "polyak";
    case StepKind::constant: return "constant";
    case StepKind::diminishing: return "diminishing";
  }
  return "unknown";
}

StepKind parse_step_kind(const std::string& text) {
  if (text == "tau" || text == "tau_extrapolated") return StepKind::tau_extrapolated;
  if (text == "polyak") return StepKind::polyak;
  if (text == "constant") return StepKind::constant;
  if (text == "diminishing") return StepKind::diminishing;
  throw InvalidArgument("unknown step rule '" + text + "'");
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iters: return "max-iters";
    case SolveStatus::infeasible_direction: return "infeasible-direction";
  }
  return "unknown";
}

double StepRule::at(std::size_t k) const {
  switch (kind) {
    case StepKind::constant: return value;
    case StepKind::diminishing:
      return mu0 * std::pow(static_cast<double>(std::max<std::size_t>(k, 1)), -exponent);
    default:
      throw InvalidArgument(std::string("step rule '") + to_string(kind) + "' has no schedule");
  }
}

double LambdaSchedule::at(std::size_t k) const {
  if (exponent == 0.0) return lambda0;
  return lambda0 * std::pow(static_cast<double>(std::max<std::size_t>(k, 1)), -exponent);
}

Signal apply_relaxed(const Denoiser& t, double w, const Signal& v) {
  Signal out = t.denoise(v);
  if (w != 1.0) {
    out *= w;
    out.axpy(1.0 - w, v);
  }
  return out;
}

double resolve_weight(const Denoiser& t, const SolveConfig& config) {
  const auto alpha = t.alpha();
  if (!config.w) {
    if (!alpha) {
      throw InvalidArgument(t.name() +
                            " advertises no demicontraction constant; set w explicitly");
    }
    const double upper = 1.0 - *alpha;
    return upper > 1.0 ? 1.0 : 0.5 * upper;
  }
  const double w = *config.w;
  if (!(w > 0.0)) throw InvalidArgument("denoiser weight w must be positive");
  if (alpha && !(w < 1.0 - *alpha) && !config.allow_unsafe) {
    throw InvalidArgument("w = " + std::to_string(w) + " outside the admissible interval (0, " +
                          std::to_string(1.0 - *alpha) + "); enable allow_unsafe to run anyway");
  }
  return w;
}

namespace {

using Clock = std::chrono::steady_clock;

std::optional<double> trace_psnr(const SCFPProblem& p, const Signal& x, double peak) {
  if (!p.ground_truth) return std::nullopt;
  const Signal& gt = *p.ground_truth;
  if (gt.shape() == x.shape()) return psnr(gt, x, peak);
  if (x.is_complex() && !gt.is_complex()) {
    const Signal mag = magnitude(x);
    if (mag.shape() == gt.shape()) return psnr(gt, mag, peak);
  }
  return std::nullopt;
}

double data_misfit(const ConvexSet& q, const Signal& ax) {
  if (q.kind() == SetKind::l2_ball || q.kind() == SetKind::singleton ||
      q.kind() == SetKind::l1_ball) {
    const double d = norm2(ax - q.center());
    return 0.5 * d * d;
  }
  const double d = q.distance(ax);
  return 0.5 * d * d;
}

/// Result of one iteration: the next iterate, the scalar step used, and
/// T(x^k) if the update happened to compute it.
struct Advance {
  Signal next;
  double step = 0.0;
  std::optional<Signal> tx;
  bool stalled = false;
};

using StepFn = std::function<Advance(const Signal& x, const LandweberState& s, std::size_t k)>;

SolveResult run(const std::string& name, const SCFPProblem& p, const SolveConfig& config,
                const Signal& x0, const StepFn& advance) {
  if (config.max_iters < 1) throw InvalidArgument(name + ": max_iters must be >= 1");
  if (config.trace_every < 1) throw InvalidArgument(name + ": trace_every must be >= 1");
  if (x0.shape() != p.a.in_shape()) {
    throw ShapeMismatch(name + ": x0 shape " + to_string(x0.shape()) + " vs operator input " +
                        to_string(p.a.in_shape()));
  }
  SolveResult result{x0, {}};
  SolveTrace& trace = result.trace;
  trace.solver = name;
  const auto start = Clock::now();
  const double stop_scale = std::max(norm2(x0), 1e-300);
  Signal x = x0;
  if (config.keep_iterates) trace.iterates.push_back(x);

  for (int k = 0; k < config.max_iters; ++k) {
    const LandweberState s = landweber_state(p.a, p.q, x);
    Advance adv = advance(x, s, static_cast<std::size_t>(k));
    if (adv.stalled) {
      trace.status = SolveStatus::infeasible_direction;
      break;
    }
    const double residual = distance(adv.next, x);
    if (k % config.trace_every == 0) {
      TraceRow row;
      row.k = k;
      row.f = 0.5 * s.residual_norm * s.residual_norm;
      row.data_fidelity = data_misfit(p.q, s.ax);
      row.residual = residual;
      row.step = adv.step;
      row.dist_q = s.residual_norm;
      row.grad_norm = s.back_norm;
      if (config.trace_denoiser_residual) {
        row.denoiser_residual = adv.tx ? distance(*adv.tx, x) : distance(p.t.denoise(x), x);
      }
      row.psnr = trace_psnr(p, x, config.peak);
      if (config.record_time) {
        row.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
      }
      trace.rows.push_back(row);
    }
    x = std::move(adv.next);
    ++trace.iterations;
    if (config.keep_iterates) trace.iterates.push_back(x);
    if (config.stop_tol > 0.0 && residual < config.stop_tol * stop_scale) {
      trace.status = SolveStatus::converged;
      break;
    }
  }
  result.x = std::move(x);
  return result;
}

void check_lambda(double lambda, const SolveConfig& config, SolveTrace* trace) {
  if (lambda >= config.relax_floor && lambda <= 1.0) return;
  if (!config.allow_unsafe) {
    throw InvalidArgument("relaxation lambda_k = " + std::to_string(lambda) + " outside [" +
                          std::to_string(config.relax_floor) +
                          ", 1]; enable allow_unsafe to run anyway");
  }
  if (trace) trace->theory_applies = false;
}

}  // namespace

SolveResult pnp_plo(const SCFPProblem& p, const SolveConfig& config, const Signal& x0) {
  const double w = resolve_weight(p.t, config);
  const auto alpha = p.t.alpha();
  bool theory = alpha && w < 1.0 - *alpha;
  if (!(config.relax_floor > 0.0 && config.relax_floor < 1.0)) {
    throw InvalidArgument("pnp_plo: relax_floor must lie in (0, 1)");
  }
  if (config.step.kind == StepKind::diminishing) {
    throw InvalidArgument("pnp_plo: the diminishing rule applies to RED-PRO; use lambda");
  }
  if (config.step.kind == StepKind::constant && !(config.step.value >= 1.0)) {
    throw InvalidArgument("pnp_plo: constant extrapolation delta must be >= 1");
  }
  SolveTrace lambda_trace;
  const auto advance = [&](const Signal& x, const LandweberState& s, std::size_t k) {
    Advance adv;
    double coeff = 0.0;  // v = x + coeff * A* r
    switch (config.step.kind) {
      case StepKind::tau_extrapolated: {
        const double lambda = config.lambda.at(k + 1);
        check_lambda(lambda, config, &lambda_trace);
        if (!s.inside) {
          const StepValue mu = landweber_mu(p.a, s);
          if (mu.stalled) {
            adv.stalled = true;
            return adv;
          }
          coeff = lambda * mu.value;
        }
        break;
      }
      case StepKind::polyak: {
        // tau replaced by 2 ||A||^2 t_k and lambda_k = 1/2 collapses to the
        // plain Polyak step v = x - t_k grad f(x).
        if (!s.inside) {
          const StepValue t = polyak_step(p.a, s);
          if (t.stalled) {
            adv.stalled = true;
            return adv;
          }
          coeff = t.value;
        }
        break;
      }
      case StepKind::constant: {
        const double lambda = config.lambda.at(k + 1);
        check_lambda(lambda, config, &lambda_trace);
        if (!s.inside || s.residual_norm > 0.0) {
          const StepValue t = tau(p.a, s);
          if (t.stalled) {
            adv.stalled = true;
            return adv;
          }
          if (config.step.value > t.value + 1e-12) {
            if (!config.allow_unsafe) {
              throw InvalidArgument("pnp_plo: constant delta exceeds tau(x) = " +
                                    std::to_string(t.value));
            }
            lambda_trace.theory_applies = false;
          }
          coeff = lambda * config.step.value / p.a.norm_sq();
        }
        break;
      }
      case StepKind::diminishing:
        break;
    }
    Signal v = x;
    if (coeff != 0.0) v.axpy(coeff, s.back);
    adv.next = apply_relaxed(p.t, w, v);
    adv.step = coeff;
    return adv;
  };
  SolveResult r = run("pnp_plo", p, config, x0, advance);
  r.trace.w = w;
  r.trace.alpha = alpha;
  r.trace.theory_applies = theory && lambda_trace.theory_applies;
  return r;
}

SolveResult red_sd(const SCFPProblem& p, double mu, double lambda_reg, const SolveConfig& config,
                   const Signal& x0) {
  if (!(mu >= 0.0)) throw InvalidArgument("red_sd: mu must be >= 0");
  if (!(lambda_reg >= 0.0)) throw InvalidArgument("red_sd: lambda must be >= 0");
  const auto advance = [&](const Signal& x, const LandweberState& s, std::size_t) {
    Advance adv;
    Signal tx = p.t.denoise(x);
    // grad f = -A* r, so x - mu (grad f + lambda (x - Tx)).
    Signal next = x;
    next.axpy(mu, s.back);
    next.axpy(-mu * lambda_reg, x - tx);
    adv.next = std::move(next);
    adv.step = mu;
    adv.tx = std::move(tx);
    return adv;
  };
  SolveResult r = run("red_sd", p, config, x0, advance);
  r.trace.alpha = p.t.alpha();
  r.trace.theory_applies = false;
  return r;
}

SolveResult red_pro(const SCFPProblem& p, const StepRule& mu_schedule, double w,
                    const SolveConfig& config, const Signal& x0) {
  if (mu_schedule.kind != StepKind::constant && mu_schedule.kind != StepKind::diminishing) {
    throw InvalidArgument("red_pro: mu schedule must be constant or diminishing");
  }
  if (!(w > 0.0)) throw InvalidArgument("red_pro: w must be positive");
  const auto alpha = p.t.alpha();
  const bool admissible = alpha && w < 0.5 * (1.0 - *alpha);
  if (alpha && !admissible && !config.allow_unsafe) {
    throw InvalidArgument("red_pro: w = " + std::to_string(w) +
                          " outside the admissible interval (0, " +
                          std::to_string(0.5 * (1.0 - *alpha)) + ")");
  }
  const auto advance = [&](const Signal& x, const LandweberState& s, std::size_t k) {
    Advance adv;
    const double mu = mu_schedule.at(k + 1);
    Signal v = x;
    v.axpy(mu, s.back);
    adv.next = apply_relaxed(p.t, w, v);
    adv.step = mu;
    return adv;
  };
  SolveResult r = run("red_pro", p, config, x0, advance);
  r.trace.w = w;
  r.trace.alpha = alpha;
  r.trace.theory_applies = admissible;
  return r;
}

SolveResult pnp_fbs(const SCFPProblem& p, double s_step, const SolveConfig& config,
                    const Signal& x0) {
  if (!(s_step >= 0.0)) throw InvalidArgument("pnp_fbs: s must be >= 0");
  const auto advance = [&](const Signal& x, const LandweberState& s, std::size_t) {
    Advance adv;
    Signal v = x;
    v.axpy(s_step, s.back);
    adv.next = apply_relaxed(p.t, 1.0, v);
    adv.step = s_step;
    return adv;
  };
  SolveResult r = run("pnp_fbs", p, config, x0, advance);
  r.trace.alpha = p.t.alpha();
  r.trace.theory_applies = false;
  return r;
}

}  // namespace pnpplo
