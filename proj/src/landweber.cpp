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

#include "pnpplo/landweber.hpp"

#include <cmath>
#include <string>

#include "pnpplo/error.hpp"

namespace pnpplo {

namespace {

// Residual nonzero but A* r vanishing relative to ||A|| ||r||.
bool stalled(const LinearOperator& a, const LandweberState& s) {
  if (s.back_norm == 0.0) return true;
  if (const auto bound = a.norm_bound()) return s.back_norm < 1e-14 * *bound * s.residual_norm;
  return false;
}

}  // namespace

LandweberState landweber_state(const LinearOperator& a, const ConvexSet& q, const Signal& x) {
  LandweberState s;
  s.ax = a.apply(x);
  s.projected = q.project(s.ax);
  s.inside = q.contains(s.ax);
  s.residual = s.projected - s.ax;
  s.residual_norm = norm2(s.residual);
  s.back = a.adjoint(s.residual);
  s.back_norm = norm2(s.back);
  return s;
}

double fidelity(const LinearOperator& a, const ConvexSet& q, const Signal& x) {
  const Signal ax = a.apply(x);
  const double d = norm2(ax - q.project(ax));
  return 0.5 * d * d;
}

Signal grad_fidelity(const LinearOperator& a, const ConvexSet& q, const Signal& x) {
  const Signal ax = a.apply(x);
  return a.adjoint(ax - q.project(ax));
}

Signal landweber_apply(const LinearOperator& a, const ConvexSet& q, const Signal& x,
                       double norm_sq) {
  if (!(norm_sq > 0.0)) throw InvalidArgument("landweber_apply: norm_sq must be positive");
  const Signal ax = a.apply(x);
  Signal out = x;
  out.axpy(1.0 / norm_sq, a.adjoint(q.project(ax) - ax));
  return out;
}

StepValue tau(const LinearOperator& a, const LandweberState& s) {
  if (s.inside || s.residual_norm == 0.0) return {1.0, false};
  if (stalled(a, s)) return {0.0, true};
  const double ratio = s.residual_norm / s.back_norm;
  return {a.norm_sq() * ratio * ratio, false};
}

StepValue tau(const LinearOperator& a, const ConvexSet& q, const Signal& x) {
  return tau(a, landweber_state(a, q, x));
}

StepValue landweber_mu(const LinearOperator& a, const LandweberState& s) {
  if (s.inside || s.residual_norm == 0.0) return {1.0, false};
  if (stalled(a, s)) return {0.0, true};
  const double ratio = s.residual_norm / s.back_norm;
  return {ratio * ratio, false};
}

Signal extrapolated_landweber_apply(const LinearOperator& a, const ConvexSet& q,
                                    const Signal& x, double delta) {
  const LandweberState s = landweber_state(a, q, x);
  const StepValue t = tau(a, s);
  if (t.stalled) throw NumericalError("extrapolated_landweber_apply: stalled step");
  if (!(delta >= 1.0 - 1e-12 && delta <= t.value + 1e-12)) {
    throw InvalidArgument("extrapolated_landweber_apply: delta " + std::to_string(delta) +
                          " outside [1, tau] = [1, " + std::to_string(t.value) + "]");
  }
  Signal out = x;
  out.axpy(delta / a.norm_sq(), s.back);
  return out;
}

Signal extrapolated_landweber_tau(const LinearOperator& a, const ConvexSet& q, const Signal& x) {
  const LandweberState s = landweber_state(a, q, x);
  if (s.inside) return x;
  const StepValue mu = landweber_mu(a, s);
  if (mu.stalled) throw NumericalError("extrapolated_landweber_tau: stalled step");
  Signal out = x;
  out.axpy(mu.value, s.back);
  return out;
}

StepValue polyak_step(const LinearOperator& a, const LandweberState& s) {
  if (s.inside || s.residual_norm == 0.0) return {1.0, false};
  if (stalled(a, s)) return {0.0, true};
  const double f = 0.5 * s.residual_norm * s.residual_norm;
  return {f / (s.back_norm * s.back_norm), false};
}

StepValue polyak_step(const LinearOperator& a, const ConvexSet& q, const Signal& x) {
  return polyak_step(a, landweber_state(a, q, x));
}

}  // namespace pnpplo
