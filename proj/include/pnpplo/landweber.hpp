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

#include "pnpplo/operators.hpp"
#include "pnpplo/projections.hpp"
#include "pnpplo/signal.hpp"

namespace pnpplo {

/// Everything the Landweber family needs at one point x, computed once:
/// Ax, its projection onto Q, the residual r = P_Q(Ax) - Ax and A* r.
struct LandweberState {
  Signal ax;
  Signal projected;
  Signal residual;
  Signal back;  // A* r, i.e. minus the fidelity gradient
  double residual_norm = 0.0;
  double back_norm = 0.0;
  bool inside = false;  // Ax in Q up to the set's membership tolerance
};

LandweberState landweber_state(const LinearOperator& a, const ConvexSet& q, const Signal& x);

/// 0.5 ||Ax - P_Q(Ax)||^2.
double fidelity(const LinearOperator& a, const ConvexSet& q, const Signal& x);
/// A*(Ax - P_Q(Ax)).
Signal grad_fidelity(const LinearOperator& a, const ConvexSet& q, const Signal& x);

/// x + (1 / norm_sq) A*(P_Q(Ax) - Ax); norm_sq must bound ||A||^2 from above.
Signal landweber_apply(const LinearOperator& a, const ConvexSet& q, const Signal& x,
                       double norm_sq);

/// A step-size value, or the marker that the residual is (numerically)
/// orthogonal to the range of A so no finite step exists.
struct StepValue {
  double value = 1.0;
  bool stalled = false;
};

/// (||A|| ||r|| / ||A* r||)^2 outside Q, 1 inside. Uses A.norm_sq().
StepValue tau(const LinearOperator& a, const ConvexSet& q, const Signal& x);
StepValue tau(const LinearOperator& a, const LandweberState& state);

/// ||r||^2 / ||A* r||^2 outside Q (1 inside): the step multiplying A* r in the
/// tau-extrapolated operator. Does not touch the operator norm.
StepValue landweber_mu(const LinearOperator& a, const LandweberState& state);

/// x + delta (L x - x) with L evaluated through A.norm_sq(). Requires
/// 1 - 1e-12 <= delta <= tau(x) + 1e-12.
Signal extrapolated_landweber_apply(const LinearOperator& a, const ConvexSet& q,
                                    const Signal& x, double delta);

/// The tau-extrapolated operator evaluated norm-free as x + mu(x) A* r.
/// Returns x when Ax is in Q. Throws NumericalError on a stall.
Signal extrapolated_landweber_tau(const LinearOperator& a, const ConvexSet& q, const Signal& x);

/// Polyak step f(x) / ||grad f(x)||^2 (optimal value 0) outside Q, 1 inside.
StepValue polyak_step(const LinearOperator& a, const ConvexSet& q, const Signal& x);
StepValue polyak_step(const LinearOperator& a, const LandweberState& state);

}  // namespace pnpplo
