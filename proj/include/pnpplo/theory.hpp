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
#include <memory>
#include <optional>
#include <vector>

#include "pnpplo/solvers.hpp"

namespace pnpplo {

/// Exact metric projection onto F = Fix(T) ∩ A^{-1}(Q) for built-in
/// denoisers (linear fixed-point sets) and Q an l2 ball or singleton.
///
/// With B an orthonormal basis of Fix(T) and M = A B materialized densely, the
/// projection of x is B c* where c* minimizes ||c - B^T x|| subject to
/// ||M c - y|| <= r. In SVD coordinates of M the KKT system is diagonal and the
/// multiplier solves a monotone scalar equation, found by bisection.
class SolutionSetProjector {
 public:
  /// `use_fixed_point_set = false` projects onto A^{-1}(Q) alone.
  explicit SolutionSetProjector(const SCFPProblem& problem, bool use_fixed_point_set = true);
  ~SolutionSetProjector();
  SolutionSetProjector(SolutionSetProjector&&) noexcept;
  SolutionSetProjector& operator=(SolutionSetProjector&&) noexcept;

  /// False when the constraint set is empty (the residual of y against the
  /// range of M exceeds r).
  bool feasible() const;
  /// Throws NumericalError when the set is empty.
  Signal project(const Signal& x) const;
  double distance(const Signal& x) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Alternating exact projections between Fix(T) and A^{-1}(Q) until
/// successive iterates move less than tol * 1e-2, then certification that
/// ||T(x) - x|| <= tol and dist(Ax, Q) <= tol. Throws NumericalError
/// ("declared infeasible") when no certified point is found.
Signal oracle_feasible_point(const SCFPProblem& problem, double tol,
                             int max_iter = 200000);

/// c = min{1, (1 - alpha - w) / w} / 2.
double fejer_constant(double alpha, double w);

struct FejerReport {
  bool passed = true;
  /// Smallest margin ||x^k - x*||^2 - c ||x^{k+1} - x^k||^2 - ||x^{k+1} - x*||^2.
  double worst_margin = 0.0;
  std::size_t violations = 0;
  std::size_t steps = 0;
};

/// Checks the quantified Fejer inequality at every consecutive pair, slack
/// -1e-9 (1 + ||x^0 - x*||^2).
FejerReport check_fejer(const std::vector<Signal>& iterates, const Signal& reference, double c);

struct RateBoundsReport {
  bool passed = true;
  /// Partial-sum form: (k+1) c min_{i<=k} ||x^{i+1} - x^i||^2 <= ||x^0 - x*||^2.
  std::size_t partial_sum_violations = 0;
  /// Summability: c sum_i ||x^{i+1} - x^i||^2 <= ||x^0 - x*||^2.
  bool summable = true;
  /// Polyak bound f_best^k <= L_f d(x^0, X*) / sqrt(k + 1), when requested.
  std::size_t polyak_violations = 0;
  double lipschitz_estimate = 0.0;
  double worst_partial_margin = 0.0;
  double worst_polyak_margin = 0.0;
};

/// The o(1/k) partial-sum inequality and summability over the trace's
/// residuals. When `distance_to_solutions` is given, also the Polyak objective
/// bound with L_f the largest gradient norm seen along the trace.
RateBoundsReport check_rate_bounds(const SolveTrace& trace, double initial_distance_sq, double c,
                                   std::optional<double> distance_to_solutions = std::nullopt);

/// Least-squares fit of log d_k against k over a tail window. The constants of
/// the linear-regularity argument (kappa_1, kappa_2, Delta, Gamma and the
/// theoretical q) are existence results and are not computed; q_hat is the
/// empirical contraction factor.
struct RateReport {
  double q_hat = 1.0;
  /// Root-mean-square deviation of log d_k from the fitted line.
  double fit_residual = 0.0;
  std::size_t window_begin = 0;
  std::size_t window_end = 0;
  /// Distances did not decrease over the window (q_hat >= 1).
  bool stalled = false;
};

struct RateFitOptions {
  /// Fraction of the usable sequence, counted from its end, used for the fit.
  double tail_fraction = 0.5;
  /// Distances below this truncate the usable sequence.
  double floor = 1e-14;
  std::size_t min_points = 3;
};

RateReport fit_linear_rate(const std::vector<double>& distances, const RateFitOptions& options = {});

}  // namespace pnpplo
