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

#include "pnpplo/theory.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "pnpplo/error.hpp"

namespace pnpplo {

struct SolutionSetProjector::Impl {
  OrthoBasis basis;
  Shape in_shape;
  DomainTag in_tag;
  Eigen::VectorXd sigma;     // positive singular values of M
  Eigen::MatrixXd v;         // right singular vectors (m x p)
  Eigen::VectorXd y_coeff;   // U^T y
  double floor_sq = 0.0;     // ||y - U U^T y||^2
  double radius = 0.0;
  bool feasible = true;

  Impl(const SCFPProblem& p, bool use_fix)
      : basis(use_fix ? p.t.oracle().basis() : OrthoBasis::canonical(p.a.in_shape())),
        in_shape(p.a.in_shape()),
        in_tag(p.a.in_tag()) {
    if (p.q.kind() != SetKind::l2_ball && p.q.kind() != SetKind::singleton) {
      throw InvalidArgument(std::string("solution-set oracle supports l2 balls and singletons, got ") +
                            to_string(p.q.kind()));
    }
    if (basis.shape() != in_shape) {
      throw ShapeMismatch("solution-set oracle: fixed-point basis shape " +
                          to_string(basis.shape()) + " differs from operator input " +
                          to_string(in_shape));
    }
    radius = p.q.radius();
    const Signal& center = p.q.center();
    const auto m = static_cast<Eigen::Index>(basis.rank());
    const auto rows = static_cast<Eigen::Index>(p.a.out_shape().size());
    Eigen::Map<const Eigen::VectorXd> y(center.data().data(), rows);
    if (m == 0) {
      floor_sq = y.squaredNorm();
      feasible = std::sqrt(floor_sq) <= radius + 1e-10 * (1.0 + y.norm());
      return;
    }
    Eigen::MatrixXd mat(rows, m);
    std::vector<double> unit(static_cast<std::size_t>(m), 0.0);
    for (Eigen::Index j = 0; j < m; ++j) {
      unit[static_cast<std::size_t>(j)] = 1.0;
      const Signal col = p.a.apply(basis.synthesize(unit).reshaped(in_shape, in_tag));
      unit[static_cast<std::size_t>(j)] = 0.0;
      for (Eigen::Index i = 0; i < rows; ++i) mat(i, j) = col[static_cast<std::size_t>(i)];
    }
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double cutoff = s.size() ? s(0) * 1e-12 : 0.0;
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > cutoff) ++rank;
    sigma = s.head(rank);
    v = svd.matrixV().leftCols(rank);
    const Eigen::MatrixXd u = svd.matrixU().leftCols(rank);
    y_coeff = u.transpose() * y;
    floor_sq = (y - u * y_coeff).squaredNorm();
    feasible = std::sqrt(floor_sq) <= radius + 1e-10 * (1.0 + y.norm());
  }

  Signal project(const Signal& x) const {
    if (!feasible) throw NumericalError("solution-set oracle: constraint set is empty");
    const std::vector<double> c0v = basis.analyze(x.reshaped(in_shape, DomainTag::real));
    const Eigen::Map<const Eigen::VectorXd> c0(c0v.data(), static_cast<Eigen::Index>(c0v.size()));
    if (c0v.empty()) return Signal(in_shape, in_tag);
    const Eigen::VectorXd cp = v.transpose() * c0;
    const Eigen::VectorXd e = sigma.cwiseProduct(cp) - y_coeff;
    const double r2 = radius * radius;
    const auto misfit = [&](double mu) {
      double g = floor_sq;
      for (Eigen::Index i = 0; i < e.size(); ++i) {
        const double t = e(i) / (1.0 + mu * sigma(i) * sigma(i));
        g += t * t;
      }
      return g;
    };
    Eigen::VectorXd cnew = cp;
    if (misfit(0.0) > r2) {
      const double slack = r2 - floor_sq;
      const double scale = 1.0 + y_coeff.squaredNorm() + floor_sq;
      if (slack <= 1e-24 * scale) {
        for (Eigen::Index i = 0; i < e.size(); ++i) cnew(i) = y_coeff(i) / sigma(i);
      } else {
        double lo = 0.0;
        double hi = 1.0 / (sigma(0) * sigma(0));
        while (misfit(hi) > r2 && hi < 1e300) {
          lo = hi;
          hi *= 2.0;
        }
        for (int it = 0; it < 400; ++it) {
          const double mid = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
          if (misfit(mid) > r2) lo = mid; else hi = mid;
          if (lo > 0.0 && hi / lo - 1.0 < 1e-15) break;
        }
        const double mu = hi;
        for (Eigen::Index i = 0; i < e.size(); ++i) {
          const double s2 = sigma(i) * sigma(i);
          cnew(i) = (cp(i) + mu * sigma(i) * y_coeff(i)) / (1.0 + mu * s2);
        }
      }
    }
    const Eigen::VectorXd c = c0 - v * cp + v * cnew;
    return basis.synthesize(std::span<const double>(c.data(), static_cast<std::size_t>(c.size())))
        .reshaped(in_shape, in_tag);
  }
};

SolutionSetProjector::SolutionSetProjector(const SCFPProblem& problem, bool use_fixed_point_set)
    : impl_(std::make_unique<Impl>(problem, use_fixed_point_set)) {}
SolutionSetProjector::~SolutionSetProjector() = default;
SolutionSetProjector::SolutionSetProjector(SolutionSetProjector&&) noexcept = default;
SolutionSetProjector& SolutionSetProjector::operator=(SolutionSetProjector&&) noexcept = default;

bool SolutionSetProjector::feasible() const { return impl_->feasible; }
Signal SolutionSetProjector::project(const Signal& x) const { return impl_->project(x); }
double SolutionSetProjector::distance(const Signal& x) const {
  return norm2(x - impl_->project(x));
}

Signal oracle_feasible_point(const SCFPProblem& p, double tol, int max_iter) {
  if (!(tol > 0.0)) throw InvalidArgument("oracle_feasible_point: tol must be positive");
  const FixedPointOracle& fix = p.t.oracle();
  if (!fix.known()) {
    throw InvalidArgument("oracle_feasible_point: denoiser exposes no fixed-point projector");
  }
  if (p.a.in_shape().size() > 10000) {
    throw InvalidArgument("oracle_feasible_point: dimension above 1e4");
  }
  const SolutionSetProjector preimage(p, false);
  if (!preimage.feasible()) {
    throw NumericalError("oracle_feasible_point: declared infeasible (A^-1(Q) is empty)");
  }
  const auto to_fix = [&](const Signal& x) {
    return fix.project(x.reshaped(fix.basis().shape(), DomainTag::real))
        .reshaped(p.a.in_shape(), p.a.in_tag());
  };
  Signal x = preimage.project(Signal(p.a.in_shape(), p.a.in_tag()));
  Signal z = to_fix(x);
  for (int it = 0; it < max_iter; ++it) {
    Signal next = preimage.project(z);
    const double move = distance(next, x);
    x = std::move(next);
    z = to_fix(x);
    if (move < tol * 1e-2) break;
  }
  const auto certified = [&](const Signal& c) {
    const Signal ac = p.a.apply(c);
    return distance(p.t.denoise(c), c) <= tol && p.q.distance(ac) <= tol;
  };
  if (certified(z)) return z;
  if (certified(x)) return x;
  throw NumericalError("oracle_feasible_point: declared infeasible after alternating projections");
}

double fejer_constant(double alpha, double w) {
  return 0.5 * std::min(1.0, (1.0 - alpha - w) / w);
}

FejerReport check_fejer(const std::vector<Signal>& iterates, const Signal& reference, double c) {
  FejerReport report;
  if (iterates.empty()) return report;
  const double d0 = distance(iterates.front(), reference);
  const double slack = -1e-9 * (1.0 + d0 * d0);
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < iterates.size(); ++k) {
    const double before = distance(iterates[k], reference);
    const double after = distance(iterates[k + 1], reference);
    const double step = distance(iterates[k + 1], iterates[k]);
    const double margin = before * before - c * step * step - after * after;
    report.worst_margin = std::min(report.worst_margin, margin);
    if (margin < slack) ++report.violations;
    ++report.steps;
  }
  if (report.steps == 0) report.worst_margin = 0.0;
  report.passed = report.violations == 0;
  return report;
}

RateBoundsReport check_rate_bounds(const SolveTrace& trace, double initial_distance_sq, double c,
                                   std::optional<double> distance_to_solutions) {
  RateBoundsReport report;
  const double slack = 1e-9 * (1.0 + initial_distance_sq);
  double running_min = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  report.worst_partial_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < trace.rows.size(); ++k) {
    const double r2 = trace.rows[k].residual * trace.rows[k].residual;
    running_min = std::min(running_min, r2);
    sum += r2;
    const double margin =
        initial_distance_sq - static_cast<double>(k + 1) * c * running_min;
    report.worst_partial_margin = std::min(report.worst_partial_margin, margin);
    if (margin < -slack) ++report.partial_sum_violations;
  }
  report.summable = c * sum <= initial_distance_sq + slack;
  if (distance_to_solutions) {
    for (const auto& row : trace.rows)
      report.lipschitz_estimate = std::max(report.lipschitz_estimate, row.grad_norm);
    double f_best = std::numeric_limits<double>::infinity();
    report.worst_polyak_margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < trace.rows.size(); ++k) {
      f_best = std::min(f_best, trace.rows[k].f);
      const double bound = report.lipschitz_estimate * *distance_to_solutions /
                           std::sqrt(static_cast<double>(k + 1));
      const double margin = bound - f_best;
      report.worst_polyak_margin = std::min(report.worst_polyak_margin, margin);
      if (margin < -1e-12 * (1.0 + bound)) ++report.polyak_violations;
    }
  }
  if (trace.rows.empty()) report.worst_partial_margin = report.worst_polyak_margin = 0.0;
  report.passed = report.partial_sum_violations == 0 && report.summable &&
                  report.polyak_violations == 0;
  return report;
}

RateReport fit_linear_rate(const std::vector<double>& distances, const RateFitOptions& options) {
  RateReport report;
  std::size_t usable = 0;
  while (usable < distances.size() && distances[usable] >= options.floor) ++usable;
  if (usable < options.min_points) {
    // Reached the floor almost immediately: finite (or superlinear) termination.
    report.q_hat = 0.0;
    return report;
  }
  auto count = static_cast<std::size_t>(std::floor(options.tail_fraction * static_cast<double>(usable)));
  count = std::clamp(count, options.min_points, usable);
  report.window_begin = usable - count;
  report.window_end = usable;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = report.window_begin; k < report.window_end; ++k) {
    const double xk = static_cast<double>(k);
    const double yk = std::log(distances[k]);
    sx += xk;
    sy += yk;
    sxx += xk * xk;
    sxy += xk * yk;
  }
  const double n = static_cast<double>(count);
  const double denom = n * sxx - sx * sx;
  const double slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
  const double intercept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (std::size_t k = report.window_begin; k < report.window_end; ++k) {
    const double dev = std::log(distances[k]) - (intercept + slope * static_cast<double>(k));
    ss += dev * dev;
  }
  report.q_hat = std::exp(slope);
  report.fit_residual = std::sqrt(ss / n);
  report.stalled = report.q_hat >= 1.0 - 1e-12;
  return report;
}

}  // namespace pnpplo
