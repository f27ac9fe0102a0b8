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

#include "pnpplo/projections.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "pnpplo/error.hpp"

namespace pnpplo {

const char* to_string(SetKind kind) {
  switch (kind) {
    case SetKind::l2_ball: return "l2_ball";
    case SetKind::l1_ball: return "l1_ball";
    case SetKind::singleton: return "singleton";
    case SetKind::box: return "box";
    case SetKind::affine_subspace: return "affine_subspace";
  }
  return "unknown";
}

ConvexSet::ConvexSet(SetKind kind, Signal anchor, double radius)
    : kind_(kind), anchor_(std::move(anchor)), radius_(radius) {
  if (!(radius_ >= 0.0)) throw InvalidArgument("convex set radius must be >= 0");
}

ConvexSet ConvexSet::l2_ball(Signal center, double radius) {
  return ConvexSet(SetKind::l2_ball, std::move(center), radius);
}

ConvexSet ConvexSet::l1_ball(Signal center, double radius) {
  return ConvexSet(SetKind::l1_ball, std::move(center), radius);
}

ConvexSet ConvexSet::singleton(Signal point) {
  return ConvexSet(SetKind::singleton, std::move(point), 0.0);
}

ConvexSet ConvexSet::box(Signal lower, Signal upper) {
  require_same_shape(lower, upper, "box bounds");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] <= upper[i])) throw InvalidArgument("box: lower bound exceeds upper bound");
  }
  ConvexSet set(SetKind::box, std::move(lower), 0.0);
  set.upper_ = std::move(upper);
  return set;
}

ConvexSet ConvexSet::box(Shape shape, double lower, double upper, DomainTag tag) {
  return box(Signal::filled(shape, lower, tag), Signal::filled(shape, upper, tag));
}

ConvexSet ConvexSet::affine_subspace(const std::vector<Signal>& spanning, Signal offset) {
  for (const auto& v : spanning) require_same_shape(v, offset, "affine_subspace");
  ConvexSet set(SetKind::affine_subspace, std::move(offset), 0.0);
  set.basis_ = orthonormalize(spanning);
  return set;
}

void ConvexSet::check_shape(const Signal& x, const char* what) const {
  if (x.shape() != anchor_.shape()) {
    throw ShapeMismatch(std::string(what) + ": set shape " + to_string(anchor_.shape()) +
                        ", got " + to_string(x.shape()));
  }
}

Signal ConvexSet::project(const Signal& x) const {
  check_shape(x, "project");
  switch (kind_) {
    case SetKind::l2_ball: {
      Signal d = x - anchor_;
      const double dist = norm2(d);
      if (dist <= radius_) return x;
      d *= radius_ / dist;
      return anchor_ + d;
    }
    case SetKind::l1_ball: {
      const Signal d = x - anchor_;
      auto z = project_l1_ball(d.values(), radius_);
      return anchor_ + Signal(x.shape(), std::move(z), x.tag());
    }
    case SetKind::singleton:
      return anchor_;
    case SetKind::box: {
      Signal z = x;
      for (std::size_t i = 0; i < z.size(); ++i) z[i] = std::clamp(z[i], anchor_[i], upper_[i]);
      return z;
    }
    case SetKind::affine_subspace: {
      const Signal d = x - anchor_;
      Signal z = anchor_;
      for (const auto& b : basis_) z.axpy(inner(b, d), b);
      return z;
    }
  }
  return x;
}

bool ConvexSet::contains(const Signal& x, std::optional<double> tol) const {
  check_shape(x, "contains");
  const double t = tol.value_or(default_tolerance());
  switch (kind_) {
    case SetKind::l2_ball:
      return norm2(x - anchor_) <= radius_ + t;
    case SetKind::l1_ball: {
      double sum = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) sum += std::abs(x[i] - anchor_[i]);
      return sum <= radius_ + t;
    }
    case SetKind::singleton:
      return norm2(x - anchor_) <= t;
    case SetKind::box:
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < anchor_[i] - t || x[i] > upper_[i] + t) return false;
      }
      return true;
    case SetKind::affine_subspace:
      return norm2(x - project(x)) <= t;
  }
  return false;
}

double ConvexSet::distance(const Signal& x) const { return norm2(x - project(x)); }

double radius_from_noise(std::size_t n0, double sigma, double epsilon) {
  if (n0 < 1) throw InvalidArgument("radius_from_noise: n0 must be >= 1");
  if (!(sigma >= 0.0)) throw InvalidArgument("radius_from_noise: sigma must be >= 0");
  if (!(epsilon > 0.0)) throw InvalidArgument("radius_from_noise: epsilon must be positive");
  return epsilon * std::sqrt(static_cast<double>(n0) * sigma * sigma);
}

namespace {

double gram_drift(const std::vector<Signal>& q) {
  double drift = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = i; j < q.size(); ++j)
      drift = std::max(drift, std::abs(inner(q[i], q[j]) - (i == j ? 1.0 : 0.0)));
  return drift;
}

std::vector<Signal> gram_schmidt(const std::vector<Signal>& vectors) {
  std::vector<Signal> q;
  for (const auto& v : vectors) {
    const double original = norm2(v);
    if (original == 0.0) continue;
    Signal u = v;
    for (const auto& b : q) u.axpy(-inner(b, u), b);
    const double n = norm2(u);
    if (n <= 1e-12 * original) continue;
    u *= 1.0 / n;
    q.push_back(std::move(u));
  }
  return q;
}

}  // namespace

std::vector<Signal> orthonormalize(const std::vector<Signal>& vectors) {
  auto q = gram_schmidt(vectors);
  for (int pass = 0; pass < 3 && gram_drift(q) > 1e-10; ++pass) q = gram_schmidt(q);
  return q;
}

std::vector<double> project_l1_ball(std::vector<double> v, double radius) {
  double l1 = 0.0;
  for (double x : v) l1 += std::abs(x);
  if (l1 <= radius) return v;
  if (radius == 0.0) return std::vector<double>(v.size(), 0.0);
  std::vector<double> u(v.size());
  std::transform(v.begin(), v.end(), u.begin(), [](double x) { return std::abs(x); });
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - radius) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }
  for (double& x : v) {
    const double shrunk = std::max(std::abs(x) - theta, 0.0);
    x = std::copysign(shrunk, x);
  }
  return v;
}

}  // namespace pnpplo
