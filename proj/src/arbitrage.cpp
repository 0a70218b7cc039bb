// Copyright 2026 The numeraire Authors
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

#include "numeraire/arbitrage.hpp"

#include "numeraire/errors.hpp"
#include "numeraire/lp.hpp"

#include <algorithm>
#include <cmath>

namespace numeraire {

namespace {

constexpr double kNullDistanceTol = 1e-7;

// Jump directions rescaled so huge atoms do not swamp the tolerances.
Vector scaled_jump(const Vector& x) {
  const double n = x.norm();
  return n > 1.0 ? Vector(x / n) : x;
}

Vector small_jump_mean(const Triplet& t) {
  Vector m = Vector::Zero(t.dim());
  for (const auto& a : t.nu.atoms()) {
    if (a.x.norm() <= 1.0) m += a.intensity * a.x;
  }
  return m;
}

}  // namespace

ArbitrageCheck is_immediate_arbitrage(const Vector& xi, const Triplet& t, double tol) {
  ArbitrageCheck out;
  auto& c = out.conditions;
  const double xi_norm = xi.norm();
  if (xi_norm == 0.0) {
    c.note = "zero vector lies in N";
    return out;
  }
  const double scale = std::max(1.0, xi_norm);
  c.diffusion_norm = (t.c * xi).norm();
  c.diffusion_free = c.diffusion_norm <= tol * scale;

  c.min_jump_exposure = kInf;
  for (const auto& a : t.nu.atoms()) c.min_jump_exposure = std::min(c.min_jump_exposure, xi.dot(scaled_jump(a.x)));
  c.no_negative_jumps = t.nu.atoms().empty() || c.min_jump_exposure >= -tol * scale;
  if (t.nu.atoms().empty()) c.min_jump_exposure = 0.0;

  c.truncated_drift = xi.dot(t.b - small_jump_mean(t));
  c.drift_nonnegative = c.truncated_drift >= -tol * scale;

  c.null_distance = null_space(t).distance(xi);
  c.outside_null = c.null_distance > kNullDistanceTol * xi_norm;

  out.result = c.diffusion_free && c.no_negative_jumps && c.drift_nonnegative && c.outside_null;
  return out;
}

NuipReport detect_uip(const Triplet& t, const ConstraintSet& cset, double tol) {
  const Eigen::Index d = t.dim();
  if (cset.dim() != d) throw InvalidInput("detect_uip: constraint dimension differs from triplet");
  const auto& atoms = t.nu.atoms();

  // Range of c: rows U^T with c ξ = 0  <=>  U^T ξ = 0.
  Matrix range_rows(0, d);
  if (t.c.size() > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (t.c + t.c.transpose()));
    const double top = es.eigenvalues().cwiseAbs().maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (top > 0.0 && es.eigenvalues()[i] > 1e-10 * top) keep.push_back(i);
    }
    range_rows.resize(static_cast<Eigen::Index>(keep.size()), d);
    for (std::size_t r = 0; r < keep.size(); ++r) {
      range_rows.row(static_cast<Eigen::Index>(r)) = es.eigenvectors().col(keep[r]).transpose();
    }
  }

  std::vector<Vector> rows;
  std::vector<lp::Sense> senses;
  for (Eigen::Index i = 0; i < cset.rows(); ++i) {
    const double n = cset.A.row(i).norm();
    if (n == 0.0) continue;
    rows.push_back(cset.A.row(i).transpose() / n);
    senses.push_back(lp::Sense::LessEq);
  }
  for (Eigen::Index i = 0; i < range_rows.rows(); ++i) {
    rows.push_back(range_rows.row(i).transpose());
    senses.push_back(lp::Sense::Equal);
  }
  for (const auto& a : atoms) {
    rows.push_back(-scaled_jump(a.x));
    senses.push_back(lp::Sense::LessEq);
  }
  const Vector truncated = t.b - small_jump_mean(t);
  rows.push_back(-truncated);
  senses.push_back(lp::Sense::LessEq);

  lp::Problem prob;
  prob.objective = t.b;
  for (const auto& a : atoms) prob.objective += a.intensity * a.x;
  prob.rows.resize(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) prob.rows.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  prob.rhs = Vector::Zero(static_cast<Eigen::Index>(rows.size()));
  prob.senses = senses;
  prob.lower = Vector::Constant(d, -1.0);
  prob.upper = Vector::Constant(d, 1.0);

  const lp::Result res = lp::maximize(prob);
  NuipReport report;
  report.lp_status = lp::to_string(res.status);
  if (res.status != lp::Status::Optimal) {
    throw LpFailure(std::string("detect_uip: linear program ended with status ") + report.lp_status);
  }
  report.lp_value = res.value;
  const double scale = std::max(1.0, prob.objective.norm());
  if (res.value > tol * scale) {
    report.uip_exists = true;
    report.witness = res.x;
    report.checks = is_immediate_arbitrage(res.x, t, tol).conditions;
    double margin = res.x.dot(t.b);
    for (const auto& a : atoms) {
      if (a.x.norm() > 1.0) {
        const double e = res.x.dot(a.x);
        margin += a.intensity * e / (1.0 + e);
      }
    }
    report.ia_margin = margin;
  }
  return report;
}

}  // namespace numeraire
