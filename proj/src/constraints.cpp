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

#include "numeraire/constraints.hpp"

#include "numeraire/errors.hpp"
#include "numeraire/lp.hpp"

#include <algorithm>
#include <cmath>

namespace numeraire {

namespace {

constexpr double kSvdCutoff = 1e-10;
constexpr double kViolationTol = 1e-12;
constexpr double kDirectionTol = 1e-14;

// Rows scaled to unit length; zero rows dropped (or rejected when u < 0).
void normalized_rows(const ConstraintSet& c, Matrix* a, Vector* u) {
  std::vector<Eigen::Index> keep;
  std::vector<double> norms;
  for (Eigen::Index i = 0; i < c.A.rows(); ++i) {
    const double n = c.A.row(i).norm();
    if (n == 0.0) {
      if (c.u[i] < 0.0) throw InfeasibleSet("constraint row 0 <= " + std::to_string(c.u[i]) + " is infeasible");
      continue;
    }
    keep.push_back(i);
    norms.push_back(n);
  }
  a->resize(static_cast<Eigen::Index>(keep.size()), c.A.cols());
  u->resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const auto i = keep[r];
    a->row(static_cast<Eigen::Index>(r)) = c.A.row(i) / norms[r];
    (*u)[static_cast<Eigen::Index>(r)] = c.u[i] / norms[r];
  }
}

}  // namespace

ConstraintSet::ConstraintSet(Matrix a, Vector rhs, bool cone) : A(std::move(a)), u(std::move(rhs)), is_cone(cone) {
  if (A.rows() != u.size()) throw InvalidInput("constraint A rows and u length differ");
  if (is_cone && u.size() > 0 && u.cwiseAbs().maxCoeff() != 0.0) throw InvalidInput("cone constraints need u = 0");
}

ConstraintSet ConstraintSet::full(int d) { return ConstraintSet(Matrix(0, d), Vector(0), true); }

ConstraintSet ConstraintSet::long_only(int d) {
  return ConstraintSet(-Matrix::Identity(d, d), Vector::Zero(d), true);
}

ConstraintSet ConstraintSet::simplex(int d) {
  Matrix a(d + 1, d);
  a.topRows(d) = -Matrix::Identity(d, d);
  a.row(d).setOnes();
  Vector u = Vector::Zero(d + 1);
  u[d] = 1.0;
  return ConstraintSet(std::move(a), std::move(u), false);
}

ConstraintSet ConstraintSet::preset(const std::string& name, int d) {
  if (name == "unconstrained") return full(d);
  if (name == "long-only") return long_only(d);
  if (name == "simplex") return simplex(d);
  throw InvalidInput("unknown constraint preset '" + name + "'");
}

bool ConstraintSet::is_empty() const {
  if (A.rows() == 0) return false;
  lp::Problem p;
  p.objective = Vector::Zero(A.cols());
  p.rows = A;
  p.rhs = u;
  p.senses.assign(static_cast<std::size_t>(A.rows()), lp::Sense::LessEq);
  return !lp::feasible(p);
}

ConstraintSet natural_constraints(const JumpMeasure& nu, int d) {
  const auto& atoms = nu.atoms();
  Matrix a(static_cast<Eigen::Index>(atoms.size()), d);
  for (std::size_t j = 0; j < atoms.size(); ++j) a.row(static_cast<Eigen::Index>(j)) = -atoms[j].x.transpose();
  return ConstraintSet(std::move(a), Vector::Ones(static_cast<Eigen::Index>(atoms.size())), false);
}

ConstraintSet intersect(const ConstraintSet& a, const ConstraintSet& b) {
  if (a.dim() != b.dim()) throw InvalidInput("intersect: dimension mismatch");
  Matrix m(a.rows() + b.rows(), a.dim());
  m << a.A, b.A;
  Vector u(a.rows() + b.rows());
  u << a.u, b.u;
  return ConstraintSet(std::move(m), std::move(u), a.is_cone && b.is_cone);
}

ConstraintSet recession_cone(const ConstraintSet& c) { return ConstraintSet(c.A, Vector::Zero(c.rows()), true); }

bool contains(const ConstraintSet& c, const Vector& p, double tol) {
  if (c.rows() == 0) return true;
  return ((c.A * p - c.u).array() <= tol).all();
}

Vector project(const ConstraintSet& c, const Vector& q) {
  Matrix a;
  Vector u;
  normalized_rows(c, &a, &u);
  const Eigen::Index m = a.rows();
  Vector p = q;
  if (m == 0) return p;

  std::vector<Eigen::Index> active;
  std::vector<double> mu;
  const int max_outer = static_cast<int>(10 * m + 100);
  for (int outer = 0; outer < max_outer; ++outer) {
    const Vector viol = a * p - u;
    Eigen::Index k = 0;
    const double worst = viol.maxCoeff(&k);
    if (worst <= kViolationTol * (1.0 + std::abs(u[k]))) return p;

    const Vector ak = a.row(k).transpose();
    double mu_new = 0.0;
    for (int inner = 0; inner <= static_cast<int>(m) + 1; ++inner) {
      Vector z = ak;
      Vector r;
      if (!active.empty()) {
        Matrix n(a.cols(), static_cast<Eigen::Index>(active.size()));
        for (std::size_t i = 0; i < active.size(); ++i) n.col(static_cast<Eigen::Index>(i)) = a.row(active[i]).transpose();
        r = (n.transpose() * n).ldlt().solve(n.transpose() * ak);
        z = ak - n * r;
      }
      const double zz = z.squaredNorm();
      const double slack = ak.dot(p) - u[k];
      const double t2 = zz > kDirectionTol ? std::max(slack, 0.0) / zz : kInf;
      double t1 = kInf;
      std::size_t drop = 0;
      for (std::size_t i = 0; i < active.size(); ++i) {
        const double ri = r[static_cast<Eigen::Index>(i)];
        if (ri > kDirectionTol) {
          const double ti = mu[i] / ri;
          if (ti < t1) {
            t1 = ti;
            drop = i;
          }
        }
      }
      if (!std::isfinite(t1) && !std::isfinite(t2)) throw InfeasibleSet("projection: constraint set is empty");
      const double t = std::min(t1, t2);
      if (std::isfinite(t2) || zz > kDirectionTol) p -= t * z;
      for (std::size_t i = 0; i < active.size(); ++i) mu[i] -= t * r[static_cast<Eigen::Index>(i)];
      mu_new += t;
      if (t2 <= t1) {
        active.push_back(k);
        mu.push_back(mu_new);
        break;
      }
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(drop));
      mu.erase(mu.begin() + static_cast<std::ptrdiff_t>(drop));
    }
  }
  throw InfeasibleSet("projection: active-set iteration did not terminate");
}

NullSpace null_space(const Triplet& t) {
  const Eigen::Index d = t.dim();
  std::vector<Vector> rows;
  for (Eigen::Index i = 0; i < d; ++i) rows.push_back(t.c.row(i).transpose());
  auto push_direction = [&rows](const Vector& x) {
    const double n = x.norm();
    rows.push_back(n > 1.0 ? Vector(x / n) : x);
  };
  for (const auto& atom : t.nu.explicit_atoms()) push_direction(atom.x);
  if (t.nu.density()) push_direction(t.nu.density()->direction);
  if (t.nu.expanded() && t.nu.density()) {
    for (const auto& atom : t.nu.atoms()) push_direction(atom.x);
  }
  rows.push_back(t.b);

  Matrix stacked(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) stacked.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();

  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  const double smax = sigma.size() ? sigma.maxCoeff() : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (smax > 0.0 && sigma[i] > kSvdCutoff * smax) ++rank;
  }
  NullSpace ns;
  const Matrix& v = svd.matrixV();
  ns.complement_basis = v.leftCols(rank);
  ns.basis = v.rightCols(d - rank);
  ns.projector_complement = ns.complement_basis * ns.complement_basis.transpose();
  return ns;
}

}  // namespace numeraire
