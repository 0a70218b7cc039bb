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

#include "numeraire/lp.hpp"

#include "numeraire/errors.hpp"

#include <cmath>
#include <limits>

namespace numeraire::lp {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-12;
constexpr int kMaxIterations = 50000;

// How an original variable is expressed through nonnegative columns.
struct VarMap {
  enum Kind { Shifted, Reflected, Split } kind;
  Eigen::Index col;  // first column
  double offset;     // lower (Shifted) or upper (Reflected)
};

class Tableau {
 public:
  Tableau(Matrix a, Vector b, std::vector<int> slack_sign, std::vector<bool> needs_artificial)
      : m_(a.rows()), n_struct_(a.cols()) {
    Eigen::Index n_slack = 0;
    Eigen::Index n_art = 0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (slack_sign[i] != 0) ++n_slack;
      if (needs_artificial[i]) ++n_art;
    }
    n_cols_ = n_struct_ + n_slack + n_art;
    first_art_ = n_struct_ + n_slack;
    t_ = Matrix::Zero(m_ + 1, n_cols_ + 1);
    t_.topLeftCorner(m_, n_struct_) = a;
    t_.block(0, n_cols_, m_, 1) = b;
    basis_.assign(m_, -1);
    Eigen::Index s = n_struct_;
    Eigen::Index r = first_art_;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (slack_sign[i] != 0) {
        t_(i, s) = slack_sign[i];
        if (!needs_artificial[i]) basis_[i] = s;
        ++s;
      }
      if (needs_artificial[i]) {
        t_(i, r) = 1.0;
        basis_[i] = r;
        ++r;
      }
    }
  }

  Eigen::Index first_artificial() const { return first_art_; }
  Eigen::Index cols() const { return n_cols_; }
  Eigen::Index rows() const { return m_; }

  // Sets the cost row for minimizing cost^T x over the current basis.
  void set_cost(const Vector& cost) {
    t_.row(m_).setZero();
    t_.block(m_, 0, 1, cost.size()) = cost.transpose();
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Eigen::Index j = basis_[i];
      const double cj = t_(m_, j);
      if (cj != 0.0) t_.row(m_) -= cj * t_.row(i);
    }
  }

  // Bland's rule simplex on columns [0, col_limit).
  Status run(Eigen::Index col_limit) {
    for (int iter = 0; iter < kMaxIterations; ++iter) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < col_limit; ++j) {
        if (t_(m_, j) < -kCostTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return Status::Optimal;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double aij = t_(i, enter);
        if (aij > kPivotTol) {
          const double ratio = t_(i, n_cols_) / aij;
          if (ratio < best - 1e-14 || (std::abs(ratio - best) <= 1e-14 && leave >= 0 && basis_[i] < basis_[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return Status::Unbounded;
      pivot(leave, enter);
    }
    return Status::IterationLimit;
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[r] = c;
  }

  // After phase 1: pivot artificials out of the basis; drop redundant rows.
  void expel_artificials() {
    for (Eigen::Index i = 0; i < m_;) {
      if (basis_[i] < first_art_) {
        ++i;
        continue;
      }
      Eigen::Index col = -1;
      for (Eigen::Index j = 0; j < first_art_; ++j) {
        if (std::abs(t_(i, j)) > 1e-9) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        pivot(i, col);
        ++i;
      } else {
        remove_row(i);
      }
    }
  }

  double objective_value() const { return -t_(m_, n_cols_); }

  Vector solution() const {
    Vector x = Vector::Zero(n_cols_);
    for (Eigen::Index i = 0; i < m_; ++i) x[basis_[i]] = t_(i, n_cols_);
    return x;
  }

 private:
  void remove_row(Eigen::Index r) {
    Matrix next(t_.rows() - 1, t_.cols());
    next.topRows(r) = t_.topRows(r);
    next.bottomRows(t_.rows() - 1 - r) = t_.bottomRows(t_.rows() - 1 - r);
    t_ = std::move(next);
    basis_.erase(basis_.begin() + r);
    --m_;
  }

  Eigen::Index m_;
  Eigen::Index n_struct_;
  Eigen::Index n_cols_ = 0;
  Eigen::Index first_art_ = 0;
  Matrix t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

Result maximize(const Problem& p) {
  const Eigen::Index n = p.objective.size();
  const Eigen::Index m = p.rows.rows();
  if (p.rows.cols() != n && m > 0) throw InvalidInput("lp: row width differs from variable count");
  if (p.rhs.size() != m || static_cast<Eigen::Index>(p.senses.size()) != m) {
    throw InvalidInput("lp: rhs/senses length mismatch");
  }
  const Vector lower = p.lower.size() ? p.lower : Vector::Constant(n, -kInf);
  const Vector upper = p.upper.size() ? p.upper : Vector::Constant(n, kInf);

  // Map every variable onto nonnegative columns.
  std::vector<VarMap> map(n);
  Eigen::Index cols = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (lower[j] > upper[j]) return {Status::Infeasible, Vector(), 0.0};
    if (std::isfinite(lower[j])) {
      map[j] = {VarMap::Shifted, cols++, lower[j]};
    } else if (std::isfinite(upper[j])) {
      map[j] = {VarMap::Reflected, cols++, upper[j]};
    } else {
      map[j] = {VarMap::Split, cols, 0.0};
      cols += 2;
    }
  }
  auto expand_row = [&](const Eigen::Ref<const Vector>& coeffs, double* rhs_shift) {
    Vector row = Vector::Zero(cols);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = coeffs[j];
      if (a == 0.0) continue;
      switch (map[j].kind) {
        case VarMap::Shifted:
          row[map[j].col] += a;
          *rhs_shift += a * map[j].offset;
          break;
        case VarMap::Reflected:
          row[map[j].col] -= a;
          *rhs_shift += a * map[j].offset;
          break;
        case VarMap::Split:
          row[map[j].col] += a;
          row[map[j].col + 1] -= a;
          break;
      }
    }
    return row;
  };

  std::vector<Vector> rows;
  std::vector<double> rhs;
  std::vector<Sense> senses;
  for (Eigen::Index i = 0; i < m; ++i) {
    double shift = 0.0;
    rows.push_back(expand_row(p.rows.row(i).transpose(), &shift));
    rhs.push_back(p.rhs[i] - shift);
    senses.push_back(p.senses[i]);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::isfinite(lower[j]) && std::isfinite(upper[j])) {
      Vector row = Vector::Zero(cols);
      row[map[j].col] = 1.0;
      rows.push_back(row);
      rhs.push_back(upper[j] - lower[j]);
      senses.push_back(Sense::LessEq);
    }
  }

  const Eigen::Index mm = static_cast<Eigen::Index>(rows.size());
  Matrix a(mm, cols);
  Vector b(mm);
  std::vector<int> slack_sign(mm, 0);
  std::vector<bool> needs_art(mm, false);
  for (Eigen::Index i = 0; i < mm; ++i) {
    double sign = rhs[i] < 0.0 ? -1.0 : 1.0;
    a.row(i) = sign * rows[i].transpose();
    b[i] = sign * rhs[i];
    Sense s = senses[i];
    if (sign < 0.0 && s != Sense::Equal) s = (s == Sense::LessEq) ? Sense::GreaterEq : Sense::LessEq;
    if (s == Sense::LessEq) {
      slack_sign[i] = 1;
    } else if (s == Sense::GreaterEq) {
      slack_sign[i] = -1;
      needs_art[i] = true;
    } else {
      needs_art[i] = true;
    }
  }

  Tableau tab(a, b, slack_sign, needs_art);
  const Eigen::Index n_art = tab.cols() - tab.first_artificial();
  if (n_art > 0) {
    Vector cost = Vector::Zero(tab.cols());
    cost.tail(n_art).setOnes();
    tab.set_cost(cost);
    const Status s1 = tab.run(tab.cols());
    if (s1 == Status::IterationLimit) return {s1, Vector(), 0.0};
    const double scale = 1.0 + b.cwiseAbs().maxCoeff();
    if (tab.objective_value() > 1e-9 * scale) return {Status::Infeasible, Vector(), 0.0};
    tab.expel_artificials();
  }

  Vector cost = Vector::Zero(tab.cols());
  double obj_shift = 0.0;
  {
    Vector neg = -p.objective;
    cost.head(cols) = expand_row(neg, &obj_shift);
  }
  tab.set_cost(cost);
  const Status s2 = tab.run(tab.first_artificial());
  if (s2 != Status::Optimal) return {s2, Vector(), 0.0};

  const Vector y = tab.solution();
  Vector x(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    switch (map[j].kind) {
      case VarMap::Shifted: x[j] = map[j].offset + y[map[j].col]; break;
      case VarMap::Reflected: x[j] = map[j].offset - y[map[j].col]; break;
      case VarMap::Split: x[j] = y[map[j].col] - y[map[j].col + 1]; break;
    }
  }
  return {Status::Optimal, x, p.objective.dot(x)};
}

bool feasible(const Problem& problem) {
  Problem q = problem;
  q.objective = Vector::Zero(problem.objective.size());
  const Result r = maximize(q);
  if (r.status == Status::IterationLimit) throw LpFailure("lp: iteration limit in feasibility check");
  return r.status == Status::Optimal;
}

}  // namespace numeraire::lp
