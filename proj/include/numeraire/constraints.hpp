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

#pragma once

// Polyhedral portfolio constraints {p : A p <= u}, the natural constraints of
// a jump measure, recession cones, null investments and Euclidean projection.

#include "numeraire/market_model.hpp"
#include "numeraire/types.hpp"

#include <string>
#include <vector>

namespace numeraire {

struct ConstraintSet {
  Matrix A;  ///< m x d
  Vector u;  ///< m
  bool is_cone = false;

  /// The whole space R^d (no rows).
  static ConstraintSet full(int d);
  /// {p >= 0}.
  static ConstraintSet long_only(int d);
  /// {p >= 0, Σ p <= 1}.
  static ConstraintSet simplex(int d);
  /// "unconstrained" | "long-only" | "simplex"; throws InvalidInput otherwise.
  static ConstraintSet preset(const std::string& name, int d);

  ConstraintSet(Matrix a, Vector rhs, bool cone);
  ConstraintSet() = default;

  int dim() const { return static_cast<int>(A.cols()); }
  Eigen::Index rows() const { return A.rows(); }

  /// Nonemptiness via a phase-one linear program.
  bool is_empty() const;
};

/// {p : -x_j^T p <= 1 for every atom}; R^d when there are no atoms.
ConstraintSet natural_constraints(const JumpMeasure& nu, int d);

/// Stacked rows; a cone only when both inputs are cones.
ConstraintSet intersect(const ConstraintSet& a, const ConstraintSet& b);

/// {p : A p <= 0}.
ConstraintSet recession_cone(const ConstraintSet& c);

/// Ap <= u + tol componentwise.
bool contains(const ConstraintSet& c, const Vector& p, double tol = 1e-9);

/// Euclidean projection onto {A p <= u} by a dual active-set iteration
/// (Goldfarb-Idnani with identity Hessian). Throws InfeasibleSet.
Vector project(const ConstraintSet& c, const Vector& p);

/// Null investments N = ker [c; x_j^T; b^T].
struct NullSpace {
  Matrix basis;                 ///< d x k, orthonormal columns spanning N
  Matrix complement_basis;      ///< d x (d-k), orthonormal columns spanning N⊥
  Matrix projector_complement;  ///< I - basis basis^T

  Eigen::Index dim() const { return basis.cols(); }
  /// Distance of v from N.
  double distance(const Vector& v) const { return (projector_complement * v).norm(); }
};

/// Singular values below 1e-10 * sigma_max count as zero.
NullSpace null_space(const Triplet& t);

}  // namespace numeraire
