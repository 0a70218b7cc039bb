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

// Growth rate, relative rate of return, and the pointwise concave program
// whose maximizer on each clock segment is the numeraire portfolio.

#include "numeraire/arbitrage.hpp"
#include "numeraire/constraints.hpp"
#include "numeraire/errors.hpp"
#include "numeraire/market_model.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace numeraire {

/// g(π) = π^T b - ½ π^T c π + Σ [log(1+π^T x_j) - π^T x_j 1{|x_j|<=1}] λ_j,
/// -inf when some atom has 1 + π^T x_j <= 0.
double growth_rate(const Vector& pi, const Triplet& t);

/// ∇g(π). Throws InvalidInput outside the domain of g.
Vector growth_gradient(const Vector& pi, const Triplet& t);

/// rel(π|ρ): drift rate of W^π / W^ρ. May be +inf. Throws InvalidInput when
/// ρ is not admissible (1 + ρ^T x_j <= 0 for some atom).
double rel_rate(const Vector& pi, const Vector& rho, const Triplet& t);

struct PsiRecord {
  double psi1 = 0.0;  ///< ν[ρ^T x > 1]
  double psi2 = 0.0;  ///< ρ^T b + Σ ρ^T x (1{|x|>1} - 1{|ρ^T x|>1}) λ
  double psi = 0.0;   ///< psi1 + |psi2|
  double psi_hat1 = 0.0;  ///< ρ^T c ρ
  double psi_hat2 = 0.0;  ///< Σ (1 ∧ |ρ^T x|²) λ
  double psi_hat3 = 0.0;  ///< equals psi2
};

PsiRecord psi_rho(const Vector& rho, const Triplet& t);

struct SolveOptions {
  double grad_tol = 1e-9;
  int max_iterations = 100000;
  double armijo = 1e-4;
  double domain_guard = 1e-12;
  double uip_tol = kUipTol;
  double approx_tol = 1e-6;
  unsigned approx_n_max = 64;
  double cert_tol = 1e-7;
  int cert_dirs = 32;
  std::uint64_t cert_seed = 0;
  /// Optional starting point (projected onto the feasible set).
  std::optional<Vector> start;
};

struct SegmentSolution {
  Vector rho;
  double g_value = 0.0;
  int iterations = 0;
  double projected_gradient_norm = 0.0;
  /// Zero-curvature directions inside N⊥ at the optimum (minimum-norm
  /// selection does not apply; reported only).
  bool flat_directions = false;
};

/// argmax of g over C ∩ C_0 ∩ N⊥ by projected gradient ascent with Armijo
/// backtracking. Throws UipPresent (segment 0), NonConvergence, InfeasibleSet.
SegmentSolution solve_segment(const Triplet& t, const ConstraintSet& c, const SolveOptions& opts = {});

struct SegmentResult {
  SegmentSolution solution;
  PsiRecord psi;
  /// Index of the jump measure the solution refers to (n = ∞ unless the
  /// approximating ladder ran).
  ApproxIndex index = kRawIndex;
  std::vector<ApproxStep> approx_trace;
};

struct Certificate {
  double max_rel = -kInf;
  bool pass = false;
  std::size_t worst_segment = 0;
  Vector worst_pi;
  std::size_t vertices_checked = 0;
  std::size_t samples_checked = 0;
  std::vector<double> segment_max;
};

struct NumeraireSolution {
  std::vector<SegmentResult> segments;
  ClockIntegral integrability;
  bool integrable = false;
  double rel_cert = -kInf;
  Certificate certificate;

  const Vector& rho(std::size_t segment) const { return segments[segment].solution.rho; }
};

/// Per segment: UIP gate, then the concave program (with the approximating
/// ladder n = 1, 2, 4, ... when ν does not integrate the log), then ψ^ρ and
/// the integrability verdict, then the rel certificate.
/// Throws UipPresent naming the segment, or NonConvergence with the trace.
NumeraireSolution solve_numeraire(const MarketSpec& m, const ConstraintSet& c, const SolveOptions& opts = {});

/// The triplet a segment result refers to (density re-discretized at the
/// result's index).
Triplet effective_triplet(const Triplet& t, ApproxIndex index);

/// rel(π|ρ) over the vertices of C ∩ C_0 (when few enough) and n_dirs
/// rejection-sampled feasible π per segment; pass iff max <= tol.
Certificate verify_solution(const NumeraireSolution& sol, const MarketSpec& m, const ConstraintSet& c, int n_dirs,
                            std::uint64_t seed = 0, double tol = 1e-7);

/// Random points of a polyhedron by rejection sampling in a bounding box
/// centred at `center` (half-width `radius` on unbounded coordinates).
std::vector<Vector> sample_polyhedron(const ConstraintSet& p, const Vector& center, double radius, int count,
                                      std::uint64_t seed, std::uint64_t stream = 0);

/// Vertices of {A p <= u} by enumeration of d-row subsets, when there are at
/// most `max_subsets` of them; empty otherwise.
std::vector<Vector> polyhedron_vertices(const ConstraintSet& p, std::size_t max_subsets = 20000);

}  // namespace numeraire
