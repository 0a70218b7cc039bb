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

// Immediate arbitrage directions and detection of unbounded increasing
// profits (UIP): the cone of immediate arbitrage meets the recession cone of
// the constraints.

#include "numeraire/constraints.hpp"
#include "numeraire/market_model.hpp"

#include <optional>
#include <string>

namespace numeraire {

inline constexpr double kUipTol = 1e-9;

struct ArbitrageConditions {
  bool diffusion_free = false;     ///< |c xi| <= tol
  bool no_negative_jumps = false;  ///< xi^T x_j >= -tol for every atom
  bool drift_nonnegative = false;  ///< xi^T b - Σ xi^T x_j 1{|x_j|<=1} λ_j >= -tol
  bool outside_null = false;       ///< dist(xi, N) > 1e-7 |xi|
  double diffusion_norm = 0.0;
  double min_jump_exposure = 0.0;
  double truncated_drift = 0.0;
  double null_distance = 0.0;
  std::string note;
};

struct ArbitrageCheck {
  bool result = false;
  ArbitrageConditions conditions;
};

ArbitrageCheck is_immediate_arbitrage(const Vector& xi, const Triplet& t, double tol = kUipTol);

struct NuipReport {
  bool uip_exists = false;
  std::optional<Vector> witness;
  double lp_value = 0.0;
  std::string lp_status;
  ArbitrageConditions checks;
  /// ξ^T b + Σ ξ^T x/(1+ξ^T x) 1{|x|>1} λ for the witness; ξ ∈ I^a iff this is >= 1/a.
  double ia_margin = 0.0;
};

/// Maximizes ξ^T b + Σ λ_j ξ^T x_j over ξ in the recession cone of `c`
/// with c ξ = 0, ξ^T x_j >= 0, truncated drift >= 0 and |ξ|_inf <= 1.
/// The optimum is positive exactly when some feasible ξ lies outside N.
/// Throws LpFailure if the linear program cannot be solved.
NuipReport detect_uip(const Triplet& t, const ConstraintSet& c, double tol = kUipTol);

}  // namespace numeraire
