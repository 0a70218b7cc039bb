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

// Two worked examples: an arbitrage in a market where the numeraire exists
// (three-dimensional Bessel price), and the divergence of truncated numeraire
// strategies when the numeraire fails to be integrable.

#include "numeraire/constraints.hpp"
#include "numeraire/market_model.hpp"
#include "numeraire/solver.hpp"

#include <cstdint>
#include <vector>

namespace numeraire {

/// Standard normal CDF.
double normal_cdf(double x);

struct BesselRun {
  std::size_t steps = 0;
  std::vector<double> terminal_wealth;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double max_abs_error = 0.0;
  double rms_error = 0.0;
  double min_wealth = 0.0;  ///< smallest W_t over all paths and steps
};

struct BesselReport {
  double target = 0.0;  ///< 1 / Φ(1)
  double tolerance = 1e-2;
  BesselRun base;
  BesselRun refined;  ///< same Brownian paths on twice as many steps
  bool all_within = false;
  double rms_ratio = 0.0;  ///< rms error (steps) / rms error (2 steps)
  double max_ratio = 0.0;
  bool first_order = false;
  bool positive = false;
};

/// dS = dt / S + dβ, S_0 = 1 on [0, 1] by Euler with floor 1e-6; proportion
/// π_t = S_t ∂_x log F(t, S_t), F(t, x) = Φ(x / √(1 - t)) / Φ(1).
/// The refined run reuses the Brownian increments, pairwise summed.
BesselReport bessel_arbitrage_demo(std::size_t steps, std::size_t n_paths, std::uint64_t seed,
                                   double tolerance = 1e-2);

/// b_t = (1 - t)^{-p}, c = 1, ν = 0 on the grid t_k = 1 - ratio^k, closed by
/// t = 1 once 1 - t_k < min_gap. p = 1/2 is the singular case.
MarketSpec singular_drift_market(double power = 0.5, double ratio = 0.99, double min_gap = 1e-8);

struct UpbrLevel {
  double n = 0.0;
  double tau = 0.0;
  std::size_t active_steps = 0;
  double median = 0.0;
  double p90 = 0.0;
};

struct UpbrReport {
  bool integrable = true;
  std::vector<UpbrLevel> levels;
  bool medians_increasing = false;
  double growth = 0.0;      ///< last median / first median
  double last_ratio = 0.0;  ///< last median / previous median
  bool diverging = false;   ///< increasing over >= 4 levels and growth > 10
  bool stabilized = false;  ///< last_ratio < 1.1
};

/// ρ_n = ρ 1{[0, τ_n]}, τ_n the first grid time where the ψ-partial reaches n
/// (τ_n = 0 for n <= 0). With `require_singular` an integrable spec throws
/// InvalidInput.
UpbrReport upbr_demo(const MarketSpec& m, const ConstraintSet& c, const std::vector<double>& levels,
                     std::size_t n_paths, std::uint64_t seed, bool require_singular = true);

}  // namespace numeraire
