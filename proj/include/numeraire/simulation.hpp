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

// Monte Carlo paths of the returns process from piecewise triplets, discrete
// stochastic exponentials, and the statistical experiments run on them.

#include "numeraire/constraints.hpp"
#include "numeraire/market_model.hpp"
#include "numeraire/solver.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace numeraire {

struct JumpEvent {
  std::size_t path = 0;
  std::size_t step = 0;
  std::size_t atom = 0;  ///< index into the owning segment's atoms()
  std::uint64_t count = 0;
};

/// Per-step increments of one segment-by-segment market, generated on demand.
/// ΔX_k = (b - Σ x_j 1{|x_j|<=1} λ_j) ΔG_k + chol(c) √ΔG_k z + Σ N_j x_j with
/// N_j ~ Poisson(λ_j ΔG_k). Draws come from CounterStream(seed, path, step).
class IncrementGenerator {
 public:
  IncrementGenerator(const MarketSpec& m, std::uint64_t seed);

  std::size_t steps() const { return increments_.size(); }
  int dim() const { return d_; }
  std::uint64_t seed() const { return seed_; }
  /// Advisories (Poisson intensity per step above 0.1).
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Writes ΔX_k of `path` into dx; appends fired atoms to `log` when given.
  void increment(std::size_t path, std::size_t k, Vector& dx, std::vector<JumpEvent>* log = nullptr) const;

 private:
  struct Rates {
    Vector drift;  ///< compensated drift rate
    Matrix root;   ///< c = root root^T
    bool diffusive = false;
    std::vector<JumpAtom> atoms;
  };
  int d_;
  std::uint64_t seed_;
  std::vector<double> increments_;
  std::vector<std::size_t> segment_of_;
  std::vector<Rates> rates_;
  std::vector<std::string> warnings_;
};

struct PathBundle {
  std::uint64_t seed = 0;
  std::vector<double> times;
  std::size_t n_paths = 0;
  int d = 0;
  /// increments[p] is d x K.
  std::vector<Matrix> increments;
  std::vector<JumpEvent> jumps;
  std::vector<std::string> warnings;

  std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
};

PathBundle simulate_paths(const MarketSpec& m, std::size_t n_paths, std::uint64_t seed);

/// Portfolio held over each clock interval.
using PortfolioSchedule = std::vector<Vector>;

/// One portfolio per segment, expanded to the clock intervals.
PortfolioSchedule schedule_from_segments(const MarketSpec& m, const std::vector<Vector>& per_segment);
PortfolioSchedule constant_schedule(const MarketSpec& m, const Vector& pi);
PortfolioSchedule numeraire_schedule(const MarketSpec& m, const NumeraireSolution& sol);

/// W_0 = 1, W_k = W_{k-1} (1 + π_k^T ΔX_k). Throws Bankruptcy on a factor <= 0.
std::vector<double> wealth_path(const PortfolioSchedule& pi, const Matrix& increments, std::size_t path = 0);

struct WealthEnsemble {
  std::vector<std::vector<double>> paths;  ///< bankrupt paths are left empty
  std::vector<Bankruptcy> bankrupt;
};

/// Wealth per path; bankrupt paths are recorded and excluded. With
/// `require_solvent` the first bankruptcy is rethrown instead.
WealthEnsemble wealth_from_increments(const PortfolioSchedule& pi, const PathBundle& paths,
                                      bool require_solvent = false);

/// max_k |E(Y)_k / E(R)_k - E(Z)_k| / max(1, |E(Z)_k|) with
/// ΔZ_k = (ΔY_k - ΔR_k) / (1 + ΔR_k). Throws InvalidInput if 1 + ΔY or 1 + ΔR <= 0.
double relative_wealth_identity(std::span<const double> y, std::span<const double> r);

/// Clock intervals closing the `count` equally spaced checkpoints (nearest grid
/// point to j T / count, j = 1..count).
std::vector<std::size_t> checkpoint_steps(const OperationalClock& clock, std::size_t count);

struct SupermartingaleReport {
  std::vector<double> times;
  std::vector<double> means;
  std::vector<double> standard_errors;
  /// SE of the paired increment mean_k - mean_{k-1} (mean_{-1} = 1).
  std::vector<double> step_standard_errors;
  std::size_t n_paths = 0;
  std::size_t excluded_paths = 0;  ///< W^ρ bankrupt on the grid
  bool certificate_passed = false;
  bool pass = false;
  std::string reason;
};

/// Estimates E[W^π_t / W^ρ_t] at the checkpoints. Pass iff each mean is at
/// most the previous one + 3 SE of the paired step and at most 1 + 3 SE.
/// A π-bankrupt path contributes ratio 0 from that step on.
SupermartingaleReport supermartingale_test(const PortfolioSchedule& pi, const NumeraireSolution& sol,
                                           const MarketSpec& m, std::size_t n_paths, std::uint64_t seed,
                                           std::size_t checkpoints = 8);

/// q_a(y) = -log a + (1 - 1/a) y on [0, a), y - 1 - log y on [a, inf).
double q_a(double y, double a);

/// h^π = -rel(π|ρ) + ½ (π-ρ)^T c (π-ρ) + Σ q_a((1+π^T x)/(1+ρ^T x)) λ.
double deviation_rate(const Vector& pi, const Vector& rho, const Triplet& t, double a);

struct DeviationOptions {
  double a = 0.5;
  double floor = 5.0;
  double epsilon = 0.15;
  double quantile = 0.95;
  std::size_t checkpoints = 8;
  double null_tol = 1e-12;
};

struct DeviationReport {
  std::vector<double> times;
  std::vector<double> H;
  std::vector<double> mean_log_ratio;
  std::vector<double> quantile_normalized;  ///< per checkpoint (NaN while H = 0)
  double h = 0.0;
  bool no_deviation = false;
  double final_quantile = 0.0;
  double max_log_ratio_drift = 0.0;  ///< used by the no-deviation branch
  bool pass = false;
  std::string reason;
};

/// Long-horizon single-triplet markets only (one segment).
DeviationReport asymptotic_deviation(const Vector& pi, const NumeraireSolution& sol, const MarketSpec& m,
                                     std::size_t n_paths, std::uint64_t seed, const DeviationOptions& opts = {});

/// Linear-interpolation sample quantile (type 7). Reorders `v`.
double sample_quantile(std::vector<double>& v, double p);

/// Pairwise (cascade) summation, independent of evaluation order.
double pairwise_sum(std::span<const double> v);

}  // namespace numeraire
