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

// Markets as piecewise-constant characteristic triplets (b, c, nu) on a
// deterministic operational clock, plus the triplet-level quantities the
// solver and the simulator need.

#include "numeraire/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace numeraire {

/// Deterministic clock t_0 = 0 < t_1 < ... < t_K = T.
class OperationalClock {
 public:
  explicit OperationalClock(std::vector<double> times);

  /// Uniform grid of `steps` intervals on [0, horizon].
  static OperationalClock uniform(double horizon, std::size_t steps);

  std::size_t intervals() const { return times_.size() - 1; }
  double horizon() const { return times_.back(); }
  double time(std::size_t k) const { return times_[k]; }
  /// Length of interval k (0-based), i.e. t_{k+1} - t_k.
  double increment(std::size_t k) const { return times_[k + 1] - times_[k]; }
  const std::vector<double>& times() const { return times_; }

 private:
  std::vector<double> times_;
};

struct JumpAtom {
  Vector x;
  double intensity = 0.0;
};

/// One-dimensional radial jump density along a direction vector.
///
/// Registered families (r = jump magnitude, u = log(r / x_min)):
///   "pareto":     nu(dr) = scale * a * x_min^a * r^{-1-a} dr
///   "log_pareto": nu(dr) = scale * a * (1 + u)^{-1-a} dr / r
/// Both have total mass `scale` on [x_min, inf). The mirrored density on
/// -direction carries mass `negative_scale`.
struct DensitySpec {
  std::string family;
  double scale = 0.0;
  double tail_index = 1.0;
  Vector direction;
  double negative_scale = 0.0;
  double x_min = 1.0;
  double x_max = kInf;
  unsigned quad_nodes = 16;

  /// Symbolic test of  integral log(1+|x|) 1{|x|>1} nu(dx) < inf.
  bool integrates_log() const;
};

/// Atoms produced by Gauss-Legendre quadrature of f_n * density, with
/// f_n(x) = 1{|x|<=1} + |x|^{-1/n} 1{|x|>1}.
/// Throws InvalidInput for an unknown family, and for n = ∞ on an
/// untruncated family that does not integrate the log.
std::vector<JumpAtom> discretize_density(const DensitySpec& spec, ApproxIndex n);

/// f_n evaluated at magnitude r.
double approximating_factor(double r, ApproxIndex n);

/// Finite list of weighted jump atoms; optionally backed by a density that
/// was discretized at approximation index `index()`.
class JumpMeasure {
 public:
  JumpMeasure() = default;
  explicit JumpMeasure(std::vector<JumpAtom> atoms);
  /// Explicit atoms plus a density. At n = ∞ a non-log-integrable density
  /// is kept unexpanded; atoms() then throws until at_index() is used.
  JumpMeasure(std::vector<JumpAtom> explicit_atoms, DensitySpec density, ApproxIndex n = kRawIndex);

  const std::vector<JumpAtom>& atoms() const;
  const std::vector<JumpAtom>& explicit_atoms() const { return explicit_; }
  const std::optional<DensitySpec>& density() const { return density_; }
  ApproxIndex index() const { return index_; }
  bool expanded() const { return expanded_; }
  bool empty() const { return expanded_ && atoms_.empty(); }

  /// Re-discretize the density at index n. Identity for explicit measures.
  JumpMeasure at_index(ApproxIndex n) const;

  /// True for explicit atoms; symbolic for densities at n = ∞; always true
  /// for approximated densities (finite n).
  bool integrates_log() const;

 private:
  std::vector<JumpAtom> explicit_;
  std::optional<DensitySpec> density_;
  ApproxIndex index_ = kRawIndex;
  std::vector<JumpAtom> atoms_;
  bool expanded_ = true;
};

struct Triplet {
  Vector b;
  Matrix c;
  JumpMeasure nu;
  /// Clock jump ΔG carried by this segment (0 for a continuous clock).
  double dG_jump = 0.0;

  Eigen::Index dim() const { return b.size(); }
};

struct ValidationReport {
  bool dimensions_ok = true;
  bool symmetric = true;
  bool psd = true;
  double min_eigenvalue = 0.0;
  bool intensities_positive = true;
  bool atoms_nonzero = true;
  double big_jump_intensity = 0.0;
  bool big_jump_finite = true;
  bool integrates_log = true;
  bool clock_jump_consistent = true;
  std::vector<std::string> failures;

  /// Structural checks only; integrates_log is a flag, not a failure.
  bool ok() const { return failures.empty(); }
};

ValidationReport validate_triplet(const Triplet& t);

/// c with negative eigenvalues zeroed and the result symmetrized.
Matrix clip_psd(const Matrix& c);

/// PSD acceptance: smallest eigenvalue >= -1e-10 (largest + 1).
bool within_psd_tolerance(const Matrix& c, double* min_eigenvalue = nullptr);

/// b + Σ x_j 1{|x_j|>1} λ_j, or nullopt when Σ |x_j| 1{|x_j|>1} λ_j diverges.
std::optional<Vector> drift_rate(const Triplet& t);

struct Segment {
  std::size_t from = 0;  ///< first clock interval (inclusive)
  std::size_t to = 0;    ///< last clock interval (exclusive)
  Triplet triplet;
};

class MarketSpec {
 public:
  MarketSpec(int d, OperationalClock clock, std::vector<Segment> segments, bool declared_divergent = false);

  int dim() const { return d_; }
  const OperationalClock& clock() const { return clock_; }
  const std::vector<Segment>& segments() const { return segments_; }
  bool declared_divergent() const { return declared_divergent_; }

  /// Segment index covering clock interval k.
  std::size_t segment_of(std::size_t interval) const { return interval_segment_[interval]; }

  /// ΔG per clock interval: t_{k+1} - t_k, plus the owning segment's clock
  /// jump on the segment's first interval.
  std::vector<double> clock_increments() const;

  /// Convenience: one triplet on a uniform grid.
  static MarketSpec levy(const Triplet& t, double horizon, std::size_t steps);

 private:
  int d_;
  OperationalClock clock_;
  std::vector<Segment> segments_;
  std::vector<std::size_t> interval_segment_;
  bool declared_divergent_;
};

struct ClockIntegral {
  double total = 0.0;
  bool diverged = false;
  std::vector<double> partials;
  std::string reason;
};

struct ClockIntegralOptions {
  /// Per-interval clock increments; defaults to the clock's t_{k+1} - t_k.
  std::span<const double> increments;
  bool declared_divergent = false;
};

/// Σ value_k ΔG_k with running partials. Divergence is flagged by an
/// infinite value, overflow, the declared flag, or the tail refinement study.
ClockIntegral clock_integral(std::span<const double> values, const OperationalClock& clock,
                             const ClockIntegralOptions& opts = {});

/// Tail refinement study on partial sums: windows [T - g_j, T - g_{j+1}) with
/// g_j = T * 1e-4^j, each holding at least two grid intervals. Reports true
/// when the last two window increments do not shrink by more than 10x.
bool tail_refinement_diverges(std::span<const double> partials, const OperationalClock& clock);

}  // namespace numeraire
