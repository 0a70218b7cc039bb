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

#include "numeraire/market_model.hpp"

#include "numeraire/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace numeraire {

namespace {

constexpr double kSymmetryTol = 1e-10;
constexpr double kPsdTol = 1e-10;
// Log-magnitude cap applied to untruncated densities: atoms stay below 1e12.
constexpr double kMaxMagnitude = 1e12;

struct GaussLegendre {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(unsigned n) {
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (unsigned i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (unsigned k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

// Density of the log-magnitude u = log(r / x_min), per unit of mass.
double log_magnitude_density(const DensitySpec& spec, double u) {
  const double a = spec.tail_index;
  if (spec.family == "pareto") return a * std::exp(-a * u);
  return a * std::pow(1.0 + u, -1.0 - a);  // log_pareto
}

void check_family(const DensitySpec& spec) {
  if (spec.family != "pareto" && spec.family != "log_pareto") {
    throw InvalidInput("unknown density family '" + spec.family + "'");
  }
  if (!(spec.tail_index > 0.0) || !std::isfinite(spec.tail_index)) {
    throw InvalidInput("density tail_index must be positive and finite");
  }
  if (!(spec.x_min > 0.0) || !(spec.x_max > spec.x_min)) {
    throw InvalidInput("density truncation must satisfy 0 < x_min < x_max");
  }
  if (spec.quad_nodes < 8) throw InvalidInput("density quad_nodes must be >= 8");
  if (spec.scale < 0.0 || spec.negative_scale < 0.0) throw InvalidInput("density scales must be >= 0");
  if (spec.direction.size() == 0 || spec.direction.norm() == 0.0) {
    throw InvalidInput("density direction must be a nonzero vector");
  }
}

bool density_first_moment_finite(const DensitySpec& spec, ApproxIndex n) {
  if (std::isfinite(spec.x_max)) return true;
  const double damping = n ? 1.0 / *n : 0.0;
  if (spec.family == "pareto") return spec.tail_index + damping > 1.0;
  return n && *n == 1;
}

}  // namespace

// ---------------------------------------------------------------------------

OperationalClock::OperationalClock(std::vector<double> times) : times_(std::move(times)) {
  if (times_.size() < 2) throw InvalidInput("clock needs at least one interval");
  if (times_.front() != 0.0) throw InvalidInput("clock must start at t0 = 0");
  for (std::size_t k = 1; k < times_.size(); ++k) {
    const double dt = times_[k] - times_[k - 1];
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("clock times must be strictly increasing and finite");
  }
}

OperationalClock OperationalClock::uniform(double horizon, std::size_t steps) {
  if (steps == 0 || !(horizon > 0.0)) throw InvalidInput("uniform clock needs steps >= 1 and horizon > 0");
  std::vector<double> t(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) t[k] = horizon * static_cast<double>(k) / static_cast<double>(steps);
  t.back() = horizon;
  return OperationalClock(std::move(t));
}

// ---------------------------------------------------------------------------

bool DensitySpec::integrates_log() const {
  if (std::isfinite(x_max)) return true;
  if (family == "pareto") return true;
  // log_pareto: ∫ u (1+u)^{-1-a} du < ∞  iff  a > 1.
  return tail_index > 1.0;
}

double approximating_factor(double r, ApproxIndex n) {
  if (r <= 1.0 || !n) return 1.0;
  return std::pow(r, -1.0 / static_cast<double>(*n));
}

std::vector<JumpAtom> discretize_density(const DensitySpec& spec, ApproxIndex n) {
  check_family(spec);
  if (n && *n == 0) throw InvalidInput("approximation index must be >= 1");
  if (!n && !std::isfinite(spec.x_max) && !spec.integrates_log()) {
    throw InvalidInput("raw density does not integrate the log; quadrature mass is not finite at n = inf");
  }

  const double r_max = std::isfinite(spec.x_max) ? spec.x_max : std::max(kMaxMagnitude, 10.0 * spec.x_min);
  const double u_max = std::log(r_max / spec.x_min);
  const double v_max = std::log1p(u_max);
  const GaussLegendre rule = gauss_legendre(spec.quad_nodes);
  const Vector unit = spec.direction / spec.direction.norm();

  std::vector<JumpAtom> atoms;
  atoms.reserve(2 * rule.nodes.size());
  for (const auto& [sign, mass] : {std::pair{1.0, spec.scale}, std::pair{-1.0, spec.negative_scale}}) {
    if (mass <= 0.0) continue;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double v = 0.5 * v_max * (rule.nodes[i] + 1.0);
      const double u = std::expm1(v);
      const double r = spec.x_min * std::exp(u);
      const double dv = 0.5 * v_max * rule.weights[i];
      const double weight = mass * log_magnitude_density(spec, u) * (1.0 + u) * dv * approximating_factor(r, n);
      if (weight > 0.0) atoms.push_back({sign * r * unit, weight});
    }
  }
  return atoms;
}

// ---------------------------------------------------------------------------

JumpMeasure::JumpMeasure(std::vector<JumpAtom> atoms) : explicit_(std::move(atoms)), atoms_(explicit_) {}

JumpMeasure::JumpMeasure(std::vector<JumpAtom> explicit_atoms, DensitySpec density, ApproxIndex n)
    : explicit_(std::move(explicit_atoms)), density_(std::move(density)), index_(n) {
  check_family(*density_);
  atoms_ = explicit_;
  if (!n && !std::isfinite(density_->x_max) && !density_->integrates_log()) {
    expanded_ = false;
    return;
  }
  auto extra = discretize_density(*density_, n);
  atoms_.insert(atoms_.end(), extra.begin(), extra.end());
}

const std::vector<JumpAtom>& JumpMeasure::atoms() const {
  if (!expanded_) {
    throw InvalidInput("jump measure holds a non-log-integrable density; discretize at a finite index first");
  }
  return atoms_;
}

JumpMeasure JumpMeasure::at_index(ApproxIndex n) const {
  if (!density_) return *this;
  return JumpMeasure(explicit_, *density_, n);
}

bool JumpMeasure::integrates_log() const {
  if (!density_ || index_) return true;
  return density_->integrates_log();
}

// ---------------------------------------------------------------------------

bool within_psd_tolerance(const Matrix& c, double* min_eigenvalue) {
  if (c.size() == 0) {
    if (min_eigenvalue) *min_eigenvalue = 0.0;
    return true;
  }
  const Matrix sym = 0.5 * (c + c.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (min_eigenvalue) *min_eigenvalue = lo;
  return lo >= -kPsdTol * (std::max(hi, 0.0) + 1.0);
}

Matrix clip_psd(const Matrix& c) {
  if (c.size() == 0) return c;
  const Matrix sym = 0.5 * (c + c.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const Vector lambda = es.eigenvalues().cwiseMax(0.0);
  Matrix out = es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

ValidationReport validate_triplet(const Triplet& t) {
  ValidationReport r;
  const Eigen::Index d = t.b.size();
  auto fail = [&r](std::string msg) { r.failures.push_back(std::move(msg)); };

  if (t.c.rows() != d || t.c.cols() != d) {
    r.dimensions_ok = false;
    fail("c must be d x d");
  }
  for (const auto& a : t.nu.explicit_atoms()) {
    if (a.x.size() != d) {
      r.dimensions_ok = false;
      fail("atom dimension differs from d");
      break;
    }
  }
  if (t.nu.density() && t.nu.density()->direction.size() != d) {
    r.dimensions_ok = false;
    fail("density direction dimension differs from d");
  }
  if (!r.dimensions_ok) return r;

  if (!t.b.allFinite() || !t.c.allFinite()) fail("b and c must be finite");

  const double cnorm = t.c.cwiseAbs().maxCoeff();
  if ((t.c - t.c.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * (1.0 + cnorm)) {
    r.symmetric = false;
    fail("c is not symmetric");
  }
  r.psd = within_psd_tolerance(t.c, &r.min_eigenvalue);
  if (!r.psd) fail("c is not positive semidefinite");

  const std::vector<JumpAtom>* atoms = t.nu.expanded() ? &t.nu.atoms() : &t.nu.explicit_atoms();
  double small_jump_drift_norm = 0.0;
  Vector small_jump_drift = Vector::Zero(d);
  double total_intensity = 0.0;
  for (const auto& a : *atoms) {
    if (!(a.intensity > 0.0) || !std::isfinite(a.intensity)) r.intensities_positive = false;
    const double norm = a.x.norm();
    if (norm == 0.0) r.atoms_nonzero = false;
    if (!a.x.allFinite()) r.atoms_nonzero = false;
    if (norm > 1.0) r.big_jump_intensity += a.intensity;
    else small_jump_drift += a.intensity * a.x;
    total_intensity += a.intensity;
  }
  small_jump_drift_norm = small_jump_drift.norm();
  if (!t.nu.expanded()) {
    const auto& dens = *t.nu.density();
    r.big_jump_intensity += dens.scale + dens.negative_scale;
    total_intensity += dens.scale + dens.negative_scale;
  }
  if (!r.intensities_positive) fail("jump intensities must be positive and finite");
  if (!r.atoms_nonzero) fail("jump atoms must be nonzero and finite");
  r.big_jump_finite = std::isfinite(r.big_jump_intensity);
  if (!r.big_jump_finite) fail("big-jump intensity nu[|x|>1] is not finite");
  r.integrates_log = t.nu.integrates_log();

  if (!(t.dG_jump >= 0.0) || !std::isfinite(t.dG_jump)) {
    r.clock_jump_consistent = false;
    fail("dG_jump must be finite and nonnegative");
  } else if (t.dG_jump > 0.0) {
    const bool c_zero = cnorm <= kSymmetryTol;
    const bool b_matches = (t.b - small_jump_drift).cwiseAbs().maxCoeff() <=
                           kSymmetryTol * (1.0 + small_jump_drift_norm);
    const bool probability_ok = t.dG_jump * total_intensity <= 1.0 + 1e-12;
    r.clock_jump_consistent = c_zero && b_matches && probability_ok;
    if (!c_zero) fail("clock jump: c must vanish where dG > 0");
    if (!b_matches) fail("clock jump: b must equal the small-jump mean where dG > 0");
    if (!probability_ok) fail("clock jump: dG * nu(R^d) exceeds 1");
  }
  return r;
}

std::optional<Vector> drift_rate(const Triplet& t) {
  if (t.nu.density() && !density_first_moment_finite(*t.nu.density(), t.nu.index())) return std::nullopt;
  Vector out = t.b;
  double abs_moment = 0.0;
  for (const auto& a : t.nu.atoms()) {
    const double norm = a.x.norm();
    if (norm > 1.0) {
      out += a.intensity * a.x;
      abs_moment += a.intensity * norm;
    }
  }
  if (!std::isfinite(abs_moment) || !out.allFinite()) return std::nullopt;
  return out;
}

// ---------------------------------------------------------------------------

MarketSpec::MarketSpec(int d, OperationalClock clock, std::vector<Segment> segments, bool declared_divergent)
    : d_(d), clock_(std::move(clock)), segments_(std::move(segments)), declared_divergent_(declared_divergent) {
  if (d_ < 1) throw InvalidInput("market dimension must be >= 1");
  const std::size_t K = clock_.intervals();
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  interval_segment_.assign(K, kUnset);
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    const auto& seg = segments_[s];
    if (seg.from >= seg.to || seg.to > K) throw InvalidInput("segment range out of clock bounds");
    if (seg.triplet.dim() != d_) throw InvalidInput("segment triplet dimension differs from d");
    for (std::size_t k = seg.from; k < seg.to; ++k) {
      if (interval_segment_[k] != kUnset) throw InvalidInput("segments overlap on clock interval " + std::to_string(k));
      interval_segment_[k] = s;
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (interval_segment_[k] == kUnset) throw InvalidInput("clock interval " + std::to_string(k) + " not covered by a segment");
  }
}

std::vector<double> MarketSpec::clock_increments() const {
  std::vector<double> inc(clock_.intervals());
  for (std::size_t k = 0; k < inc.size(); ++k) inc[k] = clock_.increment(k);
  for (const auto& seg : segments_) inc[seg.from] += seg.triplet.dG_jump;
  return inc;
}

MarketSpec MarketSpec::levy(const Triplet& t, double horizon, std::size_t steps) {
  return MarketSpec(static_cast<int>(t.dim()), OperationalClock::uniform(horizon, steps), {Segment{0, steps, t}});
}

// ---------------------------------------------------------------------------

bool tail_refinement_diverges(std::span<const double> partials, const OperationalClock& clock) {
  const auto& t = clock.times();
  const double T = clock.horizon();
  // partial at grid point k (k = 0 -> 0).
  auto partial_at_time = [&](double s, std::size_t* index) {
    const auto it = std::upper_bound(t.begin(), t.end(), s);
    const std::size_t k = static_cast<std::size_t>(it - t.begin()) - 1;
    *index = k;
    return k == 0 ? 0.0 : partials[k - 1];
  };

  std::vector<double> increments;
  double gap = T;
  for (int j = 0; j < 8; ++j) {
    const double next_gap = gap * 1e-4;
    std::size_t k0 = 0;
    std::size_t k1 = 0;
    const double p0 = partial_at_time(T - gap, &k0);
    const double p1 = partial_at_time(T - next_gap, &k1);
    if (k1 < k0 + 2) break;
    increments.push_back(p1 - p0);
    gap = next_gap;
  }
  if (increments.size() < 2) return false;
  const double prev = increments[increments.size() - 2];
  const double last = increments.back();
  if (!(last > 0.0)) return false;
  return prev / last <= 10.0;
}

ClockIntegral clock_integral(std::span<const double> values, const OperationalClock& clock,
                             const ClockIntegralOptions& opts) {
  const std::size_t K = clock.intervals();
  if (values.size() != K) throw InvalidInput("clock_integral: one value per clock interval required");
  if (!opts.increments.empty() && opts.increments.size() != K) {
    throw InvalidInput("clock_integral: increments length mismatch");
  }

  ClockIntegral out;
  out.partials.resize(K);
  double running = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double dG = opts.increments.empty() ? clock.increment(k) : opts.increments[k];
    const double v = values[k];
    if (std::isinf(v) && v > 0.0) {
      out.diverged = true;
      out.reason = "infinite value on interval " + std::to_string(k);
    }
    running += v * dG;
    out.partials[k] = running;
  }
  out.total = running;
  if (!out.diverged && !std::isfinite(running)) {
    out.diverged = true;
    out.reason = "overflow";
  }
  if (!out.diverged && opts.declared_divergent) {
    out.diverged = true;
    out.reason = "declared divergent";
  }
  if (!out.diverged && tail_refinement_diverges(out.partials, clock)) {
    out.diverged = true;
    out.reason = "tail refinement study";
  }
  return out;
}

}  // namespace numeraire
