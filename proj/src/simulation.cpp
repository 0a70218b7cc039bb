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

#include "numeraire/simulation.hpp"

#include "numeraire/errors.hpp"
#include "numeraire/parallel.hpp"
#include "numeraire/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace numeraire {

namespace {

constexpr double kPoissonAdvisory = 0.1;
constexpr std::size_t kChunk = 64;

Matrix covariance_root(const Matrix& c) {
  if (c.size() == 0 || c.cwiseAbs().maxCoeff() == 0.0) return Matrix::Zero(c.rows(), c.cols());
  Eigen::LLT<Matrix> llt(c);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  // Singular but PSD: symmetric square root.
  Eigen::SelfAdjointEigenSolver<Matrix> es(clip_psd(c));
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

// Runs body(path) over all paths in chunks; body writes only its own slot.
template <typename Body>
void for_paths(std::size_t n_paths, Body&& body) {
  const std::size_t chunks = (n_paths + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t end = std::min(n_paths, (c + 1) * kChunk);
    for (std::size_t p = c * kChunk; p < end; ++p) body(p);
  });
}

}  // namespace

IncrementGenerator::IncrementGenerator(const MarketSpec& m, std::uint64_t seed)
    : d_(m.dim()), seed_(seed), increments_(m.clock_increments()) {
  const auto& segs = m.segments();
  rates_.reserve(segs.size());
  for (std::size_t s = 0; s < segs.size(); ++s) {
    const Triplet& t = segs[s].triplet;
    if (!t.nu.expanded()) {
      throw InvalidInput("segment " + std::to_string(s) +
                         ": jump density without a finite log moment cannot be simulated at n = inf");
    }
    Rates r;
    r.atoms = t.nu.atoms();
    r.drift = t.b;
    for (const auto& a : r.atoms) {
      if (a.x.norm() <= 1.0) r.drift -= a.intensity * a.x;
    }
    r.root = covariance_root(t.c);
    r.diffusive = r.root.size() > 0 && r.root.cwiseAbs().maxCoeff() > 0.0;
    double worst = 0.0;
    for (std::size_t k = segs[s].from; k < segs[s].to; ++k) {
      for (const auto& a : r.atoms) worst = std::max(worst, a.intensity * increments_[k]);
    }
    if (worst > kPoissonAdvisory) {
      std::ostringstream os;
      os << "segment " << s << ": lambda*dG up to " << worst << " exceeds " << kPoissonAdvisory
         << " (coarse clock for the jump intensity)";
      warnings_.push_back(os.str());
    }
    rates_.push_back(std::move(r));
  }
  segment_of_.resize(increments_.size());
  for (std::size_t k = 0; k < increments_.size(); ++k) segment_of_[k] = m.segment_of(k);
}

void IncrementGenerator::increment(std::size_t path, std::size_t k, Vector& dx, std::vector<JumpEvent>* log) const {
  const Rates& r = rates_[segment_of_[k]];
  const double dg = increments_[k];
  CounterStream rng(seed_, path, k);
  dx = r.drift * dg;
  if (r.diffusive) {
    Vector z(d_);
    for (int i = 0; i < d_; ++i) z[i] = rng.normal();
    dx.noalias() += std::sqrt(dg) * (r.root * z);
  }
  for (std::size_t j = 0; j < r.atoms.size(); ++j) {
    const std::uint64_t n = rng.poisson(r.atoms[j].intensity * dg);
    if (n == 0) continue;
    dx += static_cast<double>(n) * r.atoms[j].x;
    if (log) log->push_back({path, k, j, n});
  }
}

PathBundle simulate_paths(const MarketSpec& m, std::size_t n_paths, std::uint64_t seed) {
  const IncrementGenerator gen(m, seed);
  PathBundle out;
  out.seed = seed;
  out.times = m.clock().times();
  out.n_paths = n_paths;
  out.d = m.dim();
  out.warnings = gen.warnings();
  out.increments.resize(n_paths);
  std::vector<std::vector<JumpEvent>> logs(n_paths);
  const std::size_t K = gen.steps();
  for_paths(n_paths, [&](std::size_t p) {
    Matrix& inc = out.increments[p];
    inc.resize(out.d, static_cast<Eigen::Index>(K));
    Vector dx(out.d);
    for (std::size_t k = 0; k < K; ++k) {
      gen.increment(p, k, dx, &logs[p]);
      inc.col(static_cast<Eigen::Index>(k)) = dx;
    }
  });
  for (auto& l : logs) out.jumps.insert(out.jumps.end(), l.begin(), l.end());
  return out;
}

PortfolioSchedule schedule_from_segments(const MarketSpec& m, const std::vector<Vector>& per_segment) {
  if (per_segment.size() != m.segments().size()) throw InvalidInput("one portfolio per segment required");
  PortfolioSchedule out(m.clock().intervals());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = per_segment[m.segment_of(k)];
  return out;
}

PortfolioSchedule constant_schedule(const MarketSpec& m, const Vector& pi) {
  if (pi.size() != m.dim()) throw InvalidInput("portfolio dimension differs from market");
  return PortfolioSchedule(m.clock().intervals(), pi);
}

PortfolioSchedule numeraire_schedule(const MarketSpec& m, const NumeraireSolution& sol) {
  std::vector<Vector> per;
  for (const auto& s : sol.segments) per.push_back(s.solution.rho);
  return schedule_from_segments(m, per);
}

std::vector<double> wealth_path(const PortfolioSchedule& pi, const Matrix& increments, std::size_t path) {
  const auto K = static_cast<std::size_t>(increments.cols());
  if (pi.size() != K) throw InvalidInput("portfolio schedule length differs from path length");
  std::vector<double> w(K + 1);
  w[0] = 1.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double f = 1.0 + pi[k].dot(increments.col(static_cast<Eigen::Index>(k)));
    if (!(f > 0.0)) throw Bankruptcy(path, k);
    w[k + 1] = w[k] * f;
  }
  return w;
}

WealthEnsemble wealth_from_increments(const PortfolioSchedule& pi, const PathBundle& paths, bool require_solvent) {
  WealthEnsemble out;
  out.paths.resize(paths.n_paths);
  for (std::size_t p = 0; p < paths.n_paths; ++p) {
    try {
      out.paths[p] = wealth_path(pi, paths.increments[p], p);
    } catch (const Bankruptcy& b) {
      if (require_solvent) throw;
      out.bankrupt.push_back(b);
    }
  }
  return out;
}

double relative_wealth_identity(std::span<const double> y, std::span<const double> r) {
  if (y.size() != r.size()) throw InvalidInput("relative_wealth_identity: length mismatch");
  double ey = 1.0, er = 1.0, ez = 1.0, worst = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (!(1.0 + y[k] > 0.0) || !(1.0 + r[k] > 0.0)) {
      throw InvalidInput("relative_wealth_identity: increment <= -1 at step " + std::to_string(k));
    }
    ey *= 1.0 + y[k];
    er *= 1.0 + r[k];
    ez *= 1.0 + (y[k] - r[k]) / (1.0 + r[k]);
    worst = std::max(worst, std::abs(ey / er - ez) / std::max(1.0, std::abs(ez)));
  }
  return worst;
}

std::vector<std::size_t> checkpoint_steps(const OperationalClock& clock, std::size_t count) {
  const auto& t = clock.times();
  const std::size_t K = clock.intervals();
  std::vector<std::size_t> out;
  for (std::size_t j = 1; j <= count; ++j) {
    const double target = clock.horizon() * static_cast<double>(j) / static_cast<double>(count);
    const auto it = std::lower_bound(t.begin(), t.end(), target);
    auto k = static_cast<std::size_t>(it - t.begin());
    if (k > K) k = K;
    if (k > 0 && target - t[k - 1] < t[k] - target) --k;
    k = std::max<std::size_t>(k, out.empty() ? 1 : out.back() + 1);
    if (k > K) break;
    out.push_back(k);
  }
  return out;
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

double sample_quantile(std::vector<double>& v, double p) {
  if (v.empty()) throw InvalidInput("sample_quantile: empty sample");
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  if (lo == hi || v[lo] == v[hi]) return v[lo];
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(std::span<const double> v) {
  MeanSe out;
  const auto n = static_cast<double>(v.size());
  if (v.empty()) return out;
  out.mean = pairwise_sum(v) / n;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - out.mean) * (v[i] - out.mean);
  out.se = v.size() > 1 ? std::sqrt(pairwise_sum(sq) / (n - 1.0) / n) : 0.0;
  return out;
}

}  // namespace

SupermartingaleReport supermartingale_test(const PortfolioSchedule& pi, const NumeraireSolution& sol,
                                           const MarketSpec& m, std::size_t n_paths, std::uint64_t seed,
                                           std::size_t checkpoints) {
  const PortfolioSchedule rho = numeraire_schedule(m, sol);
  if (pi.size() != rho.size()) throw InvalidInput("portfolio schedule length differs from the clock");
  const IncrementGenerator gen(m, seed);
  const auto steps = checkpoint_steps(m.clock(), checkpoints);
  const std::size_t J = steps.size();
  std::vector<double> ratios(n_paths * J);
  std::vector<char> excluded(n_paths, 0);

  for_paths(n_paths, [&](std::size_t p) {
    Vector dx(m.dim());
    double ratio = 1.0;
    std::size_t next = 0;
    for (std::size_t k = 0; k < gen.steps() && next < J; ++k) {
      gen.increment(p, k, dx);
      const double fr = 1.0 + rho[k].dot(dx);
      if (!(fr > 0.0)) {
        excluded[p] = 1;
        return;
      }
      const double fp = 1.0 + pi[k].dot(dx);
      ratio = fp > 0.0 ? ratio * (fp / fr) : 0.0;
      if (k + 1 == steps[next]) ratios[p * J + next++] = ratio;
    }
  });

  SupermartingaleReport rep;
  rep.certificate_passed = sol.certificate.pass;
  rep.n_paths = n_paths;
  for (char e : excluded) rep.excluded_paths += static_cast<std::size_t>(e);
  std::vector<double> col, diff;
  rep.pass = true;
  double prev_mean = 1.0;
  for (std::size_t j = 0; j < J; ++j) {
    col.clear();
    diff.clear();
    for (std::size_t p = 0; p < n_paths; ++p) {
      if (excluded[p]) continue;
      col.push_back(ratios[p * J + j]);
      diff.push_back(ratios[p * J + j] - (j == 0 ? 1.0 : ratios[p * J + j - 1]));
    }
    const MeanSe level = mean_se(col);
    const MeanSe step = mean_se(diff);
    rep.times.push_back(m.clock().time(steps[j]));
    rep.means.push_back(level.mean);
    rep.standard_errors.push_back(level.se);
    rep.step_standard_errors.push_back(step.se);
    if (rep.pass && level.mean > prev_mean + 3.0 * step.se) {
      rep.pass = false;
      rep.reason = "mean rises above the previous checkpoint at t = " + std::to_string(rep.times.back());
    }
    if (rep.pass && level.mean > 1.0 + 3.0 * level.se) {
      rep.pass = false;
      rep.reason = "mean exceeds 1 + 3 SE at t = " + std::to_string(rep.times.back());
    }
    prev_mean = level.mean;
  }
  if (rep.excluded_paths == n_paths) {
    rep.pass = false;
    rep.reason = "every path bankrupt under the numeraire";
  }
  return rep;
}

double q_a(double y, double a) {
  if (!(a > 0.0 && a < 1.0)) throw InvalidInput("q_a: a must lie in (0, 1)");
  if (!(y >= 0.0)) throw InvalidInput("q_a: y must be nonnegative");
  if (y < a) return -std::log(a) + (1.0 - 1.0 / a) * y;
  return y - 1.0 - std::log(y);
}

double deviation_rate(const Vector& pi, const Vector& rho, const Triplet& t, double a) {
  const Vector diff = pi - rho;
  double h = -rel_rate(pi, rho, t) + 0.5 * diff.dot(t.c * diff);
  for (const auto& atom : t.nu.atoms()) {
    const double y = (1.0 + pi.dot(atom.x)) / (1.0 + rho.dot(atom.x));
    h += atom.intensity * q_a(std::max(y, 0.0), a);
  }
  return h;
}

DeviationReport asymptotic_deviation(const Vector& pi, const NumeraireSolution& sol, const MarketSpec& m,
                                     std::size_t n_paths, std::uint64_t seed, const DeviationOptions& opts) {
  if (m.segments().size() != 1 || sol.segments.size() != 1) {
    throw InvalidInput("asymptotic_deviation needs a single-triplet market");
  }
  const Triplet t = effective_triplet(m.segments()[0].triplet, sol.segments[0].index);
  const Vector& rho = sol.rho(0);
  DeviationReport rep;
  rep.h = deviation_rate(pi, rho, t, opts.a);
  rep.no_deviation = rep.h <= opts.null_tol;

  const IncrementGenerator gen(m, seed);
  const auto steps = checkpoint_steps(m.clock(), opts.checkpoints);
  const std::size_t J = steps.size();
  std::vector<double> lr(n_paths * J);
  for_paths(n_paths, [&](std::size_t p) {
    Vector dx(m.dim());
    double acc = 0.0;
    std::size_t next = 0;
    for (std::size_t k = 0; k < gen.steps() && next < J; ++k) {
      gen.increment(p, k, dx);
      const double fp = 1.0 + pi.dot(dx);
      const double fr = 1.0 + rho.dot(dx);
      acc += (fp > 0.0 ? std::log(fp) : -kInf) - std::log(fr);
      if (k + 1 == steps[next]) lr[p * J + next++] = acc;
    }
  });

  const auto incr = m.clock_increments();
  std::vector<double> clock_time(gen.steps() + 1, 0.0);
  for (std::size_t k = 0; k < gen.steps(); ++k) clock_time[k + 1] = clock_time[k] + incr[k];

  std::vector<double> col;
  for (std::size_t j = 0; j < J; ++j) {
    col.clear();
    for (std::size_t p = 0; p < n_paths; ++p) col.push_back(lr[p * J + j]);
    rep.times.push_back(m.clock().time(steps[j]));
    rep.H.push_back(rep.h * clock_time[steps[j]]);
    rep.mean_log_ratio.push_back(pairwise_sum(col) / static_cast<double>(n_paths));
    if (rep.no_deviation || rep.H.back() <= 0.0) {
      rep.quantile_normalized.push_back(std::nan(""));
    } else {
      for (double& v : col) v /= rep.H.back();
      rep.quantile_normalized.push_back(sample_quantile(col, opts.quantile));
    }
  }
  if (J == 0) {
    rep.reason = "empty clock";
    return rep;
  }

  if (rep.no_deviation) {
    for (std::size_t p = 0; p < n_paths; ++p) {
      for (std::size_t j = 1; j < J; ++j) {
        rep.max_log_ratio_drift = std::max(rep.max_log_ratio_drift, std::abs(lr[p * J + j] - lr[p * J + j - 1]));
      }
    }
    rep.pass = rep.max_log_ratio_drift <= 1e-8;
    rep.reason = rep.pass ? "no deviation: log-ratio constant across checkpoints"
                          : "no deviation expected but the log-ratio moves";
    return rep;
  }
  rep.final_quantile = rep.quantile_normalized.back();
  if (rep.H.back() < opts.floor) {
    rep.reason = "H at the horizon below the floor";
    return rep;
  }
  rep.pass = rep.final_quantile <= -1.0 + opts.epsilon;
  rep.reason = rep.pass ? "normalized log-ratio quantile at or below -1 + epsilon"
                        : "normalized log-ratio quantile above -1 + epsilon";
  return rep;
}

}  // namespace numeraire
