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

#include "numeraire/demos.hpp"

#include "numeraire/errors.hpp"
#include "numeraire/parallel.hpp"
#include "numeraire/rng.hpp"
#include "numeraire/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>

namespace numeraire {

namespace {

constexpr double kPriceFloor = 1e-6;

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

// Runs the hedge on Brownian increments db (length = steps).
void bessel_path(std::span<const double> db, double* w_end, double* w_min) {
  const std::size_t steps = db.size();
  const double dt = 1.0 / static_cast<double>(steps);
  double s = 1.0, w = 1.0, lowest = 1.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double remaining = 1.0 - static_cast<double>(k) * dt;
    const double root = std::sqrt(remaining);
    const double x = s / root;
    // ∂_x log F = φ(x/√(1-t)) / (√(1-t) Φ(x/√(1-t)))
    const double dlogf = normal_pdf(x) / (root * normal_cdf(x));
    const double s_new = std::max(s + dt / s + db[k], kPriceFloor);
    const double pi = s * dlogf;
    w *= 1.0 + pi * (s_new - s) / s;
    lowest = std::min(lowest, w);
    s = s_new;
  }
  *w_end = w;
  *w_min = lowest;
}

BesselRun summarize(std::size_t steps, std::vector<double> terminal, const std::vector<double>& mins, double target) {
  BesselRun r;
  r.steps = steps;
  std::vector<double> sq(terminal.size());
  r.min = kInf;
  r.max = -kInf;
  for (std::size_t p = 0; p < terminal.size(); ++p) {
    const double e = terminal[p] - target;
    sq[p] = e * e;
    r.max_abs_error = std::max(r.max_abs_error, std::abs(e));
    r.min = std::min(r.min, terminal[p]);
    r.max = std::max(r.max, terminal[p]);
  }
  r.mean = pairwise_sum(terminal) / static_cast<double>(terminal.size());
  r.rms_error = std::sqrt(pairwise_sum(sq) / static_cast<double>(terminal.size()));
  r.min_wealth = *std::min_element(mins.begin(), mins.end());
  r.terminal_wealth = std::move(terminal);
  return r;
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

BesselReport bessel_arbitrage_demo(std::size_t steps, std::size_t n_paths, std::uint64_t seed, double tolerance) {
  if (steps == 0 || n_paths == 0) throw InvalidInput("bessel demo: steps and paths must be positive");
  BesselReport rep;
  rep.target = 1.0 / normal_cdf(1.0);
  rep.tolerance = tolerance;
  const std::size_t fine = 2 * steps;
  const double sd = std::sqrt(1.0 / static_cast<double>(fine));
  std::vector<double> w_base(n_paths), w_fine(n_paths), m_base(n_paths), m_fine(n_paths);
  parallel_for(n_paths, [&](std::size_t p) {
    std::vector<double> db_fine(fine), db(steps);
    for (std::size_t k = 0; k < fine; ++k) db_fine[k] = sd * CounterStream(seed, p, k).normal();
    for (std::size_t k = 0; k < steps; ++k) db[k] = db_fine[2 * k] + db_fine[2 * k + 1];
    bessel_path(db, &w_base[p], &m_base[p]);
    bessel_path(db_fine, &w_fine[p], &m_fine[p]);
  });
  rep.base = summarize(steps, std::move(w_base), m_base, rep.target);
  rep.refined = summarize(fine, std::move(w_fine), m_fine, rep.target);
  rep.all_within = rep.base.max_abs_error <= tolerance;
  rep.rms_ratio = rep.base.rms_error / rep.refined.rms_error;
  rep.max_ratio = rep.base.max_abs_error / rep.refined.max_abs_error;
  // "Halves" with some sampling slack: observed order >= log2(1.8) ≈ 0.85.
  rep.first_order = rep.rms_ratio >= 1.8;
  rep.positive = std::min(rep.base.min_wealth, rep.refined.min_wealth) > 0.0;
  return rep;
}

MarketSpec singular_drift_market(double power, double ratio, double min_gap) {
  if (!(ratio > 0.0 && ratio < 1.0) || !(min_gap > 0.0 && min_gap < 1.0)) {
    throw InvalidInput("singular_drift_market: ratio and min_gap must lie in (0, 1)");
  }
  std::vector<double> times{0.0};
  double gap = 1.0;
  while (gap * ratio >= min_gap) {
    gap *= ratio;
    times.push_back(1.0 - gap);
  }
  times.push_back(1.0);
  OperationalClock clock(times);
  std::vector<Segment> segs;
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    Segment s;
    s.from = k;
    s.to = k + 1;
    s.triplet.b = Vector::Constant(1, std::pow(1.0 - times[k], -power));
    s.triplet.c = Matrix::Identity(1, 1);
    segs.push_back(std::move(s));
  }
  return MarketSpec(1, std::move(clock), std::move(segs));
}

UpbrReport upbr_demo(const MarketSpec& m, const ConstraintSet& c, const std::vector<double>& levels,
                     std::size_t n_paths, std::uint64_t seed, bool require_singular) {
  const NumeraireSolution sol = solve_numeraire(m, c);
  UpbrReport rep;
  rep.integrable = sol.integrable;
  if (require_singular && sol.integrable) throw InvalidInput("upbr demo: the numeraire is integrable on this spec");

  const auto& partials = sol.integrability.partials;
  const std::size_t K = m.clock().intervals();
  for (double n : levels) {
    UpbrLevel lv;
    lv.n = n;
    if (n > 0.0) {
      const auto it = std::find_if(partials.begin(), partials.end(), [n](double v) { return v >= n; });
      lv.active_steps = it == partials.end() ? K : static_cast<std::size_t>(it - partials.begin()) + 1;
    }
    lv.tau = m.clock().time(lv.active_steps);
    rep.levels.push_back(lv);
  }

  const PortfolioSchedule rho = numeraire_schedule(m, sol);
  const IncrementGenerator gen(m, seed);
  const std::size_t L = rep.levels.size();
  std::size_t horizon = 0;
  for (const auto& lv : rep.levels) horizon = std::max(horizon, lv.active_steps);
  std::vector<double> wealth(n_paths * L, 1.0);
  parallel_for((n_paths + 63) / 64, [&](std::size_t chunk) {
    Vector dx(m.dim());
    for (std::size_t p = chunk * 64; p < std::min(n_paths, (chunk + 1) * 64); ++p) {
      double w = 1.0;
      for (std::size_t k = 0; k < horizon; ++k) {
        for (std::size_t l = 0; l < L; ++l) {
          if (rep.levels[l].active_steps == k) wealth[p * L + l] = w;
        }
        gen.increment(p, k, dx);
        const double f = 1.0 + rho[k].dot(dx);
        w = f > 0.0 ? w * f : 0.0;
      }
      for (std::size_t l = 0; l < L; ++l) {
        if (rep.levels[l].active_steps == horizon) wealth[p * L + l] = w;
      }
    }
  });

  std::vector<double> col(n_paths);
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t p = 0; p < n_paths; ++p) col[p] = wealth[p * L + l];
    rep.levels[l].median = sample_quantile(col, 0.5);
    rep.levels[l].p90 = sample_quantile(col, 0.9);
  }
  if (L >= 2) {
    rep.medians_increasing = true;
    for (std::size_t l = 1; l < L; ++l) {
      if (!(rep.levels[l].median > rep.levels[l - 1].median)) rep.medians_increasing = false;
    }
    rep.growth = rep.levels.back().median / rep.levels.front().median;
    rep.last_ratio = rep.levels[L - 1].median / rep.levels[L - 2].median;
    rep.diverging = rep.medians_increasing && L >= 4 && rep.growth > 10.0;
    rep.stabilized = rep.last_ratio < 1.1;
  }
  return rep;
}

}  // namespace numeraire
