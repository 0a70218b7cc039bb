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

#include "numeraire/solver.hpp"

#include "numeraire/lp.hpp"
#include "numeraire/parallel.hpp"
#include "numeraire/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace numeraire {

namespace {

constexpr int kMaxHalvings = 80;
constexpr double kMinStep = 1e-12;
constexpr double kMaxStep = 1e12;
constexpr double kFlatTol = 1e-12;
constexpr double kInteriorMargin = 1e-3;

bool small(const Vector& x) { return x.norm() <= 1.0; }

// Feasible set in reduced coordinates y (π = Q y): C rows and the guarded
// natural constraints 1 + π^T x_j >= guard.
ConstraintSet reduced_set(const Triplet& t, const ConstraintSet& c, const Matrix& q, double guard) {
  const auto& atoms = t.nu.atoms();
  const Eigen::Index m = c.rows() + static_cast<Eigen::Index>(atoms.size());
  Matrix a(m, q.cols());
  Vector u(m);
  if (c.rows() > 0) {
    a.topRows(c.rows()) = c.A * q;
    u.head(c.rows()) = c.u;
  }
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    const auto r = c.rows() + static_cast<Eigen::Index>(j);
    a.row(r) = -(atoms[j].x.transpose() * q);
    u[r] = 1.0 - guard;
  }
  return ConstraintSet(std::move(a), std::move(u), false);
}

double min_wealth_factor(const Vector& pi, const Triplet& t) {
  double m = kInf;
  for (const auto& a : t.nu.atoms()) m = std::min(m, 1.0 + pi.dot(a.x));
  return m;
}

// Point of the reduced set maximizing min_j (1 + π^T x_j), capped at 1.
std::optional<Vector> interior_point(const Triplet& t, const ConstraintSet& c, const Matrix& q) {
  const auto& atoms = t.nu.atoms();
  const Eigen::Index r = q.cols();
  lp::Problem p;
  p.objective = Vector::Zero(r + 1);
  p.objective[r] = 1.0;
  const Eigen::Index m = c.rows() + static_cast<Eigen::Index>(atoms.size());
  p.rows = Matrix::Zero(m, r + 1);
  p.rhs = Vector::Zero(m);
  if (c.rows() > 0) {
    p.rows.topLeftCorner(c.rows(), r) = c.A * q;
    p.rhs.head(c.rows()) = c.u;
  }
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    const auto row = c.rows() + static_cast<Eigen::Index>(j);
    p.rows.block(row, 0, 1, r) = -(atoms[j].x.transpose() * q);
    p.rows(row, r) = 1.0;
    p.rhs[row] = 1.0;
  }
  p.senses.assign(static_cast<std::size_t>(m), lp::Sense::LessEq);
  p.lower = Vector::Constant(r + 1, -kInf);
  p.upper = Vector::Constant(r + 1, kInf);
  p.upper[r] = 1.0;
  const lp::Result res = lp::maximize(p);
  if (res.status != lp::Status::Optimal || res.value <= 0.0) return std::nullopt;
  return Vector(res.x.head(r));
}

SegmentSolution optimize(const Triplet& t, const ConstraintSet& c, const SolveOptions& opts, std::size_t segment) {
  const Eigen::Index d = t.dim();
  const NullSpace ns = null_space(t);
  const Matrix& q = ns.complement_basis;
  SegmentSolution out;
  if (q.cols() == 0) {
    out.rho = Vector::Zero(d);
    if (!contains(c, out.rho)) throw InfeasibleSet("constraint set misses the null investments");
    out.g_value = 0.0;
    return out;
  }
  const ConstraintSet fy = reduced_set(t, c, q, opts.domain_guard);

  Vector y = opts.start ? Vector(q.transpose() * *opts.start) : Vector::Zero(q.cols());
  y = project(fy, y);
  if (!t.nu.atoms().empty() && min_wealth_factor(q * y, t) < kInteriorMargin) {
    if (auto yi = interior_point(t, c, q)) {
      if (min_wealth_factor(q * *yi, t) > min_wealth_factor(q * y, t)) y = *yi;
    }
  }

  auto objective = [&](const Vector& yy) { return growth_rate(q * yy, t); };
  auto gradient = [&](const Vector& yy) { return Vector(q.transpose() * growth_gradient(q * yy, t)); };

  double f = objective(y);
  if (!std::isfinite(f)) throw InfeasibleSet("no feasible portfolio with positive wealth factors");
  Vector grad = gradient(y);
  double alpha = 1.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const double pg = (project(fy, y + grad) - y).norm();
    out.iterations = it;
    out.projected_gradient_norm = pg;
    if (pg <= opts.grad_tol) break;

    double a = alpha;
    bool accepted = false;
    Vector yt;
    double ft = -kInf;
    for (int h = 0; h < kMaxHalvings; ++h) {
      yt = project(fy, y + a * grad);
      ft = objective(yt);
      if (std::isfinite(ft) && ft >= f + opts.armijo * grad.dot(yt - y)) {
        accepted = true;
        break;
      }
      a *= 0.5;
    }
    const Vector step = accepted ? Vector(yt - y) : Vector();
    if (!accepted || step.norm() <= 1e-15 * (1.0 + y.norm())) {
      // No representable ascent left: accept if the stationarity residual is
      // at the rounding level of the gradient.
      const double scale = 1.0 + grad.norm() + q.transpose().cwiseAbs().rowwise().sum().maxCoeff();
      if (pg <= 1e-7 * scale) break;
      throw NonConvergence("line search failed on segment " + std::to_string(segment) +
                               " (projected gradient " + std::to_string(pg) + ")",
                           segment, {});
    }
    const Vector g_new = gradient(yt);
    const double sy = step.dot(g_new - grad);
    alpha = sy < 0.0 ? std::clamp(step.squaredNorm() / -sy, kMinStep, kMaxStep) : std::min(2.0 * a, kMaxStep);
    y = yt;
    f = ft;
    grad = g_new;
    if (it + 1 == opts.max_iterations) {
      throw NonConvergence("iteration cap reached on segment " + std::to_string(segment), segment, {});
    }
  }

  out.rho = q * y;
  out.g_value = f;
  Matrix h = t.c;
  for (const auto& atom : t.nu.atoms()) {
    const double w = 1.0 + out.rho.dot(atom.x);
    h += atom.intensity * atom.x * atom.x.transpose() / (w * w);
  }
  const Matrix hr = q.transpose() * h * q;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (hr + hr.transpose()));
  const double top = es.eigenvalues().maxCoeff();
  out.flat_directions = es.eigenvalues().minCoeff() <= kFlatTol * (top + 1.0);
  return out;
}

void gate_uip(const Triplet& t, const ConstraintSet& c, double tol, std::size_t segment) {
  const ConstraintSet cc = intersect(c, natural_constraints(t.nu, static_cast<int>(t.dim())));
  const NuipReport r = detect_uip(t, cc, tol);
  if (r.uip_exists) throw UipPresent(segment, *r.witness);
}

}  // namespace

double growth_rate(const Vector& pi, const Triplet& t) {
  double g = pi.dot(t.b) - 0.5 * pi.dot(t.c * pi);
  for (const auto& a : t.nu.atoms()) {
    const double e = pi.dot(a.x);
    if (!(1.0 + e > 0.0)) return -kInf;
    g += a.intensity * (std::log1p(e) - (small(a.x) ? e : 0.0));
  }
  return g;
}

Vector growth_gradient(const Vector& pi, const Triplet& t) {
  Vector g = t.b - t.c * pi;
  for (const auto& a : t.nu.atoms()) {
    const double w = 1.0 + pi.dot(a.x);
    if (!(w > 0.0)) throw InvalidInput("growth_gradient: portfolio outside the natural constraints");
    g += a.intensity * (1.0 / w - (small(a.x) ? 1.0 : 0.0)) * a.x;
  }
  return g;
}

double rel_rate(const Vector& pi, const Vector& rho, const Triplet& t) {
  const Vector diff = pi - rho;
  double r = diff.dot(t.b) - diff.dot(t.c * rho);
  for (const auto& a : t.nu.atoms()) {
    const double w = 1.0 + rho.dot(a.x);
    if (!(w > 0.0)) throw InvalidInput("rel_rate: reference portfolio outside the natural constraints");
    // (1+π^T x)/(1+ρ^T x) - 1 = (π-ρ)^T x / (1+ρ^T x)
    const double e = diff.dot(a.x);
    r += a.intensity * (e / w - (small(a.x) ? e : 0.0));
  }
  return std::isnan(r) ? kInf : r;
}

PsiRecord psi_rho(const Vector& rho, const Triplet& t) {
  PsiRecord p;
  p.psi2 = rho.dot(t.b);
  p.psi_hat1 = rho.dot(t.c * rho);
  for (const auto& a : t.nu.atoms()) {
    const double e = rho.dot(a.x);
    if (e > 1.0) p.psi1 += a.intensity;
    const double big_x = small(a.x) ? 0.0 : 1.0;
    const double big_e = std::abs(e) > 1.0 ? 1.0 : 0.0;
    p.psi2 += a.intensity * e * (big_x - big_e);
    p.psi_hat2 += a.intensity * std::min(1.0, e * e);
  }
  p.psi = p.psi1 + std::abs(p.psi2);
  p.psi_hat3 = p.psi2;
  return p;
}

SegmentSolution solve_segment(const Triplet& t, const ConstraintSet& c, const SolveOptions& opts) {
  if (c.dim() != t.dim()) throw InvalidInput("solve_segment: constraint dimension differs from triplet");
  gate_uip(t, c, opts.uip_tol, 0);
  return optimize(t, c, opts, 0);
}

Triplet effective_triplet(const Triplet& t, ApproxIndex index) {
  if (!t.nu.density() || t.nu.index() == index) return t;
  Triplet out = t;
  out.nu = t.nu.at_index(index);
  return out;
}

namespace {

SegmentResult solve_one(const Triplet& raw, const ConstraintSet& c, const SolveOptions& opts, std::size_t segment) {
  const ValidationReport v = validate_triplet(raw);
  if (!v.ok()) throw InvalidInput("segment " + std::to_string(segment) + ": " + v.failures.front());
  Triplet t = raw;
  t.c = clip_psd(raw.c);
  SegmentResult res;
  if (t.nu.integrates_log() && t.nu.expanded()) {
    gate_uip(t, c, opts.uip_tol, segment);
    res.solution = optimize(t, c, opts, segment);
    res.index = t.nu.index();
    res.psi = psi_rho(res.solution.rho, t);
    return res;
  }
  // Approximating ladder. Atom locations do not depend on n and the weights
  // stay positive, so one UIP check covers every rung.
  gate_uip(effective_triplet(t, 1u), c, opts.uip_tol, segment);
  SolveOptions rung = opts;
  for (unsigned n = 1; n <= opts.approx_n_max; n *= 2) {
    const Triplet tn = effective_triplet(t, n);
    SegmentSolution s = optimize(tn, c, rung, segment);
    res.approx_trace.push_back({n, s.rho});
    rung.start = s.rho;
    const bool settled = res.approx_trace.size() >= 2 &&
                         (s.rho - res.approx_trace[res.approx_trace.size() - 2].rho).cwiseAbs().maxCoeff() <=
                             opts.approx_tol;
    if (settled) {
      res.solution = std::move(s);
      res.index = n;
      res.psi = psi_rho(res.solution.rho, tn);
      return res;
    }
    if (n > opts.approx_n_max / 2) break;
  }
  throw NonConvergence("approximating sequence did not settle by n = " + std::to_string(opts.approx_n_max) +
                           " on segment " + std::to_string(segment),
                       segment, res.approx_trace);
}

}  // namespace

NumeraireSolution solve_numeraire(const MarketSpec& m, const ConstraintSet& c, const SolveOptions& opts) {
  if (c.dim() != m.dim()) throw InvalidInput("solve_numeraire: constraint dimension differs from market");
  NumeraireSolution sol;
  const auto& segs = m.segments();
  sol.segments.resize(segs.size());
  parallel_for(segs.size(), [&](std::size_t s) { sol.segments[s] = solve_one(segs[s].triplet, c, opts, s); });

  const auto& clock = m.clock();
  std::vector<double> psi(clock.intervals());
  for (std::size_t k = 0; k < psi.size(); ++k) psi[k] = sol.segments[m.segment_of(k)].psi.psi;
  const std::vector<double> inc = m.clock_increments();
  ClockIntegralOptions co;
  co.increments = inc;
  co.declared_divergent = m.declared_divergent();
  sol.integrability = clock_integral(psi, clock, co);
  sol.integrable = !sol.integrability.diverged;

  sol.certificate = verify_solution(sol, m, c, opts.cert_dirs, opts.cert_seed, opts.cert_tol);
  sol.rel_cert = sol.certificate.max_rel;
  return sol;
}

std::vector<Vector> polyhedron_vertices(const ConstraintSet& p, std::size_t max_subsets) {
  const auto m = static_cast<std::size_t>(p.rows());
  const auto d = static_cast<std::size_t>(p.dim());
  std::vector<Vector> out;
  if (d == 0 || m < d) return out;
  // C(m, d) with early exit once the budget is exceeded.
  double count = 1.0;
  for (std::size_t i = 0; i < d; ++i) count = count * static_cast<double>(m - i) / static_cast<double>(i + 1);
  if (count > static_cast<double>(max_subsets)) return out;

  std::vector<std::size_t> idx(d);
  for (std::size_t i = 0; i < d; ++i) idx[i] = i;
  Matrix a(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  Vector u(static_cast<Eigen::Index>(d));
  while (true) {
    for (std::size_t i = 0; i < d; ++i) {
      a.row(static_cast<Eigen::Index>(i)) = p.A.row(static_cast<Eigen::Index>(idx[i]));
      u[static_cast<Eigen::Index>(i)] = p.u[static_cast<Eigen::Index>(idx[i])];
    }
    Eigen::FullPivLU<Matrix> lu(a);
    if (lu.rank() == static_cast<Eigen::Index>(d)) {
      const Vector v = lu.solve(u);
      if (v.allFinite() && contains(p, v, 1e-9 * (1.0 + v.cwiseAbs().maxCoeff()))) {
        const bool dup = std::any_of(out.begin(), out.end(), [&](const Vector& w) {
          return (w - v).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + v.cwiseAbs().maxCoeff());
        });
        if (!dup) out.push_back(v);
      }
    }
    std::size_t i = d;
    while (i > 0 && idx[i - 1] == m - d + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < d; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

std::vector<Vector> sample_polyhedron(const ConstraintSet& p, const Vector& center, double radius, int count,
                                      std::uint64_t seed, std::uint64_t stream) {
  const Eigen::Index d = p.dim();
  Vector lo = center.array() - radius;
  Vector hi = center.array() + radius;
  if (p.rows() > 0) {
    // Tighten the box with coordinate bounds of the polyhedron where finite.
    for (Eigen::Index i = 0; i < d; ++i) {
      for (double sign : {1.0, -1.0}) {
        lp::Problem prob;
        prob.objective = Vector::Zero(d);
        prob.objective[i] = sign;
        prob.rows = p.A;
        prob.rhs = p.u;
        prob.senses.assign(static_cast<std::size_t>(p.rows()), lp::Sense::LessEq);
        const lp::Result r = lp::maximize(prob);
        if (r.status == lp::Status::Infeasible) return {};
        if (r.status != lp::Status::Optimal) continue;
        if (sign > 0) {
          hi[i] = std::min(hi[i], r.value);
          lo[i] = std::min(lo[i], hi[i]);
        } else {
          lo[i] = std::max(lo[i], -r.value);
          hi[i] = std::max(hi[i], lo[i]);
        }
      }
    }
  }
  std::vector<Vector> out;
  CounterStream rng(seed, stream, 0, 7);
  const long max_tries = 2000L * std::max(count, 1);
  for (long tries = 0; tries < max_tries && static_cast<int>(out.size()) < count; ++tries) {
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = lo[i] + (hi[i] - lo[i]) * rng.uniform();
    if (contains(p, v, 0.0)) out.push_back(std::move(v));
  }
  return out;
}

Certificate verify_solution(const NumeraireSolution& sol, const MarketSpec& m, const ConstraintSet& c, int n_dirs,
                            std::uint64_t seed, double tol) {
  const auto& segs = m.segments();
  if (sol.segments.size() != segs.size()) throw InvalidInput("verify_solution: segment count differs from market");
  Certificate cert;
  cert.segment_max.assign(segs.size(), -kInf);
  std::vector<std::size_t> nv(segs.size()), ns(segs.size());
  std::vector<Vector> worst(segs.size());
  parallel_for(segs.size(), [&](std::size_t s) {
    const Triplet t = effective_triplet(segs[s].triplet, sol.segments[s].index);
    const Vector& rho = sol.segments[s].solution.rho;
    const ConstraintSet p = intersect(c, natural_constraints(t.nu, m.dim()));
    double best = rel_rate(rho, rho, t);
    worst[s] = rho;
    auto consider = [&](const Vector& pi) {
      const double r = rel_rate(pi, rho, t);
      if (r > best) {
        best = r;
        worst[s] = pi;
      }
    };
    const auto verts = polyhedron_vertices(p);
    for (const auto& v : verts) consider(v);
    const double radius = 1.0 + 2.0 * rho.cwiseAbs().maxCoeff();
    const auto samples = sample_polyhedron(p, rho, radius, n_dirs, seed, s);
    for (const auto& v : samples) consider(v);
    nv[s] = verts.size();
    ns[s] = samples.size();
    cert.segment_max[s] = best;
  });
  for (std::size_t s = 0; s < segs.size(); ++s) {
    cert.vertices_checked += nv[s];
    cert.samples_checked += ns[s];
    if (cert.segment_max[s] > cert.max_rel) {
      cert.max_rel = cert.segment_max[s];
      cert.worst_segment = s;
      cert.worst_pi = worst[s];
    }
  }
  cert.pass = cert.max_rel <= tol;
  return cert;
}

}  // namespace numeraire
