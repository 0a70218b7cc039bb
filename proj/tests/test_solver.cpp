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

#include "numeraire/rng.hpp"
#include "numeraire/solver.hpp"

#include <doctest.h>

#include <cmath>

using namespace numeraire;

namespace {

Triplet scalar(double b, double c, std::vector<JumpAtom> atoms = {}) {
  Triplet t;
  t.b = Vector::Constant(1, b);
  t.c = Matrix::Constant(1, 1, c);
  t.nu = JumpMeasure(std::move(atoms));
  return t;
}

JumpAtom atom(std::initializer_list<double> x, double lambda) {
  Vector v(static_cast<Eigen::Index>(x.size()));
  Eigen::Index i = 0;
  for (double e : x) v[i++] = e;
  return {v, lambda};
}

Triplet mixed2() {
  Triplet t;
  t.b = Vector{{0.1, 0.05}};
  t.c = Matrix{{0.04, 0.0}, {0.0, 0.02}};
  t.nu = JumpMeasure({atom({-0.3, 0.1}, 0.5), atom({1.5, -0.2}, 0.2)});
  return t;
}

double uniform_in(CounterStream& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

// Root of a decreasing scalar function by bisection.
template <typename F>
double bisect(F f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("growth rate worked example") {
  const auto t = scalar(0.3, 0.2, {atom({2.0}, 0.5)});
  // 0.3 - 0.1 + 0.5 log 3; the atom is a big jump, so no truncation term.
  CHECK(growth_rate(Vector::Ones(1), t) == doctest::Approx(0.2 + 0.5 * std::log(3.0)).epsilon(1e-14));
  CHECK(growth_rate(Vector::Constant(1, -0.5), t) == -kInf);
  CHECK_THROWS_AS(growth_gradient(Vector::Constant(1, -0.5), t), InvalidInput);
}

TEST_CASE("small jumps carry the truncation term") {
  const auto t = scalar(0.0, 0.0, {atom({0.5}, 2.0)});
  const double pi = 0.8;
  CHECK(growth_rate(Vector::Constant(1, pi), t) == doctest::Approx(2.0 * (std::log1p(0.4) - 0.4)));
}

TEST_CASE("gradient matches finite differences and the rel identity") {
  CounterStream rng(11, 0, 0);
  const auto t = mixed2();
  for (int i = 0; i < 50; ++i) {
    const Vector rho{{uniform_in(rng, -0.5, 0.5), uniform_in(rng, -0.5, 0.5)}};
    const Vector pi{{uniform_in(rng, -0.5, 0.5), uniform_in(rng, -0.5, 0.5)}};
    const Vector grad = growth_gradient(rho, t);
    Vector fd(2);
    for (int k = 0; k < 2; ++k) {
      const double h = 1e-6;
      Vector up = rho;
      Vector dn = rho;
      up[k] += h;
      dn[k] -= h;
      fd[k] = (growth_rate(up, t) - growth_rate(dn, t)) / (2.0 * h);
    }
    CHECK((grad - fd).norm() <= 1e-6 * std::max(1.0, grad.norm()));
    const double rel = rel_rate(pi, rho, t);
    CHECK(rel == doctest::Approx(grad.dot(pi - rho)).epsilon(1e-12));
    CHECK(rel_rate(rho, rho, t) == doctest::Approx(0.0));
  }
}

TEST_CASE("growth rate is concave") {
  CounterStream rng(12, 0, 0);
  const auto t = mixed2();
  for (int i = 0; i < 200; ++i) {
    const Vector p{{uniform_in(rng, -1.0, 0.6), uniform_in(rng, -2.0, 2.0)}};
    const Vector q{{uniform_in(rng, -1.0, 0.6), uniform_in(rng, -2.0, 2.0)}};
    const double w = rng.uniform();
    const double gp = growth_rate(p, t);
    const double gq = growth_rate(q, t);
    if (!std::isfinite(gp) || !std::isfinite(gq)) continue;
    CHECK(growth_rate(w * p + (1.0 - w) * q, t) >= w * gp + (1.0 - w) * gq - 1e-12);
  }
}

TEST_CASE("null directions leave the growth rate unchanged") {
  Triplet t;
  t.b = Vector{{0.1, 0.1, 0.0}};
  t.c = Matrix::Zero(3, 3);
  t.c.topLeftCorner(2, 2) = Matrix{{0.05, 0.0}, {0.0, 0.05}};
  t.nu = JumpMeasure({atom({0.3, -0.2, 0.0}, 0.4)});
  const auto n = null_space(t);
  REQUIRE(n.dim() == 1);
  const Vector pi{{0.4, 0.7, 0.0}};
  CHECK(growth_rate(pi + 3.0 * n.basis.col(0), t) == doctest::Approx(growth_rate(pi, t)).epsilon(1e-14));
}

TEST_CASE("diffusion market: rho = c^-1 b") {
  Triplet t;
  t.b = Vector{{0.08, 0.05}};
  t.c = Matrix{{0.04, 0.01}, {0.01, 0.09}};
  const auto s = solve_segment(t, ConstraintSet::full(2));
  const Vector exact = t.c.ldlt().solve(t.b);
  CHECK((s.rho - exact).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(s.g_value == doctest::Approx(0.5 * t.b.dot(exact)));
}

TEST_CASE("Bessel-type drift b = c gives rho = 1") {
  const auto s = solve_segment(scalar(1.0, 1.0), ConstraintSet::full(1));
  CHECK(s.rho[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("binding simplex constraint clamps the scalar optimum") {
  const auto s = solve_segment(scalar(0.5, 0.1), ConstraintSet::simplex(1));
  CHECK(s.rho[0] == doctest::Approx(1.0).epsilon(1e-9));
  const auto free = solve_segment(scalar(0.05, 0.1), ConstraintSet::simplex(1));
  CHECK(free.rho[0] == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("symmetric jumps on [-1, 1]: rho = 0 agrees with a grid search") {
  const auto t = scalar(0.0, 0.0, {atom({0.5}, 1.0), atom({-0.5}, 1.0)});
  ConstraintSet box(Matrix{{1.0}, {-1.0}}, Vector{{1.0, 1.0}}, false);
  const auto s = solve_segment(t, box);
  double best = -kInf;
  double arg = 0.0;
  for (int i = -1000; i <= 1000; ++i) {
    const double p = i / 1000.0;
    const double g = growth_rate(Vector::Constant(1, p), t);
    if (g > best) {
      best = g;
      arg = p;
    }
  }
  CHECK(arg == 0.0);
  CHECK(std::abs(s.rho[0]) < 1e-8);
}

TEST_CASE("scalar jump-diffusion optimum solves the first-order condition") {
  CounterStream rng(13, 0, 0);
  for (int i = 0; i < 20; ++i) {
    const double b = uniform_in(rng, -0.2, 0.4);
    const double c = uniform_in(rng, 0.02, 0.2);
    const double up = uniform_in(rng, 0.1, 2.0);
    const double dn = -uniform_in(rng, 0.1, 0.9);
    const auto t = scalar(b, c, {atom({up}, uniform_in(rng, 0.1, 1.0)), atom({dn}, uniform_in(rng, 0.1, 1.0))});
    // Natural domain: 1 + p up > 0 and 1 + p dn > 0.
    const double lo = -1.0 / up;
    const double hi = -1.0 / dn;
    const double eps = 1e-12;
    const double root = bisect([&](double p) { return growth_gradient(Vector::Constant(1, p), t)[0]; },
                               lo + eps, hi - eps);
    const auto s = solve_segment(t, ConstraintSet::full(1));
    CHECK(s.rho[0] == doctest::Approx(root).epsilon(1e-7));
  }
}

TEST_CASE("psi record worked example") {
  const auto t = scalar(0.3, 0.2, {atom({2.0}, 0.5)});
  const auto p = psi_rho(Vector::Ones(1), t);
  CHECK(p.psi1 == doctest::Approx(0.5));
  CHECK(p.psi2 == doctest::Approx(0.3));
  CHECK(p.psi == doctest::Approx(0.8));
  CHECK(p.psi_hat1 == doctest::Approx(0.2));
  CHECK(p.psi_hat2 == doctest::Approx(0.5));
  CHECK(p.psi_hat3 == doctest::Approx(p.psi2));
}

TEST_CASE("UIP gate and iteration cap") {
  const auto poisson = scalar(1.0, 0.0, {atom({1.0}, 1.0)});
  try {
    solve_segment(poisson, ConstraintSet::long_only(1));
    FAIL("expected UipPresent");
  } catch (const UipPresent& e) {
    CHECK(e.segment() == 0);
    CHECK(e.witness()[0] > 0.0);
  }
  SolveOptions opts;
  opts.max_iterations = 1;
  opts.grad_tol = 1e-15;
  CHECK_THROWS_AS(solve_segment(mixed2(), ConstraintSet::full(2), opts), NonConvergence);
}

TEST_CASE("solve_numeraire: certificate, integrability, and a negative control") {
  const auto clock = OperationalClock::uniform(1.0, 4);
  Triplet second = mixed2();
  second.b = Vector{{0.02, 0.07}};
  MarketSpec m(2, clock, {Segment{0, 2, mixed2()}, Segment{2, 4, second}});
  const auto simplex = ConstraintSet::simplex(2);
  const auto sol = solve_numeraire(m, simplex);
  CHECK(sol.integrable);
  CHECK(sol.rel_cert <= 1e-7);
  CHECK(sol.certificate.pass);
  CHECK(sol.certificate.vertices_checked > 0);

  auto wrong = sol;
  wrong.segments[1].solution.rho = Vector{{0.0, 0.0}};
  const auto cert = verify_solution(wrong, m, simplex, 32);
  CHECK_FALSE(cert.pass);
  CHECK(cert.worst_segment == 1);
  CHECK(cert.max_rel > 1e-3);
}

TEST_CASE("polyhedron vertices and samples") {
  const auto v = polyhedron_vertices(ConstraintSet::simplex(2));
  CHECK(v.size() == 3);
  const auto s = ConstraintSet::simplex(3);
  const auto pts = sample_polyhedron(s, Vector::Constant(3, 0.2), 1.0, 50, 9);
  CHECK(pts.size() == 50);
  for (const auto& p : pts) CHECK(contains(s, p));
  const auto again = sample_polyhedron(s, Vector::Constant(3, 0.2), 1.0, 50, 9);
  CHECK((pts.front() - again.front()).norm() == 0.0);
}
