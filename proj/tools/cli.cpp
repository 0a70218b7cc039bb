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

#include "cli.hpp"

#include "numeraire/demos.hpp"
#include "numeraire/errors.hpp"
#include "numeraire/simulation.hpp"
#include "numeraire/spec_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace numeraire::cli {

namespace {

constexpr double kTolMin = 1e-14;
constexpr double kTolMax = 1e-2;

struct Loaded {
  SpecDocument doc;
  ConstraintSet constraints;
  std::string constraints_label;
};

Loaded load(const RunConfig& cfg) {
  if (cfg.spec_path.empty()) throw InvalidInput("--spec is required for '" + cfg.command + "'");
  SpecDocument doc = load_spec(cfg.spec_path);
  const int d = doc.market.dim();
  if (!cfg.constraints.empty()) {
    ConstraintSet c = load_constraints(cfg.constraints, d);
    return {std::move(doc), std::move(c), cfg.constraints};
  }
  if (doc.constraints) {
    ConstraintSet c = *doc.constraints;
    return {std::move(doc), std::move(c), "spec"};
  }
  return {std::move(doc), ConstraintSet::full(d), "unconstrained"};
}

SolveOptions solve_options(const RunConfig& cfg) {
  SolveOptions o;
  o.approx_n_max = cfg.approx_n_max;
  o.cert_dirs = cfg.cert_dirs;
  o.cert_seed = cfg.seed;
  for (const auto& [k, v] : cfg.tol_overrides) {
    if (k == "grad_tol") o.grad_tol = v;
    else if (k == "uip_tol") o.uip_tol = v;
    else if (k == "approx_tol") o.approx_tol = v;
    else if (k == "cert_tol") o.cert_tol = v;
    else if (k == "domain_guard") o.domain_guard = v;
  }
  return o;
}

Document constraints_document(const Loaded& l) {
  Document d;
  d["source"] = l.constraints_label;
  d["rows"] = l.constraints.rows();
  d["is_cone"] = l.constraints.is_cone;
  return d;
}

Document base_report(const RunConfig& cfg) {
  Document r = report_header();
  r["command"] = cfg.command == "demo" ? "demo " + cfg.demo : cfg.command;
  r["seed"] = cfg.seed;
  return r;
}

void finish(RunResult& res, bool pass) {
  res.exit_code = pass ? kExitPass : kExitFailure;
  res.report["status"] = pass ? "pass" : "fail";
}

// Shared by solve, verify and simulate: UIP and nonconvergence become exit 2
// with a structured failure block; anything else propagates.
std::optional<NumeraireSolution> try_solve(const Loaded& l, const SolveOptions& o, RunResult& res) {
  try {
    return solve_numeraire(l.doc.market, l.constraints, o);
  } catch (const UipPresent& e) {
    Document f;
    f["kind"] = "uip";
    f["segment"] = e.segment();
    f["witness"] = to_document(e.witness());
    res.report["failure"] = std::move(f);
  } catch (const NonConvergence& e) {
    Document f;
    f["kind"] = "nonconvergence";
    f["segment"] = e.segment();
    f["message"] = e.what();
    Document trace = Document::array();
    for (const auto& s : e.trace()) {
      Document step;
      step["n"] = s.n;
      step["rho"] = to_document(s.rho);
      trace.push_back(std::move(step));
    }
    f["approx_trace"] = std::move(trace);
    res.report["failure"] = std::move(f);
  }
  finish(res, false);
  return std::nullopt;
}

void cmd_validate(const RunConfig& cfg, RunResult& res) {
  const Loaded l = load(cfg);
  Document segs = Document::array();
  bool ok = true;
  for (const auto& s : l.doc.market.segments()) {
    const ValidationReport v = validate_triplet(s.triplet);
    ok = ok && v.ok();
    Document e = to_document(v);
    e["from"] = s.from;
    e["to"] = s.to;
    segs.push_back(std::move(e));
  }
  res.report["d"] = l.doc.market.dim();
  res.report["intervals"] = l.doc.market.clock().intervals();
  res.report["segments"] = std::move(segs);
  finish(res, ok);
}

void cmd_nuip(const RunConfig& cfg, RunResult& res) {
  const Loaded l = load(cfg);
  const double tol = solve_options(cfg).uip_tol;
  res.report["constraints"] = constraints_document(l);
  Document segs = Document::array();
  bool any = false;
  const int d = l.doc.market.dim();
  for (std::size_t s = 0; s < l.doc.market.segments().size(); ++s) {
    Triplet t = l.doc.market.segments()[s].triplet;
    if (!t.nu.expanded()) t = effective_triplet(t, 1u);
    const NuipReport r = detect_uip(t, intersect(l.constraints, natural_constraints(t.nu, d)), tol);
    any = any || r.uip_exists;
    Document e;
    e["segment"] = s;
    e.update(to_document(r));
    segs.push_back(std::move(e));
  }
  res.report["uip_exists"] = any;
  res.report["segments"] = std::move(segs);
  finish(res, !any);
}

void cmd_solve(const RunConfig& cfg, RunResult& res, bool verify) {
  const Loaded l = load(cfg);
  const SolveOptions o = solve_options(cfg);
  res.report["constraints"] = constraints_document(l);
  const auto sol = try_solve(l, o, res);
  if (!sol) return;
  res.report["solution"] = to_document(*sol);
  bool pass = sol->certificate.pass && sol->integrable;
  if (verify) {
    const Certificate c = verify_solution(*sol, l.doc.market, l.constraints, cfg.cert_dirs, cfg.seed + 1, o.cert_tol);
    res.report["verification"] = to_document(c);
    pass = pass && c.pass;
  }
  finish(res, pass);
}

void write_csv(const std::string& path, const PathBundle& b, const WealthEnsemble& w_rho,
               const std::optional<WealthEnsemble>& w_pi) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << "path,step,time";
  for (int i = 0; i < b.d; ++i) out << ",dX" << i;
  out << ",W_rho";
  if (w_pi) out << ",W_pi";
  out << "\n";
  char buf[32];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (std::size_t p = 0; p < b.n_paths; ++p) {
    for (std::size_t k = 0; k < b.steps(); ++k) {
      out << p << "," << k + 1 << "," << num(b.times[k + 1]);
      for (int i = 0; i < b.d; ++i) out << "," << num(b.increments[p](i, static_cast<Eigen::Index>(k)));
      const auto& wr = w_rho.paths[p];
      out << "," << (wr.empty() ? std::string("nan") : num(wr[k + 1]));
      if (w_pi) {
        const auto& wp = w_pi->paths[p];
        out << "," << (wp.empty() ? std::string("nan") : num(wp[k + 1]));
      }
      out << "\n";
    }
  }
}

Document terminal_stats(const WealthEnsemble& w) {
  std::vector<double> t;
  for (const auto& p : w.paths) {
    if (!p.empty()) t.push_back(p.back());
  }
  Document d;
  d["solvent_paths"] = t.size();
  d["bankrupt_paths"] = w.bankrupt.size();
  if (!t.empty()) {
    d["mean"] = real(pairwise_sum(t) / static_cast<double>(t.size()));
    d["median"] = real(sample_quantile(t, 0.5));
    d["p10"] = real(sample_quantile(t, 0.1));
    d["p90"] = real(sample_quantile(t, 0.9));
  }
  return d;
}

void cmd_simulate(const RunConfig& cfg, RunResult& res) {
  const Loaded l = load(cfg);
  const MarketSpec& m = l.doc.market;
  const SolveOptions o = solve_options(cfg);
  const std::size_t n_paths = cfg.n_paths.value_or(1000);
  res.report["constraints"] = constraints_document(l);
  res.report["n_paths"] = n_paths;
  const auto sol = try_solve(l, o, res);
  if (!sol) return;
  res.report["rho"] = Document::array();
  for (const auto& s : sol->segments) res.report["rho"].push_back(to_document(s.solution.rho));

  const PathBundle bundle = simulate_paths(m, n_paths, cfg.seed);
  res.report["warnings"] = bundle.warnings;
  res.report["jump_events"] = bundle.jumps.size();
  const WealthEnsemble w_rho = wealth_from_increments(numeraire_schedule(m, *sol), bundle);
  res.report["numeraire_wealth"] = terminal_stats(w_rho);
  bool pass = w_rho.bankrupt.empty() && sol->certificate.pass;

  std::optional<WealthEnsemble> w_pi;
  if (!cfg.pi.empty()) {
    if (static_cast<int>(cfg.pi.size()) != m.dim()) throw InvalidInput("--pi needs " + std::to_string(m.dim()) + " entries");
    const Vector pi = Eigen::Map<const Vector>(cfg.pi.data(), static_cast<Eigen::Index>(cfg.pi.size()));
    const PortfolioSchedule sched = constant_schedule(m, pi);
    w_pi = wealth_from_increments(sched, bundle);
    res.report["pi"] = to_document(pi);
    res.report["pi_wealth"] = terminal_stats(*w_pi);
    const SupermartingaleReport sm = supermartingale_test(sched, *sol, m, n_paths, cfg.seed);
    res.report["supermartingale"] = to_document(sm);
    pass = pass && sm.pass;
  }
  if (!cfg.csv_path.empty()) write_csv(cfg.csv_path, bundle, w_rho, w_pi);
  finish(res, pass);
}

void cmd_demo(const RunConfig& cfg, RunResult& res) {
  if (cfg.demo == "bessel") {
    const BesselReport r = bessel_arbitrage_demo(cfg.steps, cfg.n_paths.value_or(200), cfg.seed);
    res.report["bessel"] = to_document(r);
    finish(res, r.all_within && r.first_order && r.positive);
    return;
  }
  if (cfg.demo == "upbr") {
    const std::vector<double> levels{2, 4, 8, 16};
    const std::size_t n_paths = cfg.n_paths.value_or(2000);
    const MarketSpec m = cfg.spec_path.empty() ? singular_drift_market() : load_spec(cfg.spec_path).market;
    const UpbrReport r = upbr_demo(m, ConstraintSet::full(m.dim()), levels, n_paths, cfg.seed);
    const UpbrReport control =
        upbr_demo(singular_drift_market(0.25), ConstraintSet::full(1), levels, n_paths, cfg.seed, false);
    res.report["upbr"] = to_document(r);
    res.report["control"] = to_document(control);
    finish(res, r.diverging && control.stabilized);
    return;
  }
  throw InvalidInput("unknown demo '" + cfg.demo + "' (expected bessel or upbr)");
}

}  // namespace

const std::vector<std::string>& tolerance_keys() {
  static const std::vector<std::string> keys{"grad_tol", "uip_tol", "approx_tol", "cert_tol", "domain_guard"};
  return keys;
}

std::pair<std::string, double> parse_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw InvalidInput("--tol-override expects K=V, got '" + text + "'");
  const std::string key = text.substr(0, eq);
  const auto& keys = tolerance_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw InvalidInput("unknown tolerance '" + key + "'");
  double v = 0.0;
  try {
    std::size_t used = 0;
    v = std::stod(text.substr(eq + 1), &used);
    if (used != text.size() - eq - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw InvalidInput("tolerance '" + key + "' needs a number");
  }
  if (!(v >= kTolMin && v <= kTolMax)) throw InvalidInput("tolerance '" + key + "' outside [1e-14, 1e-2]");
  return {key, v};
}

RunResult run(const RunConfig& cfg) {
  RunResult res;
  res.report = base_report(cfg);
  try {
    if (cfg.command == "validate") cmd_validate(cfg, res);
    else if (cfg.command == "nuip") cmd_nuip(cfg, res);
    else if (cfg.command == "solve") cmd_solve(cfg, res, false);
    else if (cfg.command == "verify") cmd_solve(cfg, res, true);
    else if (cfg.command == "simulate") cmd_simulate(cfg, res);
    else if (cfg.command == "demo") cmd_demo(cfg, res);
    else throw InvalidInput("unknown command '" + cfg.command + "'");
  } catch (const InvalidInput& e) {
    res.exit_code = kExitUsage;
    res.error = e.what();
  } catch (const InfeasibleSet& e) {
    res.exit_code = kExitUsage;
    res.error = std::string("infeasible constraints: ") + e.what();
  } catch (const Bankruptcy& e) {
    res.report["failure"] = Document{{"kind", "bankruptcy"}, {"message", e.what()}};
    finish(res, false);
  } catch (const Error& e) {
    res.exit_code = kExitUsage;
    res.error = e.what();
  }
  return res;
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numeraire portfolio toolkit: arbitrage detection, growth-optimal portfolios, simulation."};
  app.set_config("--config", "", "read options from a TOML/INI file");
  RunConfig cfg;
  std::vector<std::string> overrides;
  std::size_t n_paths = 0;
  app.add_option("--spec", cfg.spec_path, "market spec JSON");
  app.add_option("--constraints", cfg.constraints, "preset (unconstrained, long-only, simplex) or JSON path");
  app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  auto* paths_opt = app.add_option("--paths", n_paths, "Monte Carlo paths");
  app.add_option("--out", cfg.out_path, "report path (stdout when absent)");
  app.add_option("--tol-override", overrides, "K=V, K in grad_tol, uip_tol, approx_tol, cert_tol, domain_guard");
  app.add_option("--pi", cfg.pi, "comparison portfolio for simulate")->delimiter(',');
  app.add_option("--csv", cfg.csv_path, "path dump for simulate");
  app.add_option("--steps", cfg.steps, "time steps for demo bessel")->capture_default_str();
  app.add_option("--approx-n-max", cfg.approx_n_max, "last index of the approximating ladder")->capture_default_str();
  app.add_option("--cert-dirs", cfg.cert_dirs, "random directions per segment in the certificate")->capture_default_str();
  app.require_subcommand(1);
  const std::pair<const char*, const char*> commands[] = {
      {"validate", "check each segment's triplet"},
      {"nuip", "look for unbounded increasing profits"},
      {"solve", "numeraire portfolio per segment, with integrability and certificate"},
      {"verify", "solve, then re-check rel(pi|rho) <= 0 on fresh random portfolios"},
      {"simulate", "Monte Carlo wealth of the numeraire (and of --pi against it)"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();
  auto* demo = app.add_subcommand("demo", "bessel | upbr")->fallthrough();
  demo->add_option("name", cfg.demo, "demo name")->required()->check(CLI::IsMember({"bessel", "upbr"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (paths_opt->count() > 0) cfg.n_paths = n_paths;
  try {
    for (const auto& o : overrides) cfg.tol_overrides.insert(parse_override(o));
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  RunResult res = run(cfg);
  if (res.exit_code == kExitUsage) {
    err << "error: " << res.error << "\n";
    return kExitUsage;
  }
  const std::string text = emit_report(res.report);
  if (cfg.out_path.empty()) {
    out << text;
  } else {
    std::ofstream f(cfg.out_path, std::ios::binary);
    if (!f || !(f << text)) {
      err << "error: cannot write '" << cfg.out_path << "'\n";
      return kExitUsage;
    }
  }
  return res.exit_code;
}

}  // namespace numeraire::cli
