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

#include "numeraire/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace numeraire {

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"+inf\"" : "\"-inf\"";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write(const Document& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case Document::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& item : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Document(item.key()).dump() + ": ";
        write(item.value(), out, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Document::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Flat numeric arrays stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const Document& e) { return e.is_primitive(); });
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write(j[i], out, depth + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        write(j[i], out, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case Document::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

Document reals(const std::vector<double>& v) {
  Document a = Document::array();
  for (double x : v) a.push_back(real(x));
  return a;
}

Document trace_document(const std::vector<ApproxStep>& trace) {
  Document a = Document::array();
  for (const auto& s : trace) {
    Document e;
    e["n"] = s.n;
    e["rho"] = to_document(s.rho);
    a.push_back(std::move(e));
  }
  return a;
}

}  // namespace

Document real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return v;
}

Document report_header() {
  Document d;
  d["schema"] = kReportSchema;
  return d;
}

std::string emit_report(const Document& doc) {
  std::string out;
  write(doc, out, 0);
  out += "\n";
  return out;
}

Document to_document(const Vector& v) {
  Document a = Document::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(real(v[i]));
  return a;
}

Document to_document(const ValidationReport& r) {
  Document d;
  d["ok"] = r.ok();
  d["dimensions_ok"] = r.dimensions_ok;
  d["symmetric"] = r.symmetric;
  d["psd"] = r.psd;
  d["min_eigenvalue"] = real(r.min_eigenvalue);
  d["intensities_positive"] = r.intensities_positive;
  d["atoms_nonzero"] = r.atoms_nonzero;
  d["big_jump_intensity"] = real(r.big_jump_intensity);
  d["big_jump_finite"] = r.big_jump_finite;
  d["integrates_log"] = r.integrates_log;
  d["clock_jump_consistent"] = r.clock_jump_consistent;
  d["failures"] = r.failures;
  return d;
}

Document to_document(const ArbitrageConditions& c) {
  Document d;
  d["diffusion_free"] = c.diffusion_free;
  d["no_negative_jumps"] = c.no_negative_jumps;
  d["drift_nonnegative"] = c.drift_nonnegative;
  d["outside_null"] = c.outside_null;
  d["diffusion_norm"] = real(c.diffusion_norm);
  d["min_jump_exposure"] = real(c.min_jump_exposure);
  d["truncated_drift"] = real(c.truncated_drift);
  d["null_distance"] = real(c.null_distance);
  if (!c.note.empty()) d["note"] = c.note;
  return d;
}

Document to_document(const NuipReport& r) {
  Document d;
  d["uip_exists"] = r.uip_exists;
  d["lp_status"] = r.lp_status;
  d["lp_value"] = real(r.lp_value);
  if (r.witness) {
    d["witness"] = to_document(*r.witness);
    d["checks"] = to_document(r.checks);
    d["ia_margin"] = real(r.ia_margin);
  }
  return d;
}

Document to_document(const PsiRecord& p) {
  Document d;
  d["psi1"] = real(p.psi1);
  d["psi2"] = real(p.psi2);
  d["psi"] = real(p.psi);
  d["psi_hat1"] = real(p.psi_hat1);
  d["psi_hat2"] = real(p.psi_hat2);
  d["psi_hat3"] = real(p.psi_hat3);
  return d;
}

Document to_document(const Certificate& c) {
  Document d;
  d["pass"] = c.pass;
  d["max_rel"] = real(c.max_rel);
  d["worst_segment"] = c.worst_segment;
  d["worst_pi"] = to_document(c.worst_pi);
  d["vertices_checked"] = c.vertices_checked;
  d["samples_checked"] = c.samples_checked;
  return d;
}

Document to_document(const NumeraireSolution& s) {
  Document d;
  Document segs = Document::array();
  for (std::size_t i = 0; i < s.segments.size(); ++i) {
    const auto& r = s.segments[i];
    Document e;
    e["segment"] = i;
    e["rho"] = to_document(r.solution.rho);
    e["g_value"] = real(r.solution.g_value);
    e["iterations"] = r.solution.iterations;
    e["projected_gradient_norm"] = real(r.solution.projected_gradient_norm);
    e["flat_directions"] = r.solution.flat_directions;
    e["approx_index"] = r.index ? Document(*r.index) : Document("inf");
    e["psi"] = to_document(r.psi);
    if (!r.approx_trace.empty()) e["approx_trace"] = trace_document(r.approx_trace);
    segs.push_back(std::move(e));
  }
  d["segments"] = std::move(segs);
  d["rel_cert"] = real(s.rel_cert);
  d["certificate"] = to_document(s.certificate);
  Document integ;
  integ["integrable"] = s.integrable;
  integ["total"] = real(s.integrability.total);
  integ["diverged"] = s.integrability.diverged;
  if (!s.integrability.reason.empty()) integ["reason"] = s.integrability.reason;
  integ["partials"] = reals(s.integrability.partials);
  d["integrability"] = std::move(integ);
  return d;
}

Document to_document(const SupermartingaleReport& r) {
  Document d;
  d["pass"] = r.pass;
  if (!r.reason.empty()) d["reason"] = r.reason;
  d["n_paths"] = r.n_paths;
  d["excluded_paths"] = r.excluded_paths;
  d["certificate_passed"] = r.certificate_passed;
  d["times"] = reals(r.times);
  d["means"] = reals(r.means);
  d["standard_errors"] = reals(r.standard_errors);
  d["step_standard_errors"] = reals(r.step_standard_errors);
  return d;
}

Document to_document(const DeviationReport& r) {
  Document d;
  d["pass"] = r.pass;
  d["reason"] = r.reason;
  d["h"] = real(r.h);
  d["no_deviation"] = r.no_deviation;
  d["final_quantile"] = real(r.final_quantile);
  d["times"] = reals(r.times);
  d["H"] = reals(r.H);
  d["mean_log_ratio"] = reals(r.mean_log_ratio);
  d["quantile_normalized"] = reals(r.quantile_normalized);
  if (r.no_deviation) d["max_log_ratio_drift"] = real(r.max_log_ratio_drift);
  return d;
}

namespace {

Document bessel_run(const BesselRun& r) {
  Document d;
  d["steps"] = r.steps;
  d["mean"] = real(r.mean);
  d["min"] = real(r.min);
  d["max"] = real(r.max);
  d["max_abs_error"] = real(r.max_abs_error);
  d["rms_error"] = real(r.rms_error);
  d["min_wealth"] = real(r.min_wealth);
  return d;
}

}  // namespace

Document to_document(const BesselReport& r) {
  Document d;
  d["target"] = real(r.target);
  d["tolerance"] = real(r.tolerance);
  d["all_within"] = r.all_within;
  d["first_order"] = r.first_order;
  d["positive"] = r.positive;
  d["rms_ratio"] = real(r.rms_ratio);
  d["max_ratio"] = real(r.max_ratio);
  d["base"] = bessel_run(r.base);
  d["refined"] = bessel_run(r.refined);
  return d;
}

Document to_document(const UpbrReport& r) {
  Document d;
  d["integrable"] = r.integrable;
  d["medians_increasing"] = r.medians_increasing;
  d["diverging"] = r.diverging;
  d["stabilized"] = r.stabilized;
  d["growth"] = real(r.growth);
  d["last_ratio"] = real(r.last_ratio);
  Document levels = Document::array();
  for (const auto& l : r.levels) {
    Document e;
    e["n"] = real(l.n);
    e["tau"] = real(l.tau);
    e["active_steps"] = l.active_steps;
    e["median"] = real(l.median);
    e["p90"] = real(l.p90);
    levels.push_back(std::move(e));
  }
  d["levels"] = std::move(levels);
  return d;
}

}  // namespace numeraire
