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

#include "numeraire/spec_io.hpp"

#include "numeraire/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace numeraire {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw InvalidInput(where + ": " + what);
}

void allow_only(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(where, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) fail(where, "unknown field '" + item.key() + "'");
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "number must be finite");
  return v;
}

std::size_t index(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) fail(where, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

Vector vector(const json& j, Eigen::Index d, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
  if (d >= 0 && static_cast<Eigen::Index>(j.size()) != d) {
    fail(where, "expected " + std::to_string(d) + " entries, got " + std::to_string(j.size()));
  }
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

Matrix matrix(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of rows");
  if (rows >= 0 && static_cast<Eigen::Index>(j.size()) != rows) {
    fail(where, "expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
  }
  Matrix m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    m.row(static_cast<Eigen::Index>(r)) = vector(j[r], cols, where + "[" + std::to_string(r) + "]").transpose();
  }
  return m;
}

OperationalClock parse_clock(const json& j, const std::string& where) {
  allow_only(j, where, {"times", "horizon", "steps"});
  if (j.contains("times")) {
    if (j.contains("horizon") || j.contains("steps")) fail(where, "give either 'times' or 'horizon'+'steps'");
    const Vector t = vector(j["times"], -1, where + ".times");
    try {
      return OperationalClock(std::vector<double>(t.data(), t.data() + t.size()));
    } catch (const Error& e) {
      fail(where, e.what());
    }
  }
  const double horizon = number(require(j, "horizon", where), where + ".horizon");
  const std::size_t steps = index(require(j, "steps", where), where + ".steps");
  try {
    return OperationalClock::uniform(horizon, steps);
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

DensitySpec parse_density(const json& j, Eigen::Index d, const std::string& where) {
  allow_only(j, where, {"family", "params", "truncation", "quad_nodes"});
  DensitySpec s;
  const json& fam = require(j, "family", where);
  if (!fam.is_string()) fail(where + ".family", "expected a string");
  s.family = fam.get<std::string>();
  const std::string pw = where + ".params";
  const json& p = require(j, "params", where);
  allow_only(p, pw, {"scale", "tail_index", "direction", "negative_scale"});
  s.scale = number(require(p, "scale", pw), pw + ".scale");
  s.tail_index = number(require(p, "tail_index", pw), pw + ".tail_index");
  s.direction = vector(require(p, "direction", pw), d, pw + ".direction");
  if (p.contains("negative_scale")) s.negative_scale = number(p["negative_scale"], pw + ".negative_scale");
  if (s.scale < 0.0 || s.negative_scale < 0.0) fail(pw, "scales must be nonnegative");
  if (!(s.tail_index > 0.0)) fail(pw + ".tail_index", "must be positive");
  if (s.direction.norm() == 0.0) fail(pw + ".direction", "must be nonzero");
  if (j.contains("truncation")) {
    const json& t = j["truncation"];
    const std::string tw = where + ".truncation";
    if (!t.is_array() || t.size() != 2) fail(tw, "expected [x_min, x_max or null]");
    s.x_min = number(t[0], tw + "[0]");
    s.x_max = t[1].is_null() ? kInf : number(t[1], tw + "[1]");
  }
  if (j.contains("quad_nodes")) s.quad_nodes = static_cast<unsigned>(index(j["quad_nodes"], where + ".quad_nodes"));
  return s;
}

Segment parse_segment(const json& j, int d, const std::string& where) {
  allow_only(j, where, {"from", "to", "b", "c", "atoms", "density", "dG_jump"});
  Segment seg;
  seg.from = index(require(j, "from", where), where + ".from");
  seg.to = index(require(j, "to", where), where + ".to");
  Triplet& t = seg.triplet;
  t.b = vector(require(j, "b", where), d, where + ".b");
  t.c = j.contains("c") ? matrix(j["c"], d, d, where + ".c") : Matrix::Zero(d, d);
  std::vector<JumpAtom> atoms;
  if (j.contains("atoms")) {
    const json& a = j["atoms"];
    if (!a.is_array()) fail(where + ".atoms", "expected an array");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string aw = where + ".atoms[" + std::to_string(i) + "]";
      allow_only(a[i], aw, {"x", "intensity"});
      atoms.push_back({vector(require(a[i], "x", aw), d, aw + ".x"), number(require(a[i], "intensity", aw), aw + ".intensity")});
    }
  }
  try {
    if (j.contains("density")) {
      t.nu = JumpMeasure(std::move(atoms), parse_density(j["density"], d, where + ".density"));
    } else {
      t.nu = JumpMeasure(std::move(atoms));
    }
  } catch (const InvalidInput& e) {
    fail(where, e.what());
  }
  if (j.contains("dG_jump")) {
    t.dG_jump = number(j["dG_jump"], where + ".dG_jump");
    if (t.dG_jump < 0.0) fail(where + ".dG_jump", "must be nonnegative");
  }
  return seg;
}

SpecDocument parse_document(const json& j) {
  allow_only(j, "spec", {"d", "clock", "segments", "constraints", "declared_divergent"});
  const std::size_t d = index(require(j, "d", "spec"), "spec.d");
  if (d < 1) fail("spec.d", "must be >= 1");
  const int di = static_cast<int>(d);
  OperationalClock clock = parse_clock(require(j, "clock", "spec"), "spec.clock");
  const json& segs = require(j, "segments", "spec");
  if (!segs.is_array() || segs.empty()) fail("spec.segments", "expected a nonempty array");
  std::vector<Segment> segments;
  for (std::size_t s = 0; s < segs.size(); ++s) segments.push_back(parse_segment(segs[s], di, "spec.segments[" + std::to_string(s) + "]"));
  bool divergent = false;
  if (j.contains("declared_divergent")) {
    if (!j["declared_divergent"].is_boolean()) fail("spec.declared_divergent", "expected a boolean");
    divergent = j["declared_divergent"].get<bool>();
  }
  std::optional<ConstraintSet> cons;
  if (j.contains("constraints")) cons = parse_constraints(j["constraints"], di, "spec.constraints");
  try {
    return SpecDocument{MarketSpec(di, std::move(clock), std::move(segments), divergent), std::move(cons)};
  } catch (const InvalidInput& e) {
    fail("spec", e.what());
  }
}

// Line and column (1-based) of a byte offset.
std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is one past the offending character.
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::ostringstream os;
    os << source << ":" << line << ":" << col << ": malformed JSON";
    const std::string what = e.what();
    const auto pos = what.find("syntax error");
    if (pos != std::string::npos) os << " (" << what.substr(pos) << ")";
    throw InvalidInput(os.str());
  }
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

SpecDocument parse_spec(const std::string& text) { return parse_document(parse_json(text, "spec")); }

SpecDocument load_spec(const std::string& path) { return parse_document(parse_json(read_file(path), path)); }

ConstraintSet parse_constraints(const json& j, int d, const std::string& where) {
  if (j.is_string()) {
    try {
      return ConstraintSet::preset(j.get<std::string>(), d);
    } catch (const InvalidInput& e) {
      fail(where, e.what());
    }
  }
  allow_only(j, where, {"A", "u", "is_cone"});
  const Matrix a = matrix(require(j, "A", where), -1, d, where + ".A");
  const Vector u = vector(require(j, "u", where), a.rows(), where + ".u");
  bool cone = false;
  if (j.contains("is_cone")) {
    if (!j["is_cone"].is_boolean()) fail(where + ".is_cone", "expected a boolean");
    cone = j["is_cone"].get<bool>();
  }
  try {
    return ConstraintSet(a, u, cone);
  } catch (const InvalidInput& e) {
    fail(where, e.what());
  }
}

ConstraintSet load_constraints(const std::string& preset_or_path, int d) {
  if (preset_or_path == "unconstrained" || preset_or_path == "long-only" || preset_or_path == "simplex") {
    return ConstraintSet::preset(preset_or_path, d);
  }
  const json j = parse_json(read_file(preset_or_path), preset_or_path);
  return parse_constraints(j, d, preset_or_path);
}

}  // namespace numeraire
