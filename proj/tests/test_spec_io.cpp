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

#include "numeraire/errors.hpp"
#include "numeraire/spec_io.hpp"

#include <doctest.h>

#include <string>

using namespace numeraire;

namespace {

const std::string kData = NUMERAIRE_TEST_DATA;

std::string error_of(const std::string& text) {
  try {
    parse_spec(text);
  } catch (const InvalidInput& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("load the GBM spec") {
  const auto doc = load_spec(kData + "/gbm.json");
  CHECK(doc.market.dim() == 2);
  CHECK(doc.market.clock().intervals() == 100);
  const auto& t = doc.market.segments().front().triplet;
  CHECK(t.b[0] == 0.08);
  CHECK(t.c(1, 1) == 0.09);
  CHECK_FALSE(doc.constraints);
}

TEST_CASE("constraint presets and blocks in spec files") {
  const auto jd = load_spec(kData + "/jump_diffusion.json");
  REQUIRE(jd.constraints);
  CHECK(jd.constraints->rows() == 3);
  CHECK(jd.market.segments().size() == 2);
  const auto inf = load_spec(kData + "/infeasible.json");
  REQUIRE(inf.constraints);
  CHECK(inf.constraints->is_empty());
}

TEST_CASE("density block") {
  const auto doc = load_spec(kData + "/log_pareto.json");
  const auto& nu = doc.market.segments().front().triplet.nu;
  REQUIRE(nu.density());
  CHECK(nu.density()->family == "log_pareto");
  CHECK(nu.density()->tail_index == 0.5);
  CHECK_FALSE(nu.integrates_log());
}

TEST_CASE("declared divergence flag") {
  CHECK(load_spec(kData + "/singular.json").market.declared_divergent());
}

TEST_CASE("malformed JSON reports line and column") {
  const auto msg = error_of(read_file(kData + "/malformed.json"));
  CHECK(msg.find("spec:4:") == 0);
  CHECK(msg.find("malformed JSON") != std::string::npos);
}

TEST_CASE("unknown and missing fields report their path") {
  const std::string base = R"({"d": 1, "clock": {"times": [0, 1]}, "segments": [{"from": 0, "to": 1, "b": [0.1], "c": [[0.04]], )";
  CHECK(error_of(base + R"("atoms": [{"x": [1], "intensity": 1, "mark": 2}]}]})") ==
        "spec.segments[0].atoms[0]: unknown field 'mark'");
  CHECK(error_of(R"({"d": 1, "clock": {"times": [0, 1]}})").find("missing field 'segments'") != std::string::npos);
  CHECK(error_of(base + R"("color": 1}]})").find("spec.segments[0]: unknown field 'color'") == 0);
}

TEST_CASE("dimension mismatches are rejected") {
  CHECK_FALSE(error_of(R"({"d": 2, "clock": {"times": [0, 1]}, "segments": [{"from": 0, "to": 1, "b": [0.1], "c": [[0.04]]}]})")
                  .empty());
  CHECK_FALSE(error_of(R"({"d": 1, "clock": {"horizon": 1, "steps": 0}, "segments": []})").empty());
}

TEST_CASE("uniform clock shorthand") {
  const auto doc = parse_spec(
      R"({"d": 1, "clock": {"horizon": 2, "steps": 4}, "segments": [{"from": 0, "to": 4, "b": [0], "c": [[1]]}]})");
  CHECK(doc.market.clock().time(1) == 0.5);
}

TEST_CASE("constraint loading") {
  CHECK(load_constraints("long-only", 2).rows() == 2);
  CHECK_THROWS_AS(load_constraints(kData + "/missing.json", 2), InvalidInput);
  CHECK_THROWS_AS(parse_constraints(nlohmann::json("sideways"), 1), InvalidInput);
}
