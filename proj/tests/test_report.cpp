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

#include <doctest.h>

#include <cmath>

using namespace numeraire;

TEST_CASE("floats keep 17 significant digits and non-finite values become strings") {
  Document d = report_header();
  d["third"] = 1.0 / 3.0;
  d["up"] = real(kInf);
  d["down"] = real(-kInf);
  d["nan"] = real(std::nan(""));
  d["vec"] = to_document(Vector{{0.1, 2.0}});
  const std::string out = emit_report(d);
  CHECK(out ==
        "{\n"
        "  \"schema\": \"numeraire-report/1\",\n"
        "  \"third\": 0.33333333333333331,\n"
        "  \"up\": \"+inf\",\n"
        "  \"down\": \"-inf\",\n"
        "  \"nan\": \"nan\",\n"
        "  \"vec\": [0.10000000000000001, 2]\n"
        "}\n");
}

TEST_CASE("emitted reports round-trip exactly") {
  Document d = report_header();
  d["values"] = to_document(Vector{{std::exp(1.0), -1e-300, 123456789.125}});
  Document nested;
  nested["ok"] = true;
  nested["list"] = Document::array({Document{{"a", 1}}, Document{{"b", 2.5}}});
  d["nested"] = nested;
  const std::string once = emit_report(d);
  const Document back = Document::parse(once);
  CHECK(back["values"][0].get<double>() == std::exp(1.0));
  CHECK(emit_report(back) == once);
}

TEST_CASE("key order follows insertion") {
  Document d;
  d["zeta"] = 1;
  d["alpha"] = 2;
  const std::string out = emit_report(d);
  CHECK(out.find("zeta") < out.find("alpha"));
}

TEST_CASE("solution documents are deterministic") {
  Triplet t;
  t.b = Vector{{0.08, 0.05}};
  t.c = Matrix{{0.04, 0.01}, {0.01, 0.09}};
  t.nu = JumpMeasure({{Vector{{0.3, -0.2}}, 0.4}});
  const auto m = MarketSpec::levy(t, 1.0, 10);
  const auto a = emit_report(to_document(solve_numeraire(m, ConstraintSet::full(2))));
  const auto b = emit_report(to_document(solve_numeraire(m, ConstraintSet::full(2))));
  CHECK(a == b);
  const Document doc = Document::parse(a);
  CHECK(doc["segments"][0]["approx_index"] == "inf");
  CHECK(doc["integrability"]["integrable"] == true);
}
