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

#pragma once

// Report documents: insertion-ordered JSON with a schema header, serialized
// with 17 significant digits so identical runs give byte-identical files.

#include "numeraire/arbitrage.hpp"
#include "numeraire/demos.hpp"
#include "numeraire/market_model.hpp"
#include "numeraire/simulation.hpp"
#include "numeraire/solver.hpp"

#include <json.hpp>

#include <string>

namespace numeraire {

using Document = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "numeraire-report/1";

/// {"schema": "numeraire-report/1"}
Document report_header();

/// Two-space indented, %.17g floats, non-finite floats as "+inf" / "-inf" /
/// "nan" strings, trailing newline.
std::string emit_report(const Document& doc);

Document to_document(const Vector& v);
Document to_document(const ValidationReport& r);
Document to_document(const ArbitrageConditions& c);
Document to_document(const NuipReport& r);
Document to_document(const PsiRecord& p);
Document to_document(const Certificate& c);
Document to_document(const NumeraireSolution& s);
Document to_document(const SupermartingaleReport& r);
Document to_document(const DeviationReport& r);
Document to_document(const BesselReport& r);
Document to_document(const UpbrReport& r);

/// Double with the "+inf"/"-inf" string convention applied up front.
Document real(double v);

}  // namespace numeraire
