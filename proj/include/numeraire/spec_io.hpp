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

// JSON market specification files.
//
//   {
//     "d": 2,
//     "clock": {"times": [0, 0.5, 1]}            or {"horizon": 1, "steps": 100},
//     "segments": [{
//       "from": 0, "to": 2,
//       "b": [...], "c": [[...], ...],
//       "atoms": [{"x": [...], "intensity": 0.3}],
//       "density": {"family": "log_pareto",
//                   "params": {"scale": 1, "tail_index": 0.5, "direction": [1, 0],
//                              "negative_scale": 0},
//                   "truncation": [1, null], "quad_nodes": 16},
//       "dG_jump": 0
//     }],
//     "constraints": "long-only"  or  {"A": [[...]], "u": [...], "is_cone": true},
//     "declared_divergent": false
//   }
//
// Unknown fields are rejected with their JSON path.

#include "numeraire/constraints.hpp"
#include "numeraire/market_model.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace numeraire {

struct SpecDocument {
  MarketSpec market;
  /// Constraint block or preset carried by the file, if any.
  std::optional<ConstraintSet> constraints;
};

/// Malformed JSON reports line and column; semantic errors report the path.
/// Throws InvalidInput.
SpecDocument parse_spec(const std::string& text);
SpecDocument load_spec(const std::string& path);

/// Preset name or {"A", "u", "is_cone"} object.
ConstraintSet parse_constraints(const nlohmann::json& j, int d, const std::string& where = "constraints");

/// A preset name, or a path to a JSON file holding a constraint block.
ConstraintSet load_constraints(const std::string& preset_or_path, int d);

/// Reads a whole file; throws InvalidInput naming the path on failure.
std::string read_file(const std::string& path);

}  // namespace numeraire
