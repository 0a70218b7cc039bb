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

// Small dense linear programs: two-phase tableau simplex with Bland's rule.
// Sized for the handful of variables and constraints that arise per segment.

#include "numeraire/types.hpp"

#include <vector>

namespace numeraire::lp {

enum class Sense { LessEq, Equal, GreaterEq };
enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(Status s);

struct Problem {
  Vector objective;  ///< maximized
  Matrix rows;       ///< one constraint per row
  Vector rhs;
  std::vector<Sense> senses;
  Vector lower;  ///< per-variable bounds, ±inf allowed; empty means (-inf, inf)
  Vector upper;
};

struct Result {
  Status status = Status::IterationLimit;
  Vector x;
  double value = 0.0;
};

Result maximize(const Problem& problem);

/// Feasibility of {x : rows x (sense) rhs, lower <= x <= upper}.
bool feasible(const Problem& problem);

}  // namespace numeraire::lp
