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

// Command-line front end: flag parsing and the subcommand pipeline.
// Exit codes: 0 pass, 2 mathematical failure, 1 usage or I/O error.

#include "numeraire/report.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace numeraire::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

struct RunConfig {
  std::string command;  ///< validate | nuip | solve | verify | simulate | demo
  std::string demo;     ///< bessel | upbr
  std::string spec_path;
  std::string constraints;  ///< preset name or path; empty defers to the market file
  std::uint64_t seed = 0;
  std::optional<std::size_t> n_paths;
  std::string out_path;
  std::map<std::string, double> tol_overrides;
  std::vector<double> pi;  ///< comparison portfolio for `simulate`
  std::string csv_path;
  std::size_t steps = 4000;  ///< Bessel grid
  unsigned approx_n_max = 64;
  int cert_dirs = 256;
};

struct RunResult {
  int exit_code = kExitPass;
  Document report;
  std::string error;  ///< set for exit code 1
};

/// Tolerance keys accepted by --tol-override.
const std::vector<std::string>& tolerance_keys();

/// Parses "K=V" and checks K and the range [1e-14, 1e-2]. Throws InvalidInput.
std::pair<std::string, double> parse_override(const std::string& text);

RunResult run(const RunConfig& config);

/// Full program: parse argv, run, write the report (to --out or `out`).
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace numeraire::cli
