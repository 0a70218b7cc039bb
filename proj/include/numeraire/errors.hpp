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

#include "numeraire/types.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace numeraire {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad dimensions, unknown density family, bad JSON field.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class InfeasibleSet : public Error {
 public:
  using Error::Error;
};

class LpFailure : public Error {
 public:
  using Error::Error;
};

/// An unbounded increasing profit was found where a numeraire was requested.
class UipPresent : public Error {
 public:
  UipPresent(std::size_t segment, Vector witness)
      : Error("unbounded increasing profit on segment " + std::to_string(segment)),
        segment_(segment),
        witness_(std::move(witness)) {}

  std::size_t segment() const { return segment_; }
  const Vector& witness() const { return witness_; }

 private:
  std::size_t segment_;
  Vector witness_;
};

struct ApproxStep {
  unsigned n;
  Vector rho;
};

/// Iteration cap reached, either in the segment optimizer or in the
/// approximating-sequence ladder. Carries whatever trace was produced.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, std::size_t segment, std::vector<ApproxStep> trace)
      : Error(what), segment_(segment), trace_(std::move(trace)) {}

  std::size_t segment() const { return segment_; }
  const std::vector<ApproxStep>& trace() const { return trace_; }

 private:
  std::size_t segment_;
  std::vector<ApproxStep> trace_;
};

class Bankruptcy : public Error {
 public:
  Bankruptcy(std::size_t path, std::size_t step)
      : Error("wealth factor <= 0 on path " + std::to_string(path) + " step " + std::to_string(step)),
        path_(path),
        step_(step) {}

  std::size_t path() const { return path_; }
  std::size_t step() const { return step_; }

 private:
  std::size_t path_;
  std::size_t step_;
};

}  // namespace numeraire
