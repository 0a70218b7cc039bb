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

// Counter-based random numbers (Philox4x32-10). A stream is addressed by
// (seed, path, step, lane), so results do not depend on thread scheduling or
// on the order in which paths are generated.

#include <array>
#include <cstdint>

namespace numeraire {

/// One Philox4x32-10 block.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t path, std::uint64_t step, std::uint32_t lane = 0);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Poisson variate by inversion (large means are split into chunks).
  std::uint64_t poisson(double mean);

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t path_;
  std::uint32_t step_;
  std::uint32_t lane_;
  std::uint32_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace numeraire
