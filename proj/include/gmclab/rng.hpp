/*
 * Copyright 2026 The gmclab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <cstdint>

namespace gmclab {

/// Philox4x32-10 counter-based generator (Salmon et al. 2011).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Standard normal stream keyed by (seed, stream). Two streams with different
/// keys never share counters, so replicate i draws the same numbers no matter
/// which worker runs it.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream);

  double uniform();
  double normal();

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<double, 2> uniforms_{};
  int next_uniform_ = 2;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gmclab
