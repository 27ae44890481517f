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

#include <cstdint>
#include <vector>

#include "gmclab/chaos.hpp"
#include "gmclab/stats.hpp"

namespace gmclab {

class InverseMap {
 public:
  explicit InverseMap(const ChaosMeasure& m);

  const ChaosMeasure& measure() const { return *measure_; }
  double total_mass() const { return measure_->total(); }

 private:
  const ChaosMeasure* measure_;
};

/// Q(a) = inf{t : eta(t0, t) >= a}.
double hitting_time(const InverseMap& q, double a);

double homeomorphism(const InverseMap& q, double x);

double inverse_homeomorphism(const InverseMap& q, double x);

/// h1^{-1}(h2(x)).
double compose_inverse_with(const InverseMap& q1, const InverseMap& q2, double x);

struct GapConfig {
  KernelParams kernel;
  ChaosParams chaos;
  GridSpec grid;
  std::vector<double> a_values{0.5, 1.0, 2.0};
  std::size_t replicates = 10000;
  std::uint64_t seed = 1;
  int workers = 0;
};

struct GapEstimate {
  double a = 0.0;
  McEstimate hitting_gap;  // Q(a) - a
  McEstimate window_gap;   // eta(Q(a), Q(a) + r) - r
  McEstimate difference;   // paired
  double combined_stderr = 0.0;
  std::size_t rejected = 0;
};

/// Throws GridTooShortError when more than 1% of replicates have Q(a) >= t1 - r.
std::vector<GapEstimate> expectation_gap(const GapConfig& cfg);

}  // namespace gmclab
