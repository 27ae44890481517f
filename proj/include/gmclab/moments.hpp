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

struct WindowSweep {
  double L = 1.0;
  double x = 0.1;
  double p = 1.0;
  double delta = 1.0;  // outer scale; overrides kernel.r when positive

  void validate() const;
};

struct MomentsConfig {
  KernelParams kernel{0.1, 1.0, std::nullopt};
  ChaosParams chaos{0.5, RiemannRule::mid};
  int cells_per_epsilon = 4;
  int stride = 1;  // window shifts every `stride` grid cells
  std::size_t replicates = 10000;
  std::uint64_t seed = 1;
  int workers = 0;
};

/// E[(sup_T eta(T, T + x))^p] over grid shifts T in [0, L].
McEstimate sup_window_moment(const WindowSweep& sweep, const MomentsConfig& cfg);

/// E[(inf_T eta(T, T + x))^(-p)] over grid shifts T in [0, L].
McEstimate inf_window_negmoment(const WindowSweep& sweep, const MomentsConfig& cfg);

struct ErgodicResult {
  std::vector<double> horizons;
  std::vector<McEstimate> ratio;     // eta(0, T) / T
  std::vector<McEstimate> variance;  // (ratio - mean)^2
  McEstimate variance_drop;          // variance at first horizon minus variance at last, paired
};

ErgodicResult ergodic_ratio(const MomentsConfig& cfg, const std::vector<double>& horizons);

struct ScalingResult {
  double slope = 0.0;
  double std_error = 0.0;
  std::vector<double> x;
  std::vector<McEstimate> moment;
};

/// OLS slope of log E[eta(0, x)^p] against log x.
ScalingResult scaling_exponent(const MomentsConfig& cfg, double p, const std::vector<double>& xs);

/// (1 + gamma^2/2) p - gamma^2 p^2 / 2, the standard lognormal multifractal exponent.
double multifractal_zeta(double p, double gamma);

}  // namespace gmclab
