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

#include "gmclab/sampler.hpp"

namespace gmclab {

enum class RiemannRule { left, mid };

struct ChaosParams {
  double gamma = 0.5;
  RiemannRule rule = RiemannRule::mid;

  /// Throws ParameterError unless 0 <= gamma < sqrt(2); warns above 1.
  void validate() const;
};

struct ChaosMeasure {
  GridSpec grid;
  std::vector<double> density;    // n-1 cell densities
  std::vector<double> cell_mass;  // n-1
  std::vector<double> cum;        // n, cum[0] = 0
  double gamma = 0.0;
  std::uint64_t source_seed = 0;

  double total() const { return cum.back(); }
  int cell_of(double t) const;
};

/// Wick-normalized exponent variance for one cell value under the given rule.
double cell_variance(const KernelParams& p, const GridSpec& g, RiemannRule rule);

ChaosMeasure build_measure(const FieldSample& f, const ChaosParams& c);

/// Same construction with an arbitrary exponent and an externally supplied field vector.
ChaosMeasure build_measure(const std::vector<double>& values, const FieldSample& f, double gamma,
                           RiemannRule rule);

/// eta(t0, x) with linear interpolation inside cells.
double cumulative(const ChaosMeasure& m, double x);

double measure_of(const ChaosMeasure& m, double a, double b);

double shifted_measure_density(const ChaosMeasure& m, const FieldSample& f, double zeta, double theta);

}  // namespace gmclab
