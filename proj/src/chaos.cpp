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

#include "gmclab/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gmclab/errors.hpp"

namespace gmclab {

void ChaosParams::validate() const {
  if (!(gamma >= 0.0 && gamma < std::sqrt(2.0))) {
    throw ParameterError("gamma must lie in [0, sqrt(2)), got " + std::to_string(gamma));
  }
  if (gamma > 1.0) warn("gamma > 1: several moment arguments need gamma < 1");
}

int ChaosMeasure::cell_of(double t) const {
  const int cells = grid.n - 1;
  const int i = static_cast<int>(std::floor((t - grid.t0) / grid.step()));
  return std::clamp(i, 0, cells - 1);
}

double cell_variance(const KernelParams& p, const GridSpec& g, RiemannRule rule) {
  const double v = p.diagonal();
  if (rule == RiemannRule::left) return v;
  return 0.5 * (v + profile(p, g.step()));
}

ChaosMeasure build_measure(const std::vector<double>& values, const FieldSample& f, double gamma,
                           RiemannRule rule) {
  const GridSpec& g = f.grid;
  if (static_cast<int>(values.size()) != g.n) throw ParameterError("field length does not match grid");
  const double step = g.step();
  const double half_var = 0.5 * gamma * gamma * cell_variance(f.params, g, rule);
  ChaosMeasure m;
  m.grid = g;
  m.gamma = gamma;
  m.source_seed = f.seed;
  m.density.resize(g.n - 1);
  m.cell_mass.resize(g.n - 1);
  m.cum.resize(g.n);
  m.cum[0] = 0.0;
  double sum = 0.0;
  double carry = 0.0;
  for (int i = 0; i + 1 < g.n; ++i) {
    const double u = rule == RiemannRule::mid ? 0.5 * (values[i] + values[i + 1]) : values[i];
    const double exponent = gamma * u - half_var;
    if (exponent > 700.0) {
      std::ostringstream msg;
      msg << "chaos density overflows in cell " << i << " (exponent " << exponent << ")";
      throw OverflowError(msg.str());
    }
    m.density[i] = std::exp(exponent);
    m.cell_mass[i] = step * m.density[i];
    // Neumaier summation.
    const double x = m.cell_mass[i];
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
    m.cum[i + 1] = sum + carry;
  }
  return m;
}

ChaosMeasure build_measure(const FieldSample& f, const ChaosParams& c) {
  c.validate();
  return build_measure(f.values, f, c.gamma, c.rule);
}

double cumulative(const ChaosMeasure& m, double x) {
  const GridSpec& g = m.grid;
  const double tol = 1e-12 * std::max(1.0, std::abs(g.t1));
  if (x < g.t0 - tol || x > g.t1 + tol) {
    std::ostringstream msg;
    msg << "point " << x << " lies outside the grid [" << g.t0 << ", " << g.t1 << "]";
    throw RangeError(msg.str());
  }
  const int i = m.cell_of(x);
  const double frac = std::clamp((x - g.at(i)) / g.step(), 0.0, 1.0);
  if (frac == 1.0) return m.cum[i + 1];
  return m.cum[i] + frac * m.cell_mass[i];
}

double measure_of(const ChaosMeasure& m, double a, double b) {
  if (a > b) throw RangeError("measure_of needs a <= b");
  if (a == b) {
    cumulative(m, a);
    return 0.0;
  }
  return cumulative(m, b) - cumulative(m, a);
}

double shifted_measure_density(const ChaosMeasure& m, const FieldSample& f, double zeta, double theta) {
  if (f.grid.n != m.grid.n || f.seed != m.source_seed) {
    throw ParameterError("field sample does not match the measure");
  }
  const double x = theta + zeta;
  cumulative(m, x);
  return m.density[m.cell_of(x)];
}

}  // namespace gmclab
