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

#include "gmclab/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gmclab/errors.hpp"

namespace gmclab {

InverseMap::InverseMap(const ChaosMeasure& m) : measure_(&m) {
  if (!(m.total() > 0.0)) throw ParameterError("inverse map needs positive total mass");
}

double hitting_time(const InverseMap& q, double a) {
  const ChaosMeasure& m = q.measure();
  const double total = m.total();
  if (!(a >= 0.0) || a > total * (1.0 + 1e-14)) {
    std::ostringstream msg;
    msg << "level " << a << " outside [0, " << total << "]";
    throw RangeError(msg.str());
  }
  if (a == 0.0) return m.grid.t0;
  if (a >= total) return m.grid.t1;
  // First node with cum >= a; the hit lies in the cell ending there.
  const auto it = std::lower_bound(m.cum.begin(), m.cum.end(), a);
  const int hi = static_cast<int>(it - m.cum.begin());
  const int cell = hi - 1;
  const double frac = (a - m.cum[cell]) / m.cell_mass[cell];
  return m.grid.at(cell) + std::clamp(frac, 0.0, 1.0) * m.grid.step();
}

namespace {

void require_unit_interval(const InverseMap& q, double x) {
  const GridSpec& g = q.measure().grid;
  if (g.t0 > 0.0 || g.t1 < 1.0) throw RangeError("homeomorphism needs a grid containing [0, 1]");
  if (!(x >= 0.0 && x <= 1.0)) throw RangeError("homeomorphism argument must lie in [0, 1]");
}

}  // namespace

double homeomorphism(const InverseMap& q, double x) {
  require_unit_interval(q, x);
  const ChaosMeasure& m = q.measure();
  if (x == 1.0) return 1.0;
  return measure_of(m, 0.0, x) / measure_of(m, 0.0, 1.0);
}

double inverse_homeomorphism(const InverseMap& q, double x) {
  require_unit_interval(q, x);
  const ChaosMeasure& m = q.measure();
  if (x == 1.0) return 1.0;
  const double base = cumulative(m, 0.0);
  return hitting_time(q, base + x * measure_of(m, 0.0, 1.0));
}

double compose_inverse_with(const InverseMap& q1, const InverseMap& q2, double x) {
  return inverse_homeomorphism(q1, homeomorphism(q2, x));
}

std::vector<GapEstimate> expectation_gap(const GapConfig& cfg) {
  cfg.kernel.validate();
  cfg.chaos.validate();
  cfg.grid.validate();
  if (cfg.replicates < 2) throw ParameterError("expectation_gap needs at least 2 replicates");
  const std::size_t k = cfg.a_values.size();
  const double r = cfg.kernel.r;
  const double limit = cfg.grid.t1 - r;

  struct Row {
    std::vector<double> hit, window;
    std::vector<char> ok;
  };
  auto rows = parallel_map(cfg.replicates, cfg.workers, [&](std::size_t rep) {
    const FieldSample f = sample_field(cfg.kernel, cfg.grid, cfg.seed, rep);
    const ChaosMeasure m = build_measure(f, cfg.chaos);
    const InverseMap q(m);
    Row row{std::vector<double>(k), std::vector<double>(k), std::vector<char>(k, 0)};
    for (std::size_t j = 0; j < k; ++j) {
      const double a = cfg.a_values[j];
      if (a > m.total()) continue;
      const double t = hitting_time(q, a);
      if (t >= limit) continue;
      row.ok[j] = 1;
      row.hit[j] = t - a;
      row.window[j] = measure_of(m, t, t + r) - r;
    }
    return row;
  });

  std::vector<GapEstimate> out;
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> hit, window;
    for (const Row& row : rows) {
      if (!row.ok[j]) continue;
      hit.push_back(row.hit[j]);
      window.push_back(row.window[j]);
    }
    GapEstimate est;
    est.a = cfg.a_values[j];
    est.rejected = cfg.replicates - hit.size();
    if (est.rejected * 100 > cfg.replicates || hit.size() < 2) {
      std::ostringstream msg;
      msg << "grid too short: " << est.rejected << " of " << cfg.replicates
          << " replicates hit level " << est.a << " beyond t1 - r";
      throw GridTooShortError(msg.str());
    }
    est.hitting_gap = mc_accumulate(hit, cfg.seed);
    est.window_gap = mc_accumulate(window, cfg.seed);
    est.difference = paired_difference(hit, window, cfg.seed);
    est.combined_stderr = std::hypot(est.hitting_gap.std_error, est.window_gap.std_error);
    out.push_back(est);
  }
  return out;
}

}  // namespace gmclab
