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

#include "gmclab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gmclab/errors.hpp"
#include "gmclab/sampler.hpp"

namespace gmclab {

void WindowSweep::validate() const {
  if (!(L >= 0.0) || !(x > 0.0)) throw ParameterError("window sweep needs L >= 0 and x > 0");
}

namespace {

KernelParams sweep_kernel(const WindowSweep& sweep, const MomentsConfig& cfg) {
  KernelParams k = cfg.kernel;
  if (sweep.delta > 0.0) k.r = sweep.delta;
  k.validate();
  return k;
}

GridSpec covering_grid(const KernelParams& k, const MomentsConfig& cfg, double length) {
  if (cfg.cells_per_epsilon < 1) throw ParameterError("cells_per_epsilon must be >= 1");
  const double step = k.epsilon / cfg.cells_per_epsilon;
  const int cells = std::max(1, static_cast<int>(std::ceil(length / step - 1e-9)));
  return GridSpec::with_step(0.0, cells * step, step);
}

enum class Extreme { sup, inf };

McEstimate window_extreme(const WindowSweep& sweep, const MomentsConfig& cfg, Extreme which) {
  sweep.validate();
  cfg.chaos.validate();
  if (cfg.stride < 1) throw ParameterError("stride must be >= 1");
  if (cfg.replicates < 2) throw ParameterError("need at least 2 replicates");
  const KernelParams k = sweep_kernel(sweep, cfg);
  const GridSpec g = covering_grid(k, cfg, sweep.L + sweep.x);
  const double step = g.step();
  const int shifts = static_cast<int>(std::floor(sweep.L / (step * cfg.stride) + 1e-9));
  auto values = parallel_map(cfg.replicates, cfg.workers, [&](std::size_t rep) {
    const FieldSample f = sample_field(k, g, cfg.seed, rep);
    const ChaosMeasure m = build_measure(f, cfg.chaos);
    double best = which == Extreme::sup ? 0.0 : std::numeric_limits<double>::infinity();
    for (int s = 0; s <= shifts; ++s) {
      const double t = s * cfg.stride * step;
      const double mass = measure_of(m, t, t + sweep.x);
      best = which == Extreme::sup ? std::max(best, mass) : std::min(best, mass);
    }
    return which == Extreme::sup ? std::pow(best, sweep.p) : std::pow(best, -sweep.p);
  });
  return mc_accumulate(values, cfg.seed);
}

}  // namespace

McEstimate sup_window_moment(const WindowSweep& sweep, const MomentsConfig& cfg) {
  return window_extreme(sweep, cfg, Extreme::sup);
}

McEstimate inf_window_negmoment(const WindowSweep& sweep, const MomentsConfig& cfg) {
  if (!(sweep.p > 0.0)) throw ParameterError("negative moment order p must be positive");
  return window_extreme(sweep, cfg, Extreme::inf);
}

ErgodicResult ergodic_ratio(const MomentsConfig& cfg, const std::vector<double>& horizons) {
  cfg.kernel.validate();
  cfg.chaos.validate();
  if (horizons.empty()) throw ParameterError("ergodic_ratio needs at least one horizon");
  if (cfg.replicates < 2) throw ParameterError("need at least 2 replicates");
  for (double T : horizons) {
    if (!(T > 0.0)) throw RangeError("horizons must be positive");
  }
  const double longest = *std::max_element(horizons.begin(), horizons.end());
  const GridSpec g = covering_grid(cfg.kernel, cfg, longest);
  auto rows = parallel_map(cfg.replicates, cfg.workers, [&](std::size_t rep) {
    const FieldSample f = sample_field(cfg.kernel, g, cfg.seed, rep);
    const ChaosMeasure m = build_measure(f, cfg.chaos);
    std::vector<double> row;
    for (double T : horizons) row.push_back(measure_of(m, 0.0, T) / T);
    return row;
  });
  ErgodicResult out;
  out.horizons = horizons;
  const std::size_t k = horizons.size();
  std::vector<std::vector<double>> sq(k);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> col;
    for (const auto& row : rows) col.push_back(row[j]);
    out.ratio.push_back(mc_accumulate(col, cfg.seed));
    for (double v : col) sq[j].push_back((v - out.ratio.back().mean) * (v - out.ratio.back().mean));
    out.variance.push_back(mc_accumulate(sq[j], cfg.seed));
  }
  out.variance_drop = paired_difference(sq.front(), sq.back(), cfg.seed);
  return out;
}

ScalingResult scaling_exponent(const MomentsConfig& cfg, double p, const std::vector<double>& xs) {
  if (xs.size() < 4) throw ParameterError("scaling_exponent needs at least 4 scales");
  cfg.kernel.validate();
  cfg.chaos.validate();
  if (cfg.replicates < 2) throw ParameterError("need at least 2 replicates");
  for (double x : xs) {
    if (!(x > 0.0 && x <= cfg.kernel.r)) throw RangeError("scales must lie in (0, r]");
  }
  const double longest = *std::max_element(xs.begin(), xs.end());
  const GridSpec g = covering_grid(cfg.kernel, cfg, longest);
  auto rows = parallel_map(cfg.replicates, cfg.workers, [&](std::size_t rep) {
    const FieldSample f = sample_field(cfg.kernel, g, cfg.seed, rep);
    const ChaosMeasure m = build_measure(f, cfg.chaos);
    std::vector<double> row;
    for (double x : xs) row.push_back(std::pow(measure_of(m, 0.0, x), p));
    return row;
  });
  const std::size_t k = xs.size();
  ScalingResult out;
  out.x = xs;
  std::vector<double> lx(k), ly(k);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> col;
    for (const auto& row : rows) col.push_back(row[j]);
    out.moment.push_back(mc_accumulate(col, cfg.seed));
    lx[j] = std::log(xs[j]);
    ly[j] = std::log(out.moment[j].mean);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    mx += lx[j] / k;
    my += ly[j] / k;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    sxx += (lx[j] - mx) * (lx[j] - mx);
    sxy += (lx[j] - mx) * (ly[j] - my);
  }
  out.slope = sxy / sxx;
  // Delta method: per-replicate influence of the slope through each log-moment.
  McAccumulator influence;
  for (const auto& row : rows) {
    double v = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      v += (lx[j] - mx) / sxx * (row[j] - out.moment[j].mean) / out.moment[j].mean;
    }
    influence.add(v);
  }
  out.std_error = influence.estimate().std_error;
  return out;
}

double multifractal_zeta(double p, double gamma) {
  const double g2 = gamma * gamma;
  return (1.0 + g2 / 2.0) * p - g2 * p * p / 2.0;
}

}  // namespace gmclab
