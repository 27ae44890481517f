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

#include "gmclab/malliavin.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gmclab/errors.hpp"
#include "gmclab/inverse.hpp"
#include "gmclab/quadrature.hpp"
#include "gmclab/sampler.hpp"

namespace gmclab {

void CylindricalFunctional::validate(const GridSpec& grid,
                                     const std::vector<std::vector<double>>& probes,
                                     double tolerance) const {
  if (nodes.empty()) throw ParameterError("cylindrical functional needs at least one node");
  std::vector<int> sorted = nodes;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ParameterError("cylindrical functional nodes must be distinct");
  }
  if (sorted.front() < 0 || sorted.back() >= grid.n) throw RangeError("functional node outside grid");
  if (!f || !gradient) throw ParameterError("functional needs both f and its gradient");
  for (const auto& x : probes) {
    if (x.size() != nodes.size()) throw ParameterError("probe dimension does not match nodes");
    const std::vector<double> grad = gradient(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
      std::vector<double> up = x, down = x;
      up[i] += h;
      down[i] -= h;
      const double fd = (f(up) - f(down)) / (2.0 * h);
      const double scale = std::max({std::abs(fd), std::abs(grad[i]), 1e-3});
      if (std::abs(fd - grad[i]) > tolerance * scale) {
        std::ostringstream msg;
        msg << "gradient component " << i << " of '" << description << "' disagrees with finite differences ("
            << grad[i] << " vs " << fd << ")";
        throw ParameterError(msg.str());
      }
    }
  }
}

std::vector<double> CylindricalFunctional::arguments(const FieldSample& field) const {
  std::vector<double> x(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) x[i] = field.values.at(nodes[i]);
  return x;
}

PointValue field_at(const FieldSample& f, double x) {
  const GridSpec& g = f.grid;
  const double pos = (x - g.t0) / g.step();
  if (pos < -1e-9 || pos > g.n - 1 + 1e-9) throw RangeError("evaluation point outside grid");
  const int i = std::clamp(static_cast<int>(std::floor(pos)), 0, g.n - 2);
  const double w = std::clamp(pos - i, 0.0, 1.0);
  PointValue out;
  const double v = f.diag_variance;
  if (w < 1e-12) {
    out.value = f.values[i];
    out.variance = v;
  } else if (w > 1.0 - 1e-12) {
    out.value = f.values[i + 1];
    out.variance = v;
  } else {
    out.value = (1.0 - w) * f.values[i] + w * f.values[i + 1];
    out.variance = ((1.0 - w) * (1.0 - w) + w * w) * v + 2.0 * w * (1.0 - w) * profile(f.params, g.step());
  }
  return out;
}

double observable_value(const FieldSample& f, const ExponentialObservable& obs) {
  const PointValue u = field_at(f, obs.t_plus_zeta);
  return std::exp(obs.lambda_exp * u.value - 0.5 * obs.lambda_exp * obs.lambda_exp * u.variance);
}

double divergence_observable(const FieldSample& f, double lambda_exp, double t_plus_zeta) {
  if (!(lambda_exp > 0.0)) throw ParameterError("divergence_observable needs lambda > 0");
  return (observable_value(f, {lambda_exp, t_plus_zeta}) - 1.0) / lambda_exp;
}

double derivative_of_chaos_interval(const ChaosMeasure& m, double t, double x) {
  cumulative(m, t);
  cumulative(m, x);
  if (x <= t) return 0.0;
  return m.gamma * measure_of(m, t, x);
}

double derivative_of_chaos_interval(const FieldSample& f, const ChaosParams& c, double t, double x) {
  return derivative_of_chaos_interval(build_measure(f, c), t, x);
}

MollifiedDerivative derivative_mollified_inverse(const ChaosMeasure& m,
                                                 const std::function<double(double)>& phi,
                                                 double T, double r_eval) {
  const GridSpec& g = m.grid;
  if (g.t0 > 0.0) throw RangeError("derivative_mollified_inverse needs 0 inside the grid");
  cumulative(m, T);
  cumulative(m, r_eval);
  MollifiedDerivative out;
  if (!(r_eval < T)) return out;
  const double base = cumulative(m, 0.0);
  const double eta_r = cumulative(m, r_eval);
  const GaussLegendre& rule = gauss_legendre(10);
  const GaussLegendre& y_rule = gauss_legendre(20);
  const double step = g.step();
  double theta_sum = 0.0;
  double y_sum = 0.0;
  for (int j = m.cell_of(r_eval); j + 1 < g.n; ++j) {
    const double lo = std::max(g.at(j), r_eval);
    const double hi = std::min(g.at(j + 1), T);
    if (hi <= lo) {
      if (g.at(j) >= T) break;
      continue;
    }
    const double c_lo = m.cum[j] + (lo - g.at(j)) / step * m.cell_mass[j];
    const double c_hi = m.cum[j] + (hi - g.at(j)) / step * m.cell_mass[j];
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double w = rule.nodes[q];
      const double eta = c_lo + w * (c_hi - c_lo);
      theta_sum += rule.weights[q] * (hi - lo) * phi(eta - base) * (eta - eta_r);
    }
    const double inv_density = 1.0 / m.density[j];
    double cell = 0.0;
    for (std::size_t q = 0; q < y_rule.nodes.size(); ++q) {
      const double y = c_lo + y_rule.nodes[q] * (c_hi - c_lo);
      cell += y_rule.weights[q] * phi(y - base) * (y - eta_r);
    }
    y_sum += cell * (c_hi - c_lo) * inv_density;
  }
  out.theta_form = -m.gamma * theta_sum;
  out.y_form = -m.gamma * y_sum;
  return out;
}

CameronMartinCheck cameron_martin_check(const FieldSample& f, const ChaosParams& c, double t,
                                        double x, double s) {
  c.validate();
  const GridSpec& g = f.grid;
  if (g.t0 > 0.0) throw RangeError("cameron_martin_check needs 0 inside the grid");
  std::vector<double> shifted = f.values;
  for (int i = 0; i < g.n; ++i) shifted[i] += s * profile(f.params, g.at(i) - t);
  const ChaosMeasure base = build_measure(f.values, f, c.gamma, c.rule);
  const ChaosMeasure moved = build_measure(shifted, f, c.gamma, c.rule);
  CameronMartinCheck out;
  out.finite_difference = (measure_of(moved, 0.0, x) - measure_of(base, 0.0, x)) / s;
  double analytic = 0.0;
  for (int j = 0; j + 1 < g.n; ++j) {
    const double lo = std::max(g.at(j), 0.0);
    const double hi = std::min(g.at(j + 1), x);
    if (hi <= lo) continue;
    analytic += base.density[j] * cov_integral(f.params, t, lo, hi);
  }
  out.analytic = c.gamma * analytic;
  const double scale = std::max(std::abs(out.analytic), 1e-300);
  out.relative_error = std::abs(out.finite_difference - out.analytic) / scale;
  return out;
}

namespace {

std::vector<double> node_observables(const FieldSample& f, double lambda, int last) {
  std::vector<double> out(last + 1);
  const double half = 0.5 * lambda * lambda * f.diag_variance;
  for (int m = 0; m <= last; ++m) out[m] = std::exp(lambda * f.values[m] - half);
  return out;
}

}  // namespace

DualityReport duality_residual(const CylindricalFunctional& F, const DualityConfig& cfg) {
  cfg.kernel.validate();
  cfg.grid.validate();
  if (!(cfg.lambda_exp > 0.0)) throw ParameterError("duality needs lambda > 0");
  if (cfg.replicates < 2) throw ParameterError("duality needs at least 2 replicates");
  F.validate(cfg.grid, {});
  const GridSpec& g = cfg.grid;
  const int u = g.node_index(cfg.t + cfg.zeta);
  const int first = *std::min_element(F.nodes.begin(), F.nodes.end());
  if (g.at(first) - g.t0 < cfg.kernel.support() * (1.0 - 1e-12)) {
    throw ParameterError("grid must start one kernel support before the first functional node");
  }
  const double step = g.step();
  // R(s_m, t_i) for every node m and functional node i.
  std::vector<std::vector<double>> rcol(F.nodes.size(), std::vector<double>(u + 1));
  for (std::size_t i = 0; i < F.nodes.size(); ++i)
    for (int m = 0; m <= u; ++m) rcol[i][m] = profile(cfg.kernel, (m - F.nodes[i]) * step);

  struct Pair {
    double lhs, rhs;
  };
  auto pairs = parallel_map(cfg.replicates, cfg.workers, [&](std::size_t rep) {
    const FieldSample f = sample_field(cfg.kernel, g, cfg.seed, rep);
    const std::vector<double> x = F.arguments(f);
    const std::vector<double> grad = F.gradient(x);
    const std::vector<double> M = node_observables(f, cfg.lambda_exp, u);
    Pair out{};
    out.lhs = F.f(x) * (M[u] - 1.0) / cfg.lambda_exp;
    for (std::size_t i = 0; i < F.nodes.size(); ++i) {
      double integral = 0.0;
      for (int m = 0; m < u; ++m) integral += 0.5 * (M[m] + M[m + 1]) * (rcol[i][m + 1] - rcol[i][m]);
      out.rhs += grad[i] * integral;
    }
    return out;
  });
  std::vector<double> lhs, rhs;
  for (const Pair& p : pairs) {
    lhs.push_back(p.lhs);
    rhs.push_back(p.rhs);
  }
  DualityReport report;
  report.lhs = mc_accumulate(lhs, cfg.seed);
  report.rhs = mc_accumulate(rhs, cfg.seed);
  report.residual = paired_difference(lhs, rhs, cfg.seed);
  return report;
}

DiscreteYReport ibp_discrete_Y(const DiscreteYConfig& cfg) {
  cfg.kernel.validate();
  cfg.chaos.validate();
  cfg.grid.validate();
  if (!(cfg.lambda_exp > 0.0)) throw ParameterError("ibp_discrete_Y needs lambda > 0");
  if (cfg.stride < 1) throw ParameterError("partition cannot be finer than the grid");
  if (!cfg.phi || !cfg.phi_tail || !cfg.p || !cfg.p_prime) {
    throw ParameterError("ibp_discrete_Y needs phi, its tail integral, p and p'");
  }
  const GridSpec& g = cfg.grid;
  const int i0 = g.node_index(0.0);
  const int iT = g.node_index(cfg.T);
  const int u = g.node_index(cfg.t_plus_zeta);
  if ((iT - i0) % cfg.stride != 0 || iT <= i0) {
    throw ParameterError("partition stride must divide the interval [0, T]");
  }
  const double c = cfg.kernel.support();
  if (-g.t0 < c * (1.0 - 1e-12)) {
    throw ParameterError("grid must start one kernel support to the left of 0");
  }
  const double step = g.step();
  const int band = static_cast<int>(std::ceil(c / step)) + 1;
  // ci[d + band] = int over a cell [0, step] of R(d * step, b) db.
  std::vector<double> ci(2 * band + 1);
  for (int d = -band; d <= band; ++d) ci[d + band] = cov_integral(cfg.kernel, d * step, 0.0, step);
  const double gamma = cfg.chaos.gamma;
  const double lambda = cfg.lambda_exp;

  struct Pair {
    double lhs, rhs;
  };
  auto pairs = parallel_map(cfg.replicates, cfg.workers, [&](std::size_t rep) {
    const FieldSample f = sample_field(cfg.kernel, g, cfg.seed, rep);
    const ChaosMeasure m = build_measure(f, cfg.chaos);
    const std::vector<double> M = node_observables(f, lambda, u);
    // Summation by parts weights: sum_m w_m Phi(s_m) = sum_m (M_m + M_{m+1})/2 (Phi_{m+1} - Phi_m).
    std::vector<double> w(u + 1, 0.0);
    for (int mm = 0; mm < u; ++mm) {
      const double avg = 0.5 * (M[mm] + M[mm + 1]);
      w[mm] -= avg;
      w[mm + 1] += avg;
    }
    double y = 0.0;
    double rhs_sum = 0.0;
    double running = 0.0;  // sum_{j < k} rho_j Z_j
    const double base = m.cum[i0];
    int next_partition = i0 + cfg.stride;
    for (int j = i0; j < iT; ++j) {
      double z = 0.0;
      const int lo = std::max(0, j - band);
      const int hi = std::min(u, j + band);
      for (int mm = lo; mm <= hi; ++mm) z += w[mm] * ci[mm - j + band];
      running += m.density[j] * z;
      if (j + 1 == next_partition) {
        const double eta = m.cum[j + 1] - base;
        const double width = cfg.stride * step;
        y += width * cfg.phi_tail(eta);
        rhs_sum += width * cfg.phi(eta) * running;
        next_partition += cfg.stride;
      }
    }
    Pair out{};
    out.lhs = cfg.p(y) * (M[u] - 1.0) / lambda;
    out.rhs = -gamma * cfg.p_prime(y) * rhs_sum;
    return out;
  });
  std::vector<double> lhs, rhs;
  for (const Pair& p : pairs) {
    lhs.push_back(p.lhs);
    rhs.push_back(p.rhs);
  }
  DiscreteYReport report;
  report.lhs = mc_accumulate(lhs, cfg.seed);
  report.rhs = mc_accumulate(rhs, cfg.seed);
  report.difference = paired_difference(lhs, rhs, cfg.seed);
  report.combined_stderr = std::hypot(report.lhs.std_error, report.rhs.std_error);
  return report;
}

}  // namespace gmclab
