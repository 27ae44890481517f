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
#include <functional>
#include <string>
#include <vector>

#include "gmclab/chaos.hpp"
#include "gmclab/stats.hpp"

namespace gmclab {

struct CylindricalFunctional {
  std::vector<int> nodes;
  std::function<double(const std::vector<double>&)> f;
  std::function<std::vector<double>(const std::vector<double>&)> gradient;
  std::string description;

  /// Checks node indices against the grid and the gradient against central
  /// differences at the probe points (relative error <= tolerance).
  void validate(const GridSpec& grid, const std::vector<std::vector<double>>& probes,
                double tolerance = 1e-5) const;

  std::vector<double> arguments(const FieldSample& field) const;
};

struct ExponentialObservable {
  double lambda_exp = 0.5;
  double t_plus_zeta = 1.0;
};

/// Field value at x by linear interpolation, with the exact variance of that value.
struct PointValue {
  double value = 0.0;
  double variance = 0.0;
};
PointValue field_at(const FieldSample& f, double x);

/// M = exp(lambda U(x) - lambda^2 Var U(x) / 2).
double observable_value(const FieldSample& f, const ExponentialObservable& obs);

/// (M - 1) / lambda.
double divergence_observable(const FieldSample& f, double lambda_exp, double t_plus_zeta);

/// gamma * eta(t, max(x, t)).
double derivative_of_chaos_interval(const ChaosMeasure& m, double t, double x);
double derivative_of_chaos_interval(const FieldSample& f, const ChaosParams& c, double t, double x);

struct MollifiedDerivative {
  double theta_form = 0.0;
  double y_form = 0.0;
};

/// D_r of Y = int_0^T Phi(eta(0, theta)) d theta where Phi' = -phi, in both the
/// theta-integral and the level (y) integral forms.
MollifiedDerivative derivative_mollified_inverse(const ChaosMeasure& m,
                                                 const std::function<double(double)>& phi,
                                                 double T, double r_eval);

struct CameronMartinCheck {
  double finite_difference = 0.0;
  double analytic = 0.0;
  double relative_error = 0.0;
};

/// Directional derivative of eta(0, x) along h = R(t, .).
CameronMartinCheck cameron_martin_check(const FieldSample& f, const ChaosParams& c, double t,
                                        double x, double s = 1e-4);

struct DualityConfig {
  KernelParams kernel;
  GridSpec grid;
  double lambda_exp = 0.5;
  double t = 1.0;
  double zeta = 0.5;
  std::size_t replicates = 10000;
  std::uint64_t seed = 1;
  int workers = 0;
};

struct DualityReport {
  McEstimate lhs;
  McEstimate rhs;
  McEstimate residual;  // paired lhs - rhs
};

/// E[F (M_{t+zeta} - 1)/lambda] against E[sum_i d_i f int M_s dR(s, t_i)/ds ds].
/// t + zeta must be a grid node and the grid must start one kernel support
/// before the first functional node.
DualityReport duality_residual(const CylindricalFunctional& F, const DualityConfig& cfg);

struct DiscreteYConfig {
  KernelParams kernel;
  ChaosParams chaos;
  GridSpec grid;
  double lambda_exp = 0.5;
  double t_plus_zeta = 1.0;
  double T = 4.0;
  int stride = 1;
  std::function<double(double)> phi;       // mollifier
  std::function<double(double)> phi_tail;  // int_x^inf phi
  std::function<double(double)> p;
  std::function<double(double)> p_prime;
  std::size_t replicates = 10000;
  std::uint64_t seed = 1;
  int workers = 0;
};

struct DiscreteYReport {
  McEstimate lhs;
  McEstimate rhs;
  McEstimate difference;
  double combined_stderr = 0.0;
};

/// Both sides of the integration by parts relation for p(Y_N) at partition level.
DiscreteYReport ibp_discrete_Y(const DiscreteYConfig& cfg);

}  // namespace gmclab
