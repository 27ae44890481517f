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

#include <functional>
#include <optional>

namespace gmclab {

/// Truncation parameters of the stationary covariance
///
///   R(h) = ln(r/eps) - (1/eps - 1/r)|h|          |h| <= eps
///   R(h) = ln(r/|h|) + |h|/r - 1                  eps < |h| < r
///   R(h) = 0                                      |h| >= r
///
/// With lambda_shape set, the shape-modified field is used instead: both
/// branches gain (1 - lambda)(1 - |h|/r), the log branch runs up to r/lambda
/// and the kernel vanishes beyond that.
struct KernelParams {
  double epsilon = 0.1;
  double r = 1.0;
  std::optional<double> lambda_shape;

  /// Throws ParameterError unless 0 < epsilon < r (and 0 < lambda_shape < 1).
  void validate() const;

  /// |h| beyond which the covariance is identically zero.
  double support() const;

  /// R(t,t) = R(0). Equals ln(r/epsilon) for the standard kernel.
  double diagonal() const;
};

enum class Regime { inner, log, zero };

struct KernelEval {
  double value = 0.0;
  Regime regime = Regime::zero;
};

/// Covariance profile R(h) as a function of the lag h (even in h).
double profile(const KernelParams& p, double h);

/// d/dh R(h) for h > 0. Zero at and beyond the support.
double profile_slope(const KernelParams& p, double h);

/// Branch formulas continued past the support cut. Used for left limits at
/// the cut, where the shape-modified kernel jumps.
double profile_uncut(const KernelParams& p, double h);

/// Integral of R(u) du over u in [0, h] for h >= 0.
double profile_antiderivative(const KernelParams& p, double h);

KernelEval cov(const KernelParams& p, double s, double t);

/// dR(tau, t)/dt. Throws DiagonalError when t == tau.
double cov_derivative(const KernelParams& p, double tau, double t);

/// E|U(s) - U(t)|^2 = 2 (R(s,s) - R(s,t)).
double difference_variance(const KernelParams& p, double s, double t);

/// Integral of R(t, u) du over u in [a, b].
double cov_integral(const KernelParams& p, double t, double a, double b);

/// Integral over t in [0,T] of |dR(s,t)/dt|^alpha. Closed form for alpha == 1,
/// adaptive quadrature split at the branch points otherwise.
double abs_derivative_integral(const KernelParams& p, double s, double T, double alpha);

/// F(s) = integral over t in [0,T] of f(t) dR(s,t)/dt.
double weighted_derivative_integral(const KernelParams& p, double s,
                                    const std::function<double(double)>& f, double T);

}  // namespace gmclab
