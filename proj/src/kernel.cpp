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

#include "gmclab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "gmclab/errors.hpp"
#include "gmclab/quadrature.hpp"

namespace gmclab {

void KernelParams::validate() const {
  if (!(epsilon > 0.0) || !(r > epsilon) || !std::isfinite(r)) {
    std::ostringstream msg;
    msg << "kernel parameters need 0 < epsilon < r (got epsilon=" << epsilon << ", r=" << r << ")";
    throw ParameterError(msg.str());
  }
  if (lambda_shape && !(*lambda_shape > 0.0 && *lambda_shape < 1.0)) {
    throw ParameterError("lambda_shape must lie in (0, 1)");
  }
}

double KernelParams::support() const { return lambda_shape ? r / *lambda_shape : r; }

double KernelParams::diagonal() const { return profile(*this, 0.0); }

namespace {

double shape_extra(const KernelParams& p, double h) {
  return p.lambda_shape ? (1.0 - *p.lambda_shape) * (1.0 - h / p.r) : 0.0;
}

double shape_extra_slope(const KernelParams& p) {
  return p.lambda_shape ? -(1.0 - *p.lambda_shape) / p.r : 0.0;
}

// Antiderivative of the uncut profile from 0 to h (h >= 0).
double uncut_antiderivative(const KernelParams& p, double h) {
  const double eps = p.epsilon;
  const double r = p.r;
  const double inner = std::min(h, eps);
  double total = std::log(r / eps) * inner - 0.5 * (1.0 / eps - 1.0 / r) * inner * inner;
  if (h > eps) {
    total += (h * std::log(r / h) + h) - (eps * std::log(r / eps) + eps);
    total += (h * h - eps * eps) / (2.0 * r) - (h - eps);
  }
  if (p.lambda_shape) total += (1.0 - *p.lambda_shape) * (h - h * h / (2.0 * r));
  return total;
}

// Odd extension so that integrals over lags of either sign telescope.
double signed_antiderivative(const KernelParams& p, double v) {
  const double value = profile_antiderivative(p, std::abs(v));
  return v < 0.0 ? -value : value;
}

std::vector<double> branch_points(const KernelParams& p, double s) {
  const double c = p.support();
  return {s - c, s - p.epsilon, s, s + p.epsilon, s + c};
}

}  // namespace

double profile_uncut(const KernelParams& p, double h) {
  h = std::abs(h);
  const double eps = p.epsilon;
  const double r = p.r;
  if (h <= eps) return std::log(r / eps) - (1.0 / eps - 1.0 / r) * h + shape_extra(p, h);
  return std::log(r / h) + h / r - 1.0 + shape_extra(p, h);
}

double profile(const KernelParams& p, double h) {
  h = std::abs(h);
  if (h >= p.support()) return 0.0;
  return profile_uncut(p, h);
}

double profile_slope(const KernelParams& p, double h) {
  h = std::abs(h);
  if (h >= p.support()) return 0.0;
  if (h <= p.epsilon) return -(1.0 / p.epsilon - 1.0 / p.r) + shape_extra_slope(p);
  return -1.0 / h + 1.0 / p.r + shape_extra_slope(p);
}

double profile_antiderivative(const KernelParams& p, double h) {
  return uncut_antiderivative(p, std::min(std::abs(h), p.support()));
}

KernelEval cov(const KernelParams& p, double s, double t) {
  p.validate();
  const double h = std::abs(s - t);
  KernelEval out;
  out.value = profile(p, h);
  if (h <= p.epsilon) {
    out.regime = Regime::inner;
  } else if (h < p.support()) {
    out.regime = Regime::log;
  } else {
    out.regime = Regime::zero;
    out.value = 0.0;
  }
  return out;
}

double cov_derivative(const KernelParams& p, double tau, double t) {
  p.validate();
  if (t == tau) throw DiagonalError("cov_derivative is undefined on the diagonal t == tau");
  const double sign = t > tau ? 1.0 : -1.0;
  return sign * profile_slope(p, t - tau);
}

double difference_variance(const KernelParams& p, double s, double t) {
  p.validate();
  return 2.0 * (profile(p, 0.0) - profile(p, s - t));
}

double cov_integral(const KernelParams& p, double t, double a, double b) {
  return signed_antiderivative(p, b - t) - signed_antiderivative(p, a - t);
}

double abs_derivative_integral(const KernelParams& p, double s, double T, double alpha) {
  p.validate();
  if (!(alpha >= 1.0)) throw ParameterError("abs_derivative_integral needs alpha >= 1");
  if (!(s >= 0.0 && s <= T)) throw RangeError("abs_derivative_integral needs 0 <= s <= T");
  if (alpha == 1.0) {
    // The profile is decreasing on [0, support), so each side telescopes.
    const double top = profile(p, 0.0);
    const double c = p.support();
    double total = 0.0;
    for (double side : {s, T - s}) {
      if (side > 0.0) total += top - profile_uncut(p, std::min(side, c));
    }
    return total;
  }
  auto integrand = [&](double t) {
    if (t == s) return std::pow(std::abs(profile_slope(p, 0.0)), alpha);
    return std::pow(std::abs(profile_slope(p, t - s)), alpha);
  };
  return integrate_pieces(integrand, 0.0, T, branch_points(p, s));
}

double weighted_derivative_integral(const KernelParams& p, double s,
                                    const std::function<double(double)>& f, double T) {
  p.validate();
  if (!(T >= 0.0)) throw RangeError("weighted_derivative_integral needs T >= 0");
  auto integrand = [&](double t) {
    if (t == s) return 0.0;
    const double sign = t > s ? 1.0 : -1.0;
    return f(t) * sign * profile_slope(p, t - s);
  };
  return integrate_pieces(integrand, 0.0, T, branch_points(p, s));
}

}  // namespace gmclab
