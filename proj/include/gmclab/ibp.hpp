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
#include <map>
#include <string>
#include <vector>

#include "gmclab/chaos.hpp"
#include "gmclab/stats.hpp"

namespace gmclab {

/// psi(x) = C exp(-1 / (1 - u^2)), u = (x - center) / width, normalized to unit mass.
class BumpFunction {
 public:
  BumpFunction(double center = 1.0, double width = 0.5);

  double operator()(double x) const;
  double derivative(double x) const;
  /// int_{-inf}^x psi.
  double cdf(double x) const;
  /// int_x^inf psi.
  double tail(double x) const { return 1.0 - cdf(x); }
  /// int psi(a) a da.
  double first_moment() const;

  double center() const { return center_; }
  double width() const { return width_; }
  double normalization() const { return normalization_; }
  double lower() const { return center_ - width_; }
  double upper() const { return center_ + width_; }

 private:
  double center_;
  double width_;
  double normalization_;
  std::vector<double> cdf_table_;  // cdf at kCdfPanels + 1 equally spaced points
};

struct IbpParams {
  KernelParams kernel{0.05, 1.0, std::nullopt};
  ChaosParams chaos{0.5, RiemannRule::mid};
  double lambda_exp = 0.5;
  BumpFunction psi{1.0, 0.5};
  double L = 0.5;
  double T = 4.0;
  int cells_per_epsilon = 4;
  std::size_t replicates = 10000;
  std::size_t max_replicates = 100000;
  bool escalate = true;
  std::uint64_t seed = 1;
  int workers = 0;
};

struct IbpReport {
  std::string identity;
  McEstimate lhs;
  McEstimate rhs;
  double difference = 0.0;
  double combined_stderr = 0.0;  // sqrt(se_lhs^2 + se_rhs^2)
  double paired_stderr = 0.0;    // stderr of the per-replicate difference
  std::size_t replicates = 0;
  std::size_t rejected_replicates = 0;
  GridSpec grid;
  IbpParams params;
  std::map<std::string, double> extras;

  /// |difference| <= 3 * paired_stderr + 1e-10.
  bool passed() const;
  double rejection_rate() const;
};

/// Window identity at fixed epsilon, truncated at T.
IbpReport verify_fixed_epsilon(const IbpParams& params);

/// Same identity with the epsilon -> 0 kernel in the correction, for each epsilon.
std::vector<IbpReport> verify_epsilon_zero_formula(const IbpParams& params,
                                                   const std::vector<double>& epsilons);

/// |gap| non-increasing along the sequence with one stderr of slack.
bool gap_trend_non_increasing(const std::vector<IbpReport>& reports);

/// Untruncated window identity; replicates whose psi-support is not exhausted by T are rejected.
/// extras carry the comparison against a run on [0, 2T].
IbpReport verify_infinite_T(const IbpParams& params);

/// int psi(a) E[tau_a] da against int psi(a) a da plus the correction (L >= r).
IbpReport verify_hitting_expectation(const IbpParams& params);

struct TripleIntegral {
  double closed_form = 0.0;
  double quadrature = 0.0;
  double rederived = 0.0;
  bool agrees = false;
};

TripleIntegral deterministic_integral_check(double r, double T);

}  // namespace gmclab
