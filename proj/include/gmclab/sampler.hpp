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
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "gmclab/kernel.hpp"

namespace gmclab {

struct GridSpec {
  double t0 = 0.0;
  double t1 = 1.0;
  int n = 2;

  void validate() const;
  double step() const { return (t1 - t0) / (n - 1); }
  double at(int i) const { return t0 + i * step(); }

  /// Index of the node at x; throws RangeError if x is not a node (1e-9 relative).
  int node_index(double x) const;
  /// Grid with spacing `step` covering [t0, t1]; t1 - t0 must be a multiple of step.
  static GridSpec with_step(double t0, double t1, double step);
};

struct FieldSample {
  GridSpec grid;
  std::vector<double> values;
  KernelParams params;
  double diag_variance = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
};

Eigen::MatrixXd gram_matrix(const KernelParams& p, const GridSpec& g);

/// Dense lower Cholesky factor with staged diagonal jitter.
Eigen::MatrixXd factorize(const Eigen::MatrixXd& m);

/// Lower Cholesky factor stored by rows within the kernel bandwidth.
class BandedFactor {
 public:
  BandedFactor(const KernelParams& p, const GridSpec& g);

  int size() const { return n_; }
  int bandwidth() const { return bandwidth_; }
  double jitter() const { return jitter_; }
  double operator()(int i, int j) const;

  /// Returns L z.
  std::vector<double> apply(const std::vector<double>& z) const;
  Eigen::MatrixXd dense() const;

 private:
  bool try_factorize(const std::vector<double>& column_of_lags, double jitter);

  int n_;
  int bandwidth_;
  double jitter_ = 0.0;
  std::vector<double> rows_;
};

/// Shared, immutable factor for (p, g); computed once per process.
std::shared_ptr<const BandedFactor> cached_factor(const KernelParams& p, const GridSpec& g);

FieldSample sample_field(const KernelParams& p, const GridSpec& g, std::uint64_t seed,
                         std::uint64_t replicate = 0);

}  // namespace gmclab
