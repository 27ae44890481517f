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

#include <cmath>
#include <set>

#include "doctest.h"
#include "gmclab/errors.hpp"
#include "gmclab/rng.hpp"
#include "gmclab/sampler.hpp"
#include "gmclab/stats.hpp"

using namespace gmclab;

namespace {
const KernelParams kStd{0.1, 1.0, std::nullopt};
}

TEST_CASE("philox known-answer vectors") {
  // Reference values from the Random123 distribution (kat_vectors).
  auto zero = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(zero[0] == 0x6627e8d5u);
  CHECK(zero[1] == 0xe169c58du);
  CHECK(zero[2] == 0xbc57ac4cu);
  CHECK(zero[3] == 0x9b00dbd8u);
  auto pi = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  CHECK(pi[0] == 0xd16cfe09u);
  CHECK(pi[1] == 0x94fdccebu);
  CHECK(pi[2] == 0x5001e420u);
  CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("normal stream moments") {
  NormalStream s(42, 3);
  McAccumulator m1, m2;
  for (int i = 0; i < 200000; ++i) {
    const double z = s.normal();
    m1.add(z);
    m2.add(z * z);
  }
  CHECK(std::abs(m1.mean()) < 4.0 / std::sqrt(200000.0));
  CHECK(std::abs(m2.mean() - 1.0) < 4.0 * std::sqrt(2.0 / 200000.0));
}

TEST_CASE("grid helpers") {
  const GridSpec g = GridSpec::with_step(0.0, 4.5, 0.0125);
  CHECK(g.n == 361);
  CHECK(g.node_index(4.0) == 320);
  CHECK_THROWS_AS(g.node_index(4.001), RangeError);
  CHECK_THROWS_AS(GridSpec::with_step(0.0, 1.0, 0.3), ParameterError);
  CHECK_THROWS_AS((GridSpec{1.0, 0.0, 5}.validate()), ParameterError);
}

TEST_CASE("gram matrix") {
  const Eigen::MatrixXd m = gram_matrix(kStd, GridSpec{0.0, 0.5, 2});
  CHECK(m(0, 0) == doctest::Approx(std::log(10.0)));
  CHECK(m(1, 1) == doctest::Approx(std::log(10.0)));
  CHECK(m(0, 1) == doctest::Approx(std::log(2.0) - 0.5));
  const Eigen::MatrixXd big = gram_matrix(kStd, GridSpec{0.0, 3.0, 97});
  CHECK((big - big.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dense factorization") {
  CHECK((factorize(Eigen::MatrixXd::Identity(4, 4)) - Eigen::MatrixXd::Identity(4, 4)).norm() == 0.0);
  const Eigen::MatrixXd m = gram_matrix(kStd, GridSpec{0.0, 0.5, 2});
  const Eigen::MatrixXd L = factorize(m);
  CHECK(L(0, 0) == doctest::Approx(std::sqrt(std::log(10.0))));
  const Eigen::MatrixXd big = gram_matrix(kStd, GridSpec{0.0, 4.0, 129});
  const Eigen::MatrixXd Lb = factorize(big);
  CHECK((Lb * Lb.transpose() - big).cwiseAbs().maxCoeff() <= 1e-8 * big.diagonal().maxCoeff());
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(factorize(bad), ConditioningError);
  Eigen::MatrixXd singular(2, 2);
  singular << 1.0, 1.0, 1.0, 1.0;
  const Eigen::MatrixXd Ls = factorize(singular);
  CHECK((Ls * Ls.transpose() - singular).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("banded factor agrees with the dense factor") {
  const GridSpec g{0.0, 3.0, 121};
  const BandedFactor band(kStd, g);
  const Eigen::MatrixXd dense = factorize(gram_matrix(kStd, g));
  CHECK((band.dense() - dense).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(band.bandwidth() == 40);
}

TEST_CASE("banded factor is prefix stable") {
  const BandedFactor shorter(kStd, GridSpec::with_step(0.0, 2.0, 0.025));
  const BandedFactor longer(kStd, GridSpec::with_step(0.0, 4.0, 0.025));
  for (int i = 0; i < shorter.size(); ++i)
    for (int j = 0; j <= i; ++j) CHECK(shorter(i, j) == longer(i, j));
  const FieldSample a = sample_field(kStd, GridSpec::with_step(0.0, 2.0, 0.025), 5, 9);
  const FieldSample b = sample_field(kStd, GridSpec::with_step(0.0, 4.0, 0.025), 5, 9);
  for (int i = 0; i < a.grid.n; ++i) CHECK(a.values[i] == b.values[i]);
}

TEST_CASE("sample_field is deterministic and keyed by replicate") {
  const GridSpec g{0.0, 2.0, 81};
  const FieldSample a = sample_field(kStd, g, 11, 0);
  const FieldSample b = sample_field(kStd, g, 11, 0);
  const FieldSample c = sample_field(kStd, g, 11, 1);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  CHECK(a.diag_variance == std::log(10.0));
  CHECK(a.values.size() == 81u);
}

TEST_CASE("coarse grids raise a warning") {
  drain_warnings();
  sample_field(kStd, GridSpec{0.0, 2.0, 5}, 1, 0);
  sample_field(kStd, GridSpec{0.0, 2.0, 5}, 1, 1);
  // Emitted at most once per process; an earlier test may already have consumed it.
  CHECK(drain_warnings().size() <= 1u);
}

TEST_CASE("empirical covariance matches the kernel (N = 1e5)") {
  const GridSpec g{0.0, 2.0, 41};
  const std::size_t N = 100000;
  const std::vector<std::pair<int, int>> pairs{{0, 0}, {20, 20}, {40, 40}, {10, 11}, {10, 12}, {10, 15}, {10, 20}, {5, 30}};
  auto rows = parallel_map(N, 1, [&](std::size_t rep) {
    const FieldSample f = sample_field(kStd, g, 2024, rep);
    std::vector<double> out;
    for (auto [i, j] : pairs) out.push_back(f.values[i] * f.values[j]);
    out.push_back(f.values[7]);
    return out;
  });
  for (std::size_t q = 0; q <= pairs.size(); ++q) {
    McAccumulator acc;
    for (const auto& r : rows) acc.add(r[q]);
    const McEstimate e = acc.estimate();
    const double expected = q < pairs.size() ? cov(kStd, g.at(pairs[q].first), g.at(pairs[q].second)).value : 0.0;
    CHECK(std::abs(e.mean - expected) <= 3.0 * e.std_error);
  }
}

TEST_CASE("stationarity of empirical covariance across translates") {
  const GridSpec g{0.0, 3.0, 61};
  const std::size_t N = 40000;
  auto rows = parallel_map(N, 1, [&](std::size_t rep) {
    const FieldSample f = sample_field(kStd, g, 99, rep);
    return std::vector<double>{f.values[5] * f.values[9], f.values[25] * f.values[29], f.values[50] * f.values[54]};
  });
  std::vector<McEstimate> est;
  for (int q = 0; q < 3; ++q) {
    McAccumulator acc;
    for (const auto& r : rows) acc.add(r[q]);
    est.push_back(acc.estimate());
  }
  for (int q = 1; q < 3; ++q) {
    CHECK(std::abs(est[q].mean - est[0].mean) <= 3.0 * std::hypot(est[q].std_error, est[0].std_error));
  }
}
