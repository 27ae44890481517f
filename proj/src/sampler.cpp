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

#include "gmclab/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "gmclab/errors.hpp"
#include "gmclab/rng.hpp"

namespace gmclab {

void GridSpec::validate() const {
  if (n < 2 || !(t1 > t0) || !std::isfinite(t0) || !std::isfinite(t1)) {
    std::ostringstream msg;
    msg << "grid needs n >= 2 and t1 > t0 (got t0=" << t0 << ", t1=" << t1 << ", n=" << n << ")";
    throw ParameterError(msg.str());
  }
}

int GridSpec::node_index(double x) const {
  const double pos = (x - t0) / step();
  const double idx = std::round(pos);
  if (std::abs(pos - idx) > 1e-9 * std::max(1.0, std::abs(pos)) || idx < 0 || idx > n - 1) {
    std::ostringstream msg;
    msg << "point " << x << " is not a node of the grid [" << t0 << ", " << t1 << "] with n=" << n;
    throw RangeError(msg.str());
  }
  return static_cast<int>(idx);
}

GridSpec GridSpec::with_step(double t0, double t1, double step) {
  const double cells = (t1 - t0) / step;
  const double rounded = std::round(cells);
  if (!(step > 0.0) || rounded < 1 || std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells)) {
    std::ostringstream msg;
    msg << "interval [" << t0 << ", " << t1 << "] is not a whole number of steps " << step;
    throw ParameterError(msg.str());
  }
  GridSpec g;
  g.t0 = t0;
  g.t1 = t1;
  g.n = static_cast<int>(rounded) + 1;
  return g;
}

Eigen::MatrixXd gram_matrix(const KernelParams& p, const GridSpec& g) {
  p.validate();
  g.validate();
  Eigen::MatrixXd m(g.n, g.n);
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j <= i; ++j) {
      // Lags are computed from indices so every matrix entry with the same lag is identical.
      const double v = profile(p, (i - j) * g.step());
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

namespace {

constexpr double kFirstJitter = 1e-10;
constexpr double kLastJitter = 1e-6;

}  // namespace

Eigen::MatrixXd factorize(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw ParameterError("factorize needs a square matrix");
  const double maxdiag = m.diagonal().cwiseAbs().maxCoeff();
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  for (double jitter = kFirstJitter; jitter <= kLastJitter * 1.0001; jitter *= 10.0) {
    Eigen::MatrixXd shifted = m;
    shifted.diagonal().array() += jitter * maxdiag;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) {
      warn("factorize: added diagonal jitter " + std::to_string(jitter) + " x max diagonal");
      return llt.matrixL();
    }
  }
  throw ConditioningError("Cholesky factorization failed after jitter escalation to 1e-6 x max diagonal");
}

BandedFactor::BandedFactor(const KernelParams& p, const GridSpec& g) : n_(g.n) {
  p.validate();
  g.validate();
  const double step = g.step();
  bandwidth_ = std::min(n_ - 1, static_cast<int>(std::ceil(p.support() / step)));
  std::vector<double> lags(bandwidth_ + 1);
  for (int k = 0; k <= bandwidth_; ++k) lags[k] = profile(p, k * step);
  if (try_factorize(lags, 0.0)) return;
  for (double jitter = kFirstJitter; jitter <= kLastJitter * 1.0001; jitter *= 10.0) {
    if (try_factorize(lags, jitter * lags[0])) {
      jitter_ = jitter * lags[0];
      warn("banded factorization: added diagonal jitter " + std::to_string(jitter) + " x max diagonal");
      return;
    }
  }
  throw ConditioningError("banded Cholesky failed after jitter escalation to 1e-6 x max diagonal");
}

bool BandedFactor::try_factorize(const std::vector<double>& lags, double jitter) {
  const int w = bandwidth_ + 1;
  rows_.assign(static_cast<std::size_t>(n_) * w, 0.0);
  // Row i holds L(i, i-bandwidth .. i) at offsets 0 .. bandwidth.
  for (int i = 0; i < n_; ++i) {
    const int first = std::max(0, i - bandwidth_);
    double* row_i = &rows_[static_cast<std::size_t>(i) * w];
    for (int j = first; j <= i; ++j) {
      const double* row_j = &rows_[static_cast<std::size_t>(j) * w];
      double sum = lags[i - j] + (i == j ? jitter : 0.0);
      const int k0 = std::max(first, j - bandwidth_);
      for (int k = k0; k < j; ++k) sum -= row_i[k - i + bandwidth_] * row_j[k - j + bandwidth_];
      if (i == j) {
        if (!(sum > 0.0)) return false;
        row_i[bandwidth_] = std::sqrt(sum);
      } else {
        row_i[j - i + bandwidth_] = sum / row_j[bandwidth_];
      }
    }
  }
  return true;
}

double BandedFactor::operator()(int i, int j) const {
  if (j > i || i - j > bandwidth_) return 0.0;
  return rows_[static_cast<std::size_t>(i) * (bandwidth_ + 1) + (j - i + bandwidth_)];
}

std::vector<double> BandedFactor::apply(const std::vector<double>& z) const {
  if (static_cast<int>(z.size()) != n_) throw ParameterError("BandedFactor::apply: size mismatch");
  std::vector<double> out(n_);
  const int w = bandwidth_ + 1;
  for (int i = 0; i < n_; ++i) {
    const int first = std::max(0, i - bandwidth_);
    const double* row = &rows_[static_cast<std::size_t>(i) * w];
    double sum = 0.0;
    for (int k = first; k <= i; ++k) sum += row[k - i + bandwidth_] * z[k];
    out[i] = sum;
  }
  return out;
}

Eigen::MatrixXd BandedFactor::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = std::max(0, i - bandwidth_); j <= i; ++j) m(i, j) = (*this)(i, j);
  return m;
}

std::shared_ptr<const BandedFactor> cached_factor(const KernelParams& p, const GridSpec& g) {
  using Key = std::tuple<double, double, double, double, double, int>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const BandedFactor>> cache;
  const Key key{p.epsilon, p.r, p.lambda_shape.value_or(-1.0), g.t0, g.t1, g.n};
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto factor = std::make_shared<const BandedFactor>(p, g);
  std::lock_guard<std::mutex> lock(mutex);
  if (cache.size() > 64) cache.clear();
  return cache.emplace(key, factor).first->second;
}

FieldSample sample_field(const KernelParams& p, const GridSpec& g, std::uint64_t seed,
                         std::uint64_t replicate) {
  p.validate();
  g.validate();
  if (g.step() > p.epsilon / 4.0 * (1.0 + 1e-12)) {
    static std::once_flag once;
    std::call_once(once, [] { warn("grid step exceeds epsilon/4; the inner covariance branch is under-resolved"); });
  }
  const auto factor = cached_factor(p, g);
  NormalStream stream(seed, replicate);
  std::vector<double> z(g.n);
  for (double& x : z) x = stream.normal();
  FieldSample out;
  out.grid = g;
  out.values = factor->apply(z);
  out.params = p;
  out.diag_variance = p.diagonal();
  out.seed = seed;
  out.replicate = replicate;
  return out;
}

}  // namespace gmclab
