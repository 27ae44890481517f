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

#include "gmclab/stats.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "gmclab/errors.hpp"

namespace gmclab {

void McAccumulator::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void McAccumulator::merge(const McAccumulator& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double total = na + nb;
  const double delta = other.mean_ - mean_;
  mean_ = (na * mean_ + nb * other.mean_) / total;
  m2_ += other.m2_ + delta * delta * na * nb / total;
  n_ += other.n_;
}

double McAccumulator::variance() const {
  if (n_ < 2) return 0.0;
  return std::max(0.0, m2_ / static_cast<double>(n_ - 1));
}

McEstimate McAccumulator::estimate(std::uint64_t seed) const {
  if (n_ == 0) throw EmptyStreamError("cannot summarize an empty stream");
  McEstimate est;
  est.mean = mean_;
  est.std_error = std::sqrt(variance() / static_cast<double>(n_));
  est.n = n_;
  est.seed = seed;
  return est;
}

McEstimate mc_accumulate(const std::vector<double>& xs, std::uint64_t seed) {
  McAccumulator acc;
  for (double x : xs) acc.add(x);
  return acc.estimate(seed);
}

McEstimate paired_difference(const std::vector<double>& a, const std::vector<double>& b,
                             std::uint64_t seed) {
  if (a.size() != b.size()) throw ParameterError("paired samples differ in length");
  McAccumulator acc;
  for (std::size_t i = 0; i < a.size(); ++i) acc.add(a[i] - b[i]);
  return acc.estimate(seed);
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GMCLAB_WORKERS")) {
    try {
      const int value = std::stoi(env);
      if (value > 0) return value;
    } catch (const std::exception&) {
    }
    warn(std::string("ignoring invalid GMCLAB_WORKERS=") + env);
  }
  return 1;
}

}  // namespace gmclab
