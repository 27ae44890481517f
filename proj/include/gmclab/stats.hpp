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

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gmclab {

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

/// Streaming mean/variance (Welford), mergeable (Chan et al.).
class McAccumulator {
 public:
  void add(double x);
  void merge(const McAccumulator& other);

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;

  /// Throws EmptyStreamError when nothing was added.
  McEstimate estimate(std::uint64_t seed = 0) const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

McEstimate mc_accumulate(const std::vector<double>& xs, std::uint64_t seed = 0);

/// Paired difference a_i - b_i.
McEstimate paired_difference(const std::vector<double>& a, const std::vector<double>& b,
                             std::uint64_t seed = 0);

/// Worker count: explicit value if positive, else GMCLAB_WORKERS, else 1.
int resolve_workers(int requested);

/// Evaluates fn(0..count-1) on a pool and returns results in index order.
template <typename Fn>
auto parallel_map(std::size_t count, int workers, Fn fn) -> std::vector<decltype(fn(std::size_t{0}))> {
  using Result = decltype(fn(std::size_t{0}));
  std::vector<Result> out(count);
  workers = std::max(1, std::min<int>(resolve_workers(workers), static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    try {
      for (std::size_t i = next++; i < count; i = next++) out[i] = fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = count;
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& thread : pool) thread.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace gmclab
