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

#include "gmclab/errors.hpp"

#include <iostream>
#include <mutex>

namespace gmclab {

namespace {
std::mutex warnings_mutex;
std::vector<std::string> pending_warnings;
}  // namespace

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(warnings_mutex);
  pending_warnings.push_back(message);
}

std::vector<std::string> drain_warnings() {
  std::lock_guard<std::mutex> lock(warnings_mutex);
  std::vector<std::string> out;
  out.swap(pending_warnings);
  return out;
}

}  // namespace gmclab
