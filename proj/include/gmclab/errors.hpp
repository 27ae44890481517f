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

#include <stdexcept>
#include <string>
#include <vector>

namespace gmclab {

/// Base of every error raised by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

/// cov_derivative evaluated on the diagonal, where the derivative jumps.
class DiagonalError : public RangeError {
 public:
  using RangeError::RangeError;
};

class ConditioningError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Too many replicates had a hitting time past the end of the grid.
class GridTooShortError : public Error {
 public:
  using Error::Error;
};

class EmptyStreamError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-fatal diagnostics (e.g. coarse grids). Written to stderr and kept for reports.
void warn(const std::string& message);

/// Returns and clears the warnings emitted since the last call.
std::vector<std::string> drain_warnings();

}  // namespace gmclab
