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
#include <string>
#include <vector>

#include "json.hpp"

#include "gmclab/kernel.hpp"
#include "gmclab/chaos.hpp"
#include "gmclab/sampler.hpp"

namespace gmclab {

const char* version_string();

const std::vector<std::string>& experiment_names();

struct ExperimentConfig {
  std::string experiment = "covariance-check";
  KernelParams kernel{0.1, 1.0, std::nullopt};
  ChaosParams chaos{0.5, RiemannRule::mid};
  double lambda_exp = 0.5;
  GridSpec grid{0.0, 2.0, 9};
  double psi_center = 1.0;
  double psi_width = 0.5;
  double L = 0.5;
  double T = 4.0;
  double t = 1.0;
  double zeta = 0.5;
  double p = 1.0;
  double x = 0.1;
  std::vector<double> a_values{0.5, 1.0, 2.0};
  std::vector<double> x_values{0.05, 0.1, 0.2, 0.4};
  std::vector<double> horizons{8.0, 64.0};
  std::vector<double> epsilons{0.1, 0.05, 0.025};
  int cells_per_epsilon = 4;
  std::size_t replicates = 10000;
  std::size_t max_replicates = 100000;
  bool escalate = true;
  std::uint64_t seed = 1;
  int workers = 0;
  std::string output_path = ".";

  /// Throws ConfigError / ParameterError before anything is sampled.
  void validate() const;

  nlohmann::json to_json() const;
  /// Unknown keys are rejected.
  static ExperimentConfig from_json(const nlohmann::json& j);
};

ExperimentConfig load_config(const std::string& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct RunResult {
  nlohmann::json report;
  CsvTable table;
  bool gate_passed = true;
};

/// Runs the experiment in memory.
RunResult run_experiment(const ExperimentConfig& cfg);

/// Runs, writes <output_path>/<experiment>.json and .csv, and returns the exit
/// code: 0 success, 2 statistical gate failure, 1 error.
int run(const ExperimentConfig& cfg);

std::string format_number(double v);

std::string to_csv(const CsvTable& table);

}  // namespace gmclab
