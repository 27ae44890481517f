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

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "gmclab/errors.hpp"
#include "gmclab/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Gaussian multiplicative chaos simulation and identity checks"};
  app.set_version_flag("--version", gmclab::version_string());
  std::string experiment;
  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t replicates = 0;
  std::string out_dir;
  int workers = 0;
  app.add_option("experiment", experiment, "experiment name")
      ->required()
      ->check(CLI::IsMember(gmclab::experiment_names()));
  app.add_option("--config", config_path, "flat JSON config file");
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  auto* rep_opt = app.add_option("--replicates", replicates, "Monte Carlo replicates")->check(CLI::PositiveNumber);
  auto* out_opt = app.add_option("--out", out_dir, "output directory");
  auto* workers_opt = app.add_option("--workers", workers, "worker threads (default: GMCLAB_WORKERS or 1)");
  CLI11_PARSE(app, argc, argv);

  try {
    gmclab::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = gmclab::load_config(config_path);
    cfg.experiment = experiment;
    if (*seed_opt) cfg.seed = seed;
    if (*rep_opt) {
      cfg.replicates = replicates;
      cfg.max_replicates = std::max(cfg.max_replicates, replicates);
    }
    if (*out_opt) cfg.output_path = out_dir;
    if (*workers_opt) cfg.workers = workers;
    cfg.validate();
    return gmclab::run(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
