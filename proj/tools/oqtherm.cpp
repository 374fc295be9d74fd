// Copyright 2026 The oqtherm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// oqtherm run <config.json> | oqtherm verify <config.json>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "oqtherm/config.hpp"
#include "oqtherm/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Boundary-driven spin chains: steady states, thermometry and level statistics"};
  app.set_version_flag("--version", std::string(oqtherm::kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  int parallel = 1;
  app.add_option("--output-dir", output_dir, "Override output.directory");
  app.add_option("--seed", seed, "Override solver.seed");
  app.add_option("--parallel", parallel, "Concurrent B-sweep points")->check(CLI::PositiveNumber);

  CLI::App* run = app.add_subcommand("run", "Propagate to the steady state and write artifacts");
  run->add_option("config", config_path, "JSON experiment config")->required();
  CLI::App* verify = app.add_subcommand("verify", "Run the structural checks for a config");
  verify->add_option("config", config_path, "JSON experiment config")->required();

  CLI11_PARSE(app, argc, argv);

  oqtherm::ExperimentConfig cfg;
  try {
    cfg = oqtherm::load_config(config_path);
    if (output_dir) cfg.output_dir = *output_dir;
    if (seed) cfg.seed = *seed;
    if (run->parsed()) return oqtherm::run_experiment(cfg, std::cout, oqtherm::RunOptions{parallel});
    return oqtherm::verify_experiment(cfg, std::cout);
  } catch (const oqtherm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return oqtherm::kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return oqtherm::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return oqtherm::kExitNotConverged;
  }
}
