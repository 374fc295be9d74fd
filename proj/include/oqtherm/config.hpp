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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "oqtherm/bath.hpp"
#include "oqtherm/diagnostics.hpp"
#include "oqtherm/liouville.hpp"
#include "oqtherm/models.hpp"
#include "oqtherm/thermal.hpp"

namespace oqtherm {

/// Raised for any invalid experiment configuration. The message starts with
/// the dotted key path, e.g. "bath.T_targ: temperature must be positive".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BathSideConfig {
  int m = 2;  // parse_config resolves the default to min(2, n / 2)
  double gamma = 1.0;
  double T_targ = 4.0;
  double mu_targ = 0.0;
  std::optional<double> q_targ;

  EnsembleSpec ensemble() const;
};

struct ExperimentConfig {
  // model
  ModelFamily family = ModelFamily::IsingTilted;
  int n = 6;
  double J = 1.0;
  int tau = 0;
  double bx = 1.0;     // ising_tilted
  double bz = 1.0;     // ising_tilted
  double delta = 0.5;  // xxz_staggered
  double B = 0.0;      // xxz_staggered

  // bath
  BathSideConfig left, right;

  // solver
  double tol = 1e-9;
  std::optional<double> t_max;
  std::uint64_t seed = 1;
  std::string initial_state = "maximally_mixed";  // or "random_product"

  // diagnostics
  std::vector<std::string> observables{"sigma_x", "sigma_y", "sigma_z", "bond_energy", "xx", "zz", "q4"};
  bool moments = false;
  std::optional<std::string> lss_sector;  // "auto" or a Sector label
  std::optional<int> lss_n;               // chain length for the spectrum, defaults to n
  std::vector<double> B_sweep;

  // output
  std::string output_dir = "oqtherm_out";
  std::vector<std::string> formats{"csv", "json"};

  ChainModel model() const;
  ChainModel model_at(double B) const;  // xxz_staggered only
  std::vector<BathSpec> baths(const ChainModel& model) const;
  SolverConfig solver() const;
  bool writes(const std::string& format) const;

  nlohmann::json to_json() const;
};

inline const std::vector<std::string>& known_observables() {
  static const std::vector<std::string> names{"sigma_x", "sigma_y", "sigma_z", "bond_energy", "xx", "zz", "q4"};
  return names;
}

/// Parses and validates; every check runs before any physics is computed.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace oqtherm
