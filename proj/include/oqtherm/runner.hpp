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

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "oqtherm/config.hpp"

namespace oqtherm {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 1,
  kExitNotConverged = 2,  // steady state or thermometry failed
  kExitCheckFailed = 3,   // verify only
};

// 12 significant digits, scientific.
std::string format_number(double x);

struct PointSummary {
  double B = 0.0;
  int exit_code = kExitOk;
  std::string message;
  std::optional<ThermometryResult> thermometry;
  std::optional<double> dq4;
  std::optional<double> eta;
};

/// One steady-state run of `model` into `dir`: manifest.json,
/// steady_state.json, observables.csv, convergence.csv and the optional
/// moments.csv / lss.csv.
PointSummary run_point(const ExperimentConfig& config, const ChainModel& model, const std::filesystem::path& dir,
                       std::ostream& log);

struct RunOptions {
  int parallel = 1;  // concurrent sweep points
};

/// Single run, or a B sweep with one subdirectory per B (B = 0 always
/// included as the baseline) plus eta_vs_B.csv and dq4_vs_B.csv.
int run_experiment(const ExperimentConfig& config, std::ostream& log, const RunOptions& options = {});

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Structural checks that need no long propagation. For n <= 4 the dense
/// null-space oracle is compared against a propagated steady state.
std::vector<CheckResult> verify_checks(const ExperimentConfig& config);
int verify_experiment(const ExperimentConfig& config, std::ostream& out);

}  // namespace oqtherm
