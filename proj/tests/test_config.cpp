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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oqtherm/runner.hpp"

using namespace oqtherm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string error_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch_dir(const std::string& tag) {
  std::random_device rd;
  const fs::path p = fs::temp_directory_path() / ("oqtherm_" + tag + "_" + std::to_string(rd()));
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("defaults") {
    const ExperimentConfig cfg = parse_config(json::object());
    CHECK(cfg.family == ModelFamily::IsingTilted);
    CHECK(cfg.n == 6);
    CHECK(cfg.left.m == 2);
    CHECK(cfg.right.m == 2);
    CHECK(cfg.left.T_targ == 4.0);
    CHECK(cfg.tol == 1e-9);
    CHECK(cfg.writes("csv"));
    CHECK(parse_config(json{{"model", {{"n", 2}}}}).left.m == 1);
  }

  TEST_CASE("per-side overrides inherit shared bath keys") {
    const ExperimentConfig cfg =
        parse_config(json{{"bath", {{"gamma", 0.5}, {"T_targ", 3.0}, {"right", {{"T_targ", 2.0}}}}}});
    CHECK(cfg.left.T_targ == 3.0);
    CHECK(cfg.right.T_targ == 2.0);
    CHECK(cfg.right.gamma == 0.5);
    const std::vector<BathSpec> baths = cfg.baths(cfg.model());
    REQUIRE(baths.size() == 2);
    CHECK(baths[1].side == Side::Right);
    CHECK(baths[1].target.rows() == 4);
  }

  TEST_CASE("unknown keys are rejected with their path") {
    CHECK(error_of(json{{"modle", json::object()}}).rfind("modle: unknown key", 0) == 0);
    CHECK(error_of(json{{"bath", {{"left", {{"temp", 1.0}}}}}}).rfind("bath.left.temp: unknown key", 0) == 0);
    CHECK(error_of(json{{"diagnostics", {{"lss", {{"bins", 10}}}}}}).rfind("diagnostics.lss.bins", 0) == 0);
    CHECK(error_of(json{{"model", {{"family", "ising_tilted"}, {"delta", 0.5}}}}).find("not a parameter") !=
          std::string::npos);
  }

  TEST_CASE("value errors name the offending key") {
    CHECK(error_of(json{{"bath", {{"T_targ", -1.0}}}}) == "bath.T_targ: temperature must be positive");
    CHECK(error_of(json{{"bath", {{"m", 4}}}, {"model", {{"n", 6}}}}) ==
          "bath: supports overlap: m_left + m_right = 8 must not exceed n = 6");
    CHECK(error_of(json{{"model", {{"n", 11}}}}).rfind("model.n", 0) == 0);
    CHECK(error_of(json{{"model", {{"n", "six"}}}}) == "model.n: expected an integer");
    CHECK(error_of(json{{"solver", {{"tol", 0.0}}}}).rfind("solver.tol", 0) == 0);
    CHECK(error_of(json{{"solver", {{"initial_state", "ground"}}}}).rfind("solver.initial_state", 0) == 0);
    CHECK(error_of(json{{"diagnostics", {{"observables", {"entropy"}}}}}).rfind("diagnostics.observables", 0) == 0);
    CHECK(error_of(json{{"diagnostics", {{"B_sweep", {0.1}}}}}).rfind("diagnostics.B_sweep", 0) == 0);
    CHECK(error_of(json{{"diagnostics", {{"moments", true}}}, {"model", {{"n", 4}}}}).rfind("diagnostics.moments", 0) ==
          0);
    CHECK(error_of(json{{"diagnostics", {{"lss", {{"sector", "magnetization=0"}}}}}}).rfind("diagnostics.lss", 0) ==
          0);
    CHECK(error_of(json{{"output", {{"formats", {"xml"}}}}}).rfind("output.formats", 0) == 0);
    CHECK(error_of(json{{"bath", {{"q_targ", 1.0}, {"mu_targ", 0.2}}}}).rfind("bath", 0) == 0);
  }

  TEST_CASE("configuration round-trips through its JSON form") {
    const ExperimentConfig a = parse_config(json{{"model", {{"family", "xxz_staggered"}, {"n", 8}, {"B", 0.3}}},
                                                 {"bath", {{"q_targ", 2.0}}},
                                                 {"diagnostics", {{"B_sweep", {0.2, 0.5}}}}});
    const ExperimentConfig b = parse_config(a.to_json());
    CHECK(b.to_json() == a.to_json());
    CHECK(b.left.q_targ == 2.0);
  }

  TEST_CASE("config files allow comments") {
    const fs::path dir = scratch_dir("cfg");
    fs::create_directories(dir);
    std::ofstream(dir / "c.json") << "{\n  // small chain\n  \"model\": {\"n\": 4}\n}\n";
    CHECK(load_config(dir / "c.json").n == 4);
    CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
    fs::remove_all(dir);
  }

  TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "1.00000000000e-01");
    CHECK(format_number(-2.5) == "-2.50000000000e+00");
  }

  TEST_CASE("verify checks pass for a small chain") {
    const ExperimentConfig cfg = parse_config(json{{"model", {{"n", 3}}}, {"bath", {{"m", 1}}}});
    const std::vector<CheckResult> checks = verify_checks(cfg);
    bool oracle = false;
    for (const CheckResult& c : checks) {
      INFO(c.name << " = " << c.value);
      CHECK(c.passed);
      oracle = oracle || c.name.find("oracle") != std::string::npos;
    }
    CHECK(oracle);
    std::ostringstream out;
    CHECK(verify_experiment(cfg, out) == kExitOk);
  }

  TEST_CASE("a single run writes every artifact") {
    const fs::path dir = scratch_dir("run");
    ExperimentConfig cfg = parse_config(json{{"model", {{"n", 4}}}, {"solver", {{"tol", 1e-8}}}});
    std::ostringstream log;
    const PointSummary s = run_point(cfg, cfg.model(), dir, log);
    CHECK(s.exit_code == kExitOk);
    REQUIRE(s.thermometry.has_value());
    CHECK(s.thermometry->T > 0.0);
    for (const char* f : {"manifest.json", "steady_state.json", "observables.csv", "convergence.csv"})
      CHECK(fs::exists(dir / f));
    const json ss = json::parse(slurp(dir / "steady_state.json"));
    CHECK(ss.at("converged").get<bool>());
    CHECK(ss.at("residual").get<double>() < 1e-8);
    const json manifest = json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest.at("config") == cfg.to_json());
    std::ifstream obs(dir / "observables.csv");
    std::string header;
    std::getline(obs, header);
    CHECK(header == "observable,index,steady_state,reference,deviation");
    fs::remove_all(dir);
  }

  TEST_CASE("non-convergence maps to exit code 2") {
    const fs::path dir = scratch_dir("slow");
    ExperimentConfig cfg = parse_config(json{{"model", {{"n", 4}}}, {"solver", {{"t_max", 2.0}}}});
    std::ostringstream log;
    CHECK(run_point(cfg, cfg.model(), dir, log).exit_code == kExitNotConverged);
    fs::remove_all(dir);
  }

  TEST_CASE("identical sweeps produce identical CSV bytes") {
    const json doc{{"model", {{"family", "xxz_staggered"}, {"n", 4}}},
                   {"bath", {{"q_targ", 1.0}}},
                   {"solver", {{"tol", 1e-8}, {"initial_state", "random_product"}, {"seed", 5}}},
                   {"diagnostics", {{"B_sweep", {0.5, 1.0}}}}};
    std::vector<fs::path> dirs;
    for (int parallel : {1, 2, 1}) {
      ExperimentConfig cfg = parse_config(doc);
      cfg.output_dir = scratch_dir("sweep").string();
      std::ostringstream log;
      CHECK(run_experiment(cfg, log, RunOptions{parallel}) == kExitOk);
      dirs.emplace_back(cfg.output_dir);
    }
    int compared = 0;
    for (const auto& entry : fs::recursive_directory_iterator(dirs[0])) {
      if (entry.path().extension() != ".csv") continue;
      const fs::path rel = fs::relative(entry.path(), dirs[0]);
      const std::string ref = slurp(entry.path());
      for (std::size_t k = 1; k < dirs.size(); ++k) CHECK(slurp(dirs[k] / rel) == ref);
      ++compared;
    }
    CHECK(compared >= 5);
    CHECK(fs::exists(dirs[0] / "dq4_vs_B.csv"));
    for (const fs::path& d : dirs) fs::remove_all(d);
  }
}
