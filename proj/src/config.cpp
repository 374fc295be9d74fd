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

#include "oqtherm/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace oqtherm {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) { throw ConfigError(key + ": " + what); }

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void require_object(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!ok) fail(join(path, key), "unknown key");
  }
}

double read_number(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(join(path, key), "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(join(path, key), "must be finite");
  return x;
}

std::int64_t read_integer(const json& obj, const std::string& path, const char* key, std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
  return v.get<std::int64_t>();
}

bool read_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(join(path, key), "expected true or false");
  return v.get<bool>();
}

std::string read_string(const json& obj, const std::string& path, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) fail(join(path, key), "expected a string");
  return v.get<std::string>();
}

std::vector<std::string> read_strings(const json& obj, const std::string& path, const char* key,
                                      std::vector<std::string> fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array()) fail(join(path, key), "expected an array of strings");
  std::vector<std::string> out;
  for (const json& e : v) {
    if (!e.is_string()) fail(join(path, key), "expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

void parse_side(const json& obj, const std::string& path, BathSideConfig& side) {
  side.m = static_cast<int>(read_integer(obj, path, "m", side.m));
  side.gamma = read_number(obj, path, "gamma", side.gamma);
  side.T_targ = read_number(obj, path, "T_targ", side.T_targ);
  side.mu_targ = read_number(obj, path, "mu_targ", side.mu_targ);
  if (obj.contains("q_targ")) side.q_targ = read_number(obj, path, "q_targ", 0.0);
}

void validate_side(const BathSideConfig& side, const std::string& path, const ExperimentConfig& cfg) {
  if (side.m < 1 || side.m > 4) fail(path + ".m", "must be between 1 and 4");
  if (!(side.gamma > 0.0)) fail(path + ".gamma", "coupling rate must be positive");
  if (!(side.T_targ > 0.0)) fail(path + ".T_targ", "temperature must be positive");
  if (side.q_targ) {
    if (side.mu_targ != 0.0) fail(path + ".q_targ", "cannot be combined with a nonzero mu_targ");
    if (cfg.n < 4) fail(path + ".q_targ", "charge-deformed targets require model.n >= 4");
  }
}

}  // namespace

EnsembleSpec BathSideConfig::ensemble() const {
  if (q_targ) return EnsembleSpec::charge_deformed(T_targ, *q_targ);
  return EnsembleSpec::gibbs(T_targ, mu_targ);
}

ChainModel ExperimentConfig::model() const {
  if (family == ModelFamily::IsingTilted) return ChainModel::ising(n, bx, bz, tau, J);
  return ChainModel::xxz_staggered(n, delta, B, tau, J);
}

ChainModel ExperimentConfig::model_at(double b) const {
  if (family != ModelFamily::XxzStaggered) throw std::logic_error("model_at: only xxz_staggered has a B parameter");
  return ChainModel::xxz_staggered(n, delta, b, tau, J);
}

std::vector<BathSpec> ExperimentConfig::baths(const ChainModel& chain) const {
  return {BathSpec{Side::Left, left.m, left.gamma, reduced_target(chain, left.ensemble(), Side::Left, left.m)},
          BathSpec{Side::Right, right.m, right.gamma, reduced_target(chain, right.ensemble(), Side::Right, right.m)}};
}

SolverConfig ExperimentConfig::solver() const {
  SolverConfig s;
  s.tol = tol;
  s.t_max = t_max;
  s.seed = seed;
  return s;
}

bool ExperimentConfig::writes(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

json ExperimentConfig::to_json() const {
  json model_block{{"family", to_string(family)}, {"n", n}, {"J", J}, {"tau", tau}};
  if (family == ModelFamily::IsingTilted) {
    model_block["bx"] = bx;
    model_block["bz"] = bz;
  } else {
    model_block["delta"] = delta;
    model_block["B"] = B;
  }
  auto side_json = [](const BathSideConfig& s) {
    json j{{"m", s.m}, {"gamma", s.gamma}, {"T_targ", s.T_targ}, {"mu_targ", s.mu_targ}};
    j["q_targ"] = s.q_targ ? json(*s.q_targ) : json(nullptr);
    return j;
  };
  json diag{{"observables", observables}, {"moments", moments}, {"B_sweep", B_sweep}};
  if (lss_sector) {
    diag["lss"] = json{{"sector", *lss_sector}, {"n", lss_n.value_or(n)}};
  } else {
    diag["lss"] = nullptr;
  }
  return json{{"model", model_block},
              {"bath", {{"left", side_json(left)}, {"right", side_json(right)}}},
              {"solver",
               {{"tol", tol},
                {"t_max", t_max ? json(*t_max) : json(nullptr)},
                {"seed", seed},
                {"initial_state", initial_state}}},
              {"diagnostics", diag},
              {"output", {{"directory", output_dir}, {"formats", formats}}}};
}

ExperimentConfig parse_config(const json& doc) {
  require_object(doc, "config");
  reject_unknown(doc, "", {"model", "bath", "solver", "diagnostics", "output"});
  ExperimentConfig cfg;

  if (doc.contains("model")) {
    const json& m = doc.at("model");
    require_object(m, "model");
    reject_unknown(m, "model", {"family", "n", "J", "tau", "bx", "bz", "delta", "B"});
    const std::string family = read_string(m, "model", "family", to_string(cfg.family));
    try {
      cfg.family = model_family_from_string(family);
    } catch (const std::invalid_argument&) {
      fail("model.family", "unknown family '" + family + "' (expected ising_tilted or xxz_staggered)");
    }
    const bool ising = cfg.family == ModelFamily::IsingTilted;
    for (const char* key : {"bx", "bz"}) {
      if (!ising && m.contains(key)) fail(std::string("model.") + key, "not a parameter of xxz_staggered");
    }
    for (const char* key : {"delta", "B"}) {
      if (ising && m.contains(key)) fail(std::string("model.") + key, "not a parameter of ising_tilted");
    }
    cfg.n = static_cast<int>(read_integer(m, "model", "n", cfg.n));
    cfg.J = read_number(m, "model", "J", cfg.J);
    cfg.tau = static_cast<int>(read_integer(m, "model", "tau", cfg.tau));
    cfg.bx = read_number(m, "model", "bx", cfg.bx);
    cfg.bz = read_number(m, "model", "bz", cfg.bz);
    cfg.delta = read_number(m, "model", "delta", cfg.delta);
    cfg.B = read_number(m, "model", "B", cfg.B);
  }
  if (cfg.n < 2 || cfg.n > kMaxLiouvilleSites) {
    fail("model.n", "must satisfy 2 <= n <= " + std::to_string(kMaxLiouvilleSites));
  }
  if (cfg.tau < 0) fail("model.tau", "must be non-negative");
  try {
    cfg.model().validate();
  } catch (const std::exception& e) {
    fail("model", e.what());
  }

  cfg.left.m = cfg.right.m = std::min(2, cfg.n / 2);
  if (doc.contains("bath")) {
    const json& b = doc.at("bath");
    require_object(b, "bath");
    reject_unknown(b, "bath", {"m", "gamma", "T_targ", "mu_targ", "q_targ", "left", "right"});
    BathSideConfig shared = cfg.left;
    parse_side(b, "bath", shared);
    validate_side(shared, "bath", cfg);
    cfg.left = shared;
    cfg.right = shared;
    for (auto [key, side] : {std::pair{"left", &cfg.left}, std::pair{"right", &cfg.right}}) {
      if (!b.contains(key)) continue;
      const std::string path = std::string("bath.") + key;
      const json& s = b.at(key);
      require_object(s, path);
      reject_unknown(s, path, {"m", "gamma", "T_targ", "mu_targ", "q_targ"});
      parse_side(s, path, *side);
      validate_side(*side, path, cfg);
    }
  }
  if (cfg.left.m + cfg.right.m > cfg.n) {
    fail("bath", "supports overlap: m_left + m_right = " + std::to_string(cfg.left.m + cfg.right.m) +
                     " must not exceed n = " + std::to_string(cfg.n));
  }

  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    require_object(s, "solver");
    reject_unknown(s, "solver", {"tol", "t_max", "seed", "initial_state"});
    cfg.tol = read_number(s, "solver", "tol", cfg.tol);
    if (s.contains("t_max") && !s.at("t_max").is_null()) cfg.t_max = read_number(s, "solver", "t_max", 0.0);
    const std::int64_t seed = read_integer(s, "solver", "seed", static_cast<std::int64_t>(cfg.seed));
    if (seed < 0) fail("solver.seed", "must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.initial_state = read_string(s, "solver", "initial_state", cfg.initial_state);
  }
  if (!(cfg.tol > 0.0)) fail("solver.tol", "must be positive");
  if (cfg.t_max && !(*cfg.t_max > 0.0)) fail("solver.t_max", "must be positive");
  if (cfg.initial_state != "maximally_mixed" && cfg.initial_state != "random_product") {
    fail("solver.initial_state", "expected maximally_mixed or random_product");
  }

  if (doc.contains("diagnostics")) {
    const json& d = doc.at("diagnostics");
    require_object(d, "diagnostics");
    reject_unknown(d, "diagnostics", {"observables", "moments", "lss", "B_sweep"});
    cfg.observables = read_strings(d, "diagnostics", "observables", cfg.observables);
    for (const std::string& name : cfg.observables) {
      const auto& known = known_observables();
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        fail("diagnostics.observables", "unknown observable '" + name + "'");
      }
    }
    cfg.moments = read_bool(d, "diagnostics", "moments", cfg.moments);
    if (d.contains("lss") && !d.at("lss").is_null()) {
      const json& l = d.at("lss");
      require_object(l, "diagnostics.lss");
      reject_unknown(l, "diagnostics.lss", {"sector", "n"});
      cfg.lss_sector = read_string(l, "diagnostics.lss", "sector", "auto");
      if (l.contains("n")) cfg.lss_n = static_cast<int>(read_integer(l, "diagnostics.lss", "n", cfg.n));
    }
    if (d.contains("B_sweep")) {
      const json& grid = d.at("B_sweep");
      if (!grid.is_array()) fail("diagnostics.B_sweep", "expected an array of numbers");
      for (const json& e : grid) {
        if (!e.is_number() || !std::isfinite(e.get<double>())) {
          fail("diagnostics.B_sweep", "expected an array of finite numbers");
        }
        cfg.B_sweep.push_back(e.get<double>());
      }
    }
  }
  if (cfg.moments && cfg.n < 6) fail("diagnostics.moments", "requires model.n >= 6");
  if (!cfg.B_sweep.empty() && cfg.family != ModelFamily::XxzStaggered) {
    fail("diagnostics.B_sweep", "requires model.family = xxz_staggered");
  }
  if (cfg.lss_n && (*cfg.lss_n < 2 || *cfg.lss_n > kMaxDenseEnsembleSites)) {
    fail("diagnostics.lss.n", "must satisfy 2 <= n <= " + std::to_string(kMaxDenseEnsembleSites));
  }
  if (cfg.lss_sector && *cfg.lss_sector != "auto") {
    Sector sector;
    try {
      sector = sector_from_string(*cfg.lss_sector);
    } catch (const std::exception& e) {
      fail("diagnostics.lss.sector", e.what());
    }
    ChainModel probe = cfg.model();
    if (cfg.lss_n) probe = cfg.family == ModelFamily::IsingTilted
                               ? ChainModel::ising(*cfg.lss_n, cfg.bx, cfg.bz, cfg.tau, cfg.J)
                               : ChainModel::xxz_staggered(*cfg.lss_n, cfg.delta, cfg.B, cfg.tau, cfg.J);
    if (sector.kind == SectorKind::Magnetization && !probe.conserves_magnetization()) {
      fail("diagnostics.lss.sector", "model does not conserve total magnetization");
    }
    if ((sector.kind == SectorKind::ReflectionEven || sector.kind == SectorKind::ReflectionOdd) &&
        !probe.reflection_symmetric()) {
      fail("diagnostics.lss.sector", "model is not reflection symmetric");
    }
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    require_object(o, "output");
    reject_unknown(o, "output", {"directory", "formats"});
    cfg.output_dir = read_string(o, "output", "directory", cfg.output_dir);
    cfg.formats = read_strings(o, "output", "formats", cfg.formats);
  }
  if (cfg.output_dir.empty()) fail("output.directory", "must not be empty");
  for (const std::string& f : cfg.formats) {
    if (f != "csv" && f != "json") fail("output.formats", "unknown format '" + f + "' (expected csv or json)");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path.string() + " is not valid JSON (" + e.what() + ")");
  }
  return parse_config(doc);
}

}  // namespace oqtherm
