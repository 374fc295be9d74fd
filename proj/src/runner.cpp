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

#include "oqtherm/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <unsupported/Eigen/MatrixFunctions>

namespace oqtherm {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", x);
  return buf;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << header << '\n';
  }
  template <typename... Fields>
  void row(const Fields&... fields) {
    std::string sep;
    ((out_ << sep << cell(fields), sep = ","), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double x) { return format_number(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  std::ofstream out_;
};

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

json versions() {
  return json{{"oqtherm", kVersion},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
              {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                           std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                           std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
              {"compiler", __VERSION__}};
}

json model_parameters(const ChainModel& model) {
  json j{{"family", to_string(model.family)}, {"n", model.n}, {"tau", model.tau}, {"couplings", model.couplings}};
  if (model.family == ModelFamily::IsingTilted) {
    j["bx"] = model.bx;
    j["bz"] = model.bz;
  } else {
    j["delta"] = model.delta;
    j["B"] = model.stagger;
    j["fields"] = model.fields;
  }
  return j;
}

json bath_parameters(const ExperimentConfig& cfg, const ChainModel& model) {
  json out = json::array();
  for (auto [side, s] : {std::pair{Side::Left, &cfg.left}, std::pair{Side::Right, &cfg.right}}) {
    const EnsembleSpec e = s->ensemble();
    out.push_back(json{{"side", to_string(side)},
                       {"sites", boundary_sites(side, s->m, model.n)},
                       {"m", s->m},
                       {"gamma", s->gamma},
                       {"ensemble", e.kind == EnsembleKind::Gibbs ? "gibbs" : "charge_deformed"},
                       {"T_targ", e.T},
                       {"mu_targ", e.mu},
                       {"q_targ", e.q}});
  }
  return out;
}

DenseMatrix initial_state(const ExperimentConfig& cfg, int n) {
  if (cfg.initial_state == "random_product") return random_product_state(n, cfg.seed);
  return maximally_mixed(n);
}

ChainModel lss_model(const ExperimentConfig& cfg, const ChainModel& model) {
  if (!cfg.lss_n || *cfg.lss_n == model.n) return model;
  if (model.family == ModelFamily::IsingTilted) return ChainModel::ising(*cfg.lss_n, model.bx, model.bz, model.tau, cfg.J);
  return ChainModel::xxz_staggered(*cfg.lss_n, model.delta, model.stagger, model.tau, cfg.J);
}

void write_observables(const fs::path& path, const ExperimentConfig& cfg, const ObservableReport& ss,
                       const ObservableReport& ref) {
  CsvWriter csv(path, "observable,index,steady_state,reference,deviation");
  auto emit = [&](const std::string& name, const std::vector<double>& a, const std::vector<double>& b) {
    if (std::find(cfg.observables.begin(), cfg.observables.end(), name) == cfg.observables.end()) return;
    for (std::size_t k = 0; k < a.size(); ++k) csv.row(name, static_cast<int>(k), a[k], b[k], a[k] - b[k]);
  };
  emit("sigma_x", ss.sigma_x, ref.sigma_x);
  emit("sigma_y", ss.sigma_y, ref.sigma_y);
  emit("sigma_z", ss.sigma_z, ref.sigma_z);
  emit("bond_energy", ss.bond_energy, ref.bond_energy);
  emit("xx", ss.xx, ref.xx);
  emit("zz", ss.zz, ref.zz);
  emit("q4", ss.q4, ref.q4);
}

}  // namespace

PointSummary run_point(const ExperimentConfig& cfg, const ChainModel& model, const fs::path& dir, std::ostream& log) {
  fs::create_directories(dir);
  PointSummary summary;
  summary.B = model.stagger;
  json timings = json::object();
  json status{{"converged", false}};
  const bool csv = cfg.writes("csv");
  const bool js = cfg.writes("json");

  auto t0 = Clock::now();
  const std::vector<BathSpec> baths = cfg.baths(model);
  const Liouvillian L = assemble(model, baths);
  timings["assemble"] = seconds_since(t0);

  json manifest{{"config", cfg.to_json()},
                {"versions", versions()},
                {"model", model_parameters(model)},
                {"baths", bath_parameters(cfg, model)},
                {"generator", {{"dimension", L.generator.dim()}, {"nnz", L.generator.nnz()}}}};
  const SolverConfig solver = cfg.solver();
  manifest["solver"] = {{"tol", solver.tol},
                        {"t_max", solver.t_max.value_or(200.0 / L.min_gamma())},
                        {"check_interval", solver.check_interval},
                        {"courant", solver.courant},
                        {"power_iterations", solver.power_iterations},
                        {"hermitize_every", solver.hermitize_every},
                        {"seed", solver.seed},
                        {"initial_state", cfg.initial_state}};

  auto finish = [&](int code, const std::string& message) {
    summary.exit_code = code;
    summary.message = message;
    status["exit_code"] = code;
    status["message"] = message;
    manifest["status"] = status;
    manifest["timings_seconds"] = timings;
    write_json(dir / "manifest.json", manifest);
    return summary;
  };

  t0 = Clock::now();
  SteadyStateResult ss;
  try {
    ss = propagate_to_steady_state(L, initial_state(cfg, model.n), solver);
  } catch (const SteadyStateError& e) {
    timings["propagate"] = seconds_since(t0);
    return finish(kExitNotConverged, e.what());
  }
  timings["propagate"] = seconds_since(t0);
  manifest["solver"]["step_size"] = ss.step_size;
  manifest["solver"]["norm_estimate"] = ss.norm_estimate;

  if (csv) {
    CsvWriter conv(dir / "convergence.csv", "t,residual,trace_error,hermiticity_drift");
    for (const Checkpoint& c : ss.history) conv.row(c.t, c.residual, c.trace_error, c.hermiticity_drift);
  }
  json state{{"converged", ss.converged},
             {"residual", ss.residual},
             {"steps", ss.steps},
             {"t_final", ss.t_final},
             {"decay_rate", ss.decay_rate},
             {"fit_r_squared", ss.fit_r_squared},
             {"trace", ss.rho_ss.trace().real()},
             {"purity", (ss.rho_ss * ss.rho_ss).trace().real()}};
  status["converged"] = ss.converged;
  log << "  steady state: converged=" << ss.converged << " residual=" << format_number(ss.residual)
      << " t=" << ss.t_final << '\n';

  auto write_state = [&] {
    if (js) write_json(dir / "steady_state.json", state);
  };
  if (!ss.converged) {
    write_state();
    return finish(kExitNotConverged, "steady state not reached within t_max");
  }

  t0 = Clock::now();
  const GrandCanonicalFamily family(model);
  ThermometryResult th;
  try {
    th = measure_temperature(ss.rho_ss, family, default_matching(model));
  } catch (const ThermometryError& e) {
    timings["thermometry"] = seconds_since(t0);
    write_state();
    return finish(kExitNotConverged, e.what());
  }
  timings["thermometry"] = seconds_since(t0);
  summary.thermometry = th;
  const MatchingSet matching = default_matching(model);
  state["thermometry"] = {{"T_meas", th.T},
                          {"mu_meas", th.mu},
                          {"iterations", th.iterations},
                          {"residual", th.residual},
                          {"matching_bond", matching.bond},
                          {"matching_site", matching.site ? json(*matching.site) : json(nullptr)}};
  log << "  thermometry: T=" << format_number(th.T) << " mu=" << format_number(th.mu) << '\n';

  t0 = Clock::now();
  const DenseMatrix rho_ref = family.state(th.T, th.mu);
  const ObservableReport obs_ss = observable_report(ss.rho_ss, model);
  const ObservableReport obs_ref = observable_report(rho_ref, model);
  if (csv) write_observables(dir / "observables.csv", cfg, obs_ss, obs_ref);
  if (model.n >= 4) {
    const int window = central_q4_window(model.n);
    summary.dq4 = q4_deviation(ss.rho_ss, rho_ref, model.n, window);
    state["dq4"] = {{"window", window}, {"value", *summary.dq4}};
  }
  if (cfg.moments) {
    const MomentReport mom = moment_report(ss.rho_ss, rho_ref, model);
    if (csv) {
      CsvWriter out(dir / "moments.csv", "order,steady_state,reference,relative_error");
      for (std::size_t k = 0; k < mom.orders.size(); ++k) {
        out.row(mom.orders[k], mom.state[k], mom.reference[k], mom.relative_error[k]);
      }
    }
    state["moments_window_start"] = mom.window_start;
  }
  timings["observables"] = seconds_since(t0);

  if (cfg.lss_sector) {
    t0 = Clock::now();
    const ChainModel spectral = lss_model(cfg, model);
    const Sector sector =
        *cfg.lss_sector == "auto" ? Sector::automatic(spectral) : sector_from_string(*cfg.lss_sector);
    SpacingStatistics lss;
    try {
      lss = level_spacings(spectral, sector);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("diagnostics.lss: ") + e.what());
    }
    summary.eta = lss.eta;
    state["lss"] = {{"n", spectral.n},
                    {"sector", lss.sector},
                    {"levels", lss.eigenvalues.size()},
                    {"mean_spacing", lss.mean_spacing},
                    {"eta", lss.eta}};
    if (csv) {
      CsvWriter out(dir / "lss.csv", "bin_center,density,count");
      for (std::size_t b = 0; b < lss.density.size(); ++b) out.row(lss.bin_centers[b], lss.density[b], lss.counts[b]);
    }
    timings["lss"] = seconds_since(t0);
    log << "  eta(" << lss.sector << ") = " << format_number(lss.eta) << '\n';
  }
  write_state();
  return finish(kExitOk, "ok");
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& log, const RunOptions& options) {
  const fs::path root(cfg.output_dir);
  if (cfg.B_sweep.empty()) {
    log << "run: " << to_string(cfg.family) << " n=" << cfg.n << " -> " << root.string() << '\n';
    const PointSummary s = run_point(cfg, cfg.model(), root, log);
    if (s.exit_code != kExitOk) log << "error: " << s.message << '\n';
    return s.exit_code;
  }

  std::vector<double> grid = cfg.B_sweep;
  grid.push_back(0.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  auto subdir = [](double b) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "B_%.6g", b);
    return std::string(buf);
  };

  std::vector<PointSummary> results(grid.size());
  std::vector<std::string> logs(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      std::ostringstream local;
      local << "point B=" << grid[i] << '\n';
      try {
        results[i] = run_point(cfg, cfg.model_at(grid[i]), root / subdir(grid[i]), local);
      } catch (...) {
        errors[i] = std::current_exception();
      }
      const std::lock_guard<std::mutex> lock(log_mutex);
      log << local.str() << std::flush;
    }
  };
  const int threads = std::clamp(options.parallel, 1, static_cast<int>(grid.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const auto baseline = std::find(grid.begin(), grid.end(), 0.0) - grid.begin();
  const std::optional<double> dq0 = results[baseline].dq4;
  int code = kExitOk;
  json points = json::array();
  if (cfg.writes("csv")) {
    CsvWriter dq(root / "dq4_vs_B.csv", "B,dq4,dq4_rel");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!results[i].dq4) continue;
      const double rel = dq0 && *dq0 != 0.0 ? relative_q4_deviation(*results[i].dq4, dq0)
                                            : std::numeric_limits<double>::quiet_NaN();
      dq.row(grid[i], *results[i].dq4, rel);
    }
    if (cfg.lss_sector) {
      CsvWriter eta(root / "eta_vs_B.csv", "B,eta");
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (results[i].eta) eta.row(grid[i], *results[i].eta);
      }
    }
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    code = std::max(code, results[i].exit_code);
    points.push_back(json{{"B", grid[i]},
                          {"directory", subdir(grid[i])},
                          {"exit_code", results[i].exit_code},
                          {"message", results[i].message}});
  }
  write_json(root / "manifest.json",
             json{{"config", cfg.to_json()}, {"versions", versions()}, {"B_grid", grid}, {"points", points}});
  if (code != kExitOk) log << "error: at least one sweep point failed\n";
  return code;
}

std::vector<CheckResult> verify_checks(const ExperimentConfig& cfg) {
  std::vector<CheckResult> checks;
  auto add = [&](std::string name, double value, double tol) {
    checks.push_back(CheckResult{std::move(name), value, tol, value <= tol});
  };
  const ChainModel model = cfg.model();
  const std::vector<BathSpec> baths = cfg.baths(model);

  for (const BathSpec& b : baths) {
    const std::string tag = "[" + to_string(b.side) + "]";
    const DenseMatrix local = reset_superop(b.target, b.gamma);
    Eigen::ComplexEigenSolver<DenseMatrix> es(local, false);
    std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.begin(), ev.end(), [](cplx a, cplx c) { return a.real() > c.real(); });
    double spec_err = std::abs(ev.front());
    for (std::size_t k = 1; k < ev.size(); ++k) spec_err = std::max(spec_err, std::abs(ev[k] + b.gamma));
    add("dissipator spectrum " + tag, spec_err, 1e-10);

    const LindbladSet set = reset_lindblads(b.target, b.gamma);
    DenseMatrix sum = DenseMatrix::Zero(b.target.rows(), b.target.cols());
    for (const DenseMatrix& l : set.operators) sum += l.adjoint() * l;
    add("sum L^dag L = 1/2 " + tag, max_abs(sum - 0.5 * DenseMatrix::Identity(sum.rows(), sum.cols())), 1e-12);
    add("Lindblad form = reset form " + tag, max_abs(lindblad_superop(set) - local), 1e-10);

    if (b.m <= 2) {
      const DenseMatrix channel = (0.1 * local).exp();
      const double lowest = eigvalsh(choi_matrix(channel)).minCoeff();
      add("Choi negativity of exp(0.1 D) " + tag, std::max(0.0, -lowest), 1e-10);
    }
  }

  const Liouvillian L = assemble(model, baths);
  {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> g;
    const auto d = static_cast<Eigen::Index>(L.hilbert_dim());
    DenseMatrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) a(i, j) = cplx{g(rng), g(rng)};
    DenseMatrix rho = a * a.adjoint();
    rho /= rho.trace();
    const DenseMatrix drho = unvectorize(L.generator.apply(vectorize(rho)));
    add("trace preservation |tr L(rho)|", std::abs(drho.trace()), 1e-10);
    add("Hermiticity preservation", hermiticity_defect(drho), 1e-10);
  }

  {
    const GrandCanonicalFamily family(model);
    const MatchingSet matching = default_matching(model);
    const double T = cfg.left.T_targ;
    const double mu = matching.site ? cfg.left.mu_targ : 0.0;
    double err = std::numeric_limits<double>::infinity();
    try {
      const ThermometryResult th = measure_temperature(family.state(T, mu), family, matching);
      err = std::max(std::abs(th.T - T), std::abs(th.mu - mu));
    } catch (const ThermometryError&) {
    }
    add("thermometry round trip", err, 1e-6);
  }

  if (model.n <= 4) {
    double td = std::numeric_limits<double>::infinity();
    double residual = std::numeric_limits<double>::infinity();
    try {
      const SteadyStateResult oracle = nullspace_steady_state(L);
      residual = oracle.residual;
      SolverConfig solver = cfg.solver();
      solver.tol = std::min(solver.tol, 1e-11);
      const SteadyStateResult prop = propagate_to_steady_state(L, maximally_mixed(model.n), solver);
      td = trace_distance(oracle.rho_ss, prop.rho_ss);
    } catch (const SteadyStateError&) {
    }
    add("null-space oracle residual", residual, 1e-10);
    add("oracle vs propagation trace distance", td, 1e-8);
  }
  return checks;
}

int verify_experiment(const ExperimentConfig& cfg, std::ostream& out) {
  const std::vector<CheckResult> checks = verify_checks(cfg);
  bool all = true;
  char line[160];
  std::snprintf(line, sizeof line, "%-44s %-19s %-10s %s\n", "check", "value", "tolerance", "result");
  out << line;
  for (const CheckResult& c : checks) {
    std::snprintf(line, sizeof line, "%-44s %-19s %-10.1e %s\n", c.name.c_str(), format_number(c.value).c_str(),
                  c.tolerance, c.passed ? "PASS" : "FAIL");
    out << line;
    all = all && c.passed;
  }
  return all ? kExitOk : kExitCheckFailed;
}

}  // namespace oqtherm
