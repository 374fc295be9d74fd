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

#include "oqtherm/liouville.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "superop_rows.hpp"

namespace oqtherm {

namespace {

constexpr int kMaxOracleSites = 4;

void append_unitary_row(const SparseMatrix& h, std::int64_t dn, std::int64_t row, detail::RowEntries& out) {
  using namespace std::complex_literals;
  const std::int64_t i = row % dn;
  const std::int64_t j = row / dn;
  for (SparseMatrix::InnerIterator it(h, i); it; ++it) {
    out.emplace_back(it.col() + dn * j, -1i * it.value());
  }
  // (H^T kron 1) picks H(j', j) = conj(H(j, j')) for Hermitian H.
  for (SparseMatrix::InnerIterator it(h, j); it; ++it) {
    out.emplace_back(i + dn * it.col(), 1i * std::conj(it.value()));
  }
}

void check_bath_layout(const std::vector<BathSpec>& baths, int n) {
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (const BathSpec& b : baths) {
    b.validate();
    if (b.m > n) throw std::invalid_argument("bath.m: exceeds chain length");
    for (int s : boundary_sites(b.side, b.m, n)) {
      if (used[s]) {
        throw std::invalid_argument("bath supports overlap: m_left + m_right must not exceed n = " +
                                    std::to_string(n));
      }
      used[s] = true;
    }
  }
}

double max_abs(const DenseVector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

double Liouvillian::min_gamma() const {
  double g = std::numeric_limits<double>::infinity();
  for (const auto& b : baths) g = std::min(g, b.gamma);
  return g;
}

SparseOperator unitary_superop(const SparseOperator& h) {
  if (!h.is_hermitian()) throw std::invalid_argument("unitary_superop: Hamiltonian must be Hermitian");
  const std::int64_t dn = h.dim();
  return SparseOperator(detail::build_by_rows(dn * dn, [&](std::int64_t r, detail::RowEntries& out) {
    append_unitary_row(h.matrix(), dn, r, out);
  }));
}

Liouvillian assemble(const SparseOperator& h, std::vector<BathSpec> baths) {
  const int n = log2_dim(h.dim());
  if (n > kMaxLiouvilleSites) {
    throw std::length_error("Liouville space for n = " + std::to_string(n) + " exceeds the n <= " +
                            std::to_string(kMaxLiouvilleSites) + " memory budget");
  }
  if (!h.is_hermitian()) throw std::invalid_argument("assemble: Hamiltonian must be Hermitian");
  check_bath_layout(baths, n);

  std::vector<detail::LocalSuperopRows> bath_rows;
  for (const BathSpec& b : baths) {
    const auto sites = boundary_sites(b.side, b.m, n);
    bath_rows.emplace_back(reset_superop(b.target, b.gamma), sites, n);
  }
  const std::int64_t dn = h.dim();
  Liouvillian out;
  out.n = n;
  out.generator = SparseOperator(detail::build_by_rows(dn * dn, [&](std::int64_t r, detail::RowEntries& e) {
    append_unitary_row(h.matrix(), dn, r, e);
    for (const auto& b : bath_rows) b.append_row(r, e);
  }));
  out.baths = std::move(baths);
  return out;
}

Liouvillian assemble(const ChainModel& model, std::vector<BathSpec> baths) {
  model.validate();
  if (model.n > kMaxLiouvilleSites) {
    throw std::length_error("Liouville space for n = " + std::to_string(model.n) + " exceeds the n <= " +
                            std::to_string(kMaxLiouvilleSites) + " memory budget");
  }
  Liouvillian out = assemble(hamiltonian(model), std::move(baths));
  out.model = model;
  return out;
}

double estimate_generator_norm(const SparseOperator& generator, int iterations, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  DenseVector v(generator.dim());
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = cplx(gauss(rng), gauss(rng));
  v.normalize();
  DenseVector w(v.size());
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    generator.apply_into(v, w);
    estimate = w.norm();
    if (estimate == 0.0) return 0.0;
    v = w / estimate;
  }
  return estimate;
}

Rk4Propagator::Rk4Propagator(const Liouvillian& liouvillian, const DenseMatrix& rho0, double step)
    : generator_(&liouvillian.generator), dim_(liouvillian.hilbert_dim()), h_(step) {
  if (rho0.rows() != dim_ || rho0.cols() != dim_) {
    throw std::invalid_argument("initial state dimension does not match the chain");
  }
  if (!(step > 0.0)) throw std::invalid_argument("RK4 step must be positive");
  v_ = vectorize(rho0);
  k_.resize(v_.size());
  acc_.resize(v_.size());
  tmp_.resize(v_.size());
}

void Rk4Propagator::step() {
  // acc = k1 + 2 k2 + 2 k3 + k4
  generator_->apply_into(v_, k_);
  acc_ = k_;
  tmp_ = v_ + (0.5 * h_) * k_;
  generator_->apply_into(tmp_, k_);
  acc_ += 2.0 * k_;
  tmp_ = v_ + (0.5 * h_) * k_;
  generator_->apply_into(tmp_, k_);
  acc_ += 2.0 * k_;
  tmp_ = v_ + h_ * k_;
  generator_->apply_into(tmp_, k_);
  acc_ += k_;
  v_ += (h_ / 6.0) * acc_;
  time_ += h_;
  ++steps_;
}

void Rk4Propagator::advance(double duration) {
  const auto count = static_cast<std::int64_t>(std::llround(duration / h_));
  for (std::int64_t s = 0; s < count; ++s) step();
}

double Rk4Propagator::residual() const {
  DenseVector out(v_.size());
  generator_->apply_into(v_, out);
  return max_abs(out);
}

cplx Rk4Propagator::trace() const {
  cplx tr{0.0, 0.0};
  for (std::int64_t i = 0; i < dim_; ++i) tr += v_(i + dim_ * i);
  return tr;
}

double Rk4Propagator::hermiticity_drift() const {
  double drift = 0.0;
  for (std::int64_t j = 0; j < dim_; ++j) {
    for (std::int64_t i = j; i < dim_; ++i) {
      drift = std::max(drift, std::abs(v_(i + dim_ * j) - std::conj(v_(j + dim_ * i))));
    }
  }
  return drift;
}

void Rk4Propagator::hermitize() {
  for (std::int64_t j = 0; j < dim_; ++j) {
    for (std::int64_t i = j; i < dim_; ++i) {
      const cplx avg = 0.5 * (v_(i + dim_ * j) + std::conj(v_(j + dim_ * i)));
      v_(i + dim_ * j) = avg;
      v_(j + dim_ * i) = std::conj(avg);
    }
  }
}

ExponentialFit fit_log_residual(const std::vector<Checkpoint>& history) {
  ExponentialFit fit;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = history.size() / 2; k < history.size(); ++k) {
    if (history[k].residual > 0.0) pts.emplace_back(history[k].t, std::log(history[k].residual));
  }
  if (pts.size() < 3) return fit;
  double mt = 0.0, my = 0.0;
  for (const auto& [t, y] : pts) {
    mt += t;
    my += y;
  }
  mt /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (const auto& [t, y] : pts) {
    stt += (t - mt) * (t - mt);
    sty += (t - mt) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (stt == 0.0) return fit;
  const double slope = sty / stt;
  fit.rate = -slope;
  fit.r_squared = syy == 0.0 ? 1.0 : (sty * sty) / (stt * syy);
  return fit;
}

namespace {

struct Attempt {
  SteadyStateResult result;
  bool step_failure = false;
  std::string failure;
};

Attempt run_attempt(const Liouvillian& liouvillian, const DenseMatrix& rho0, const SolverConfig& config,
                    double h, double t_max) {
  Attempt a;
  Rk4Propagator prop(liouvillian, rho0, h);
  const auto steps_per_window =
      std::max<std::int64_t>(1, std::llround(config.check_interval / h));
  std::int64_t since_hermitize = 0;
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    for (std::int64_t s = 0; s < steps_per_window; ++s) {
      prop.step();
      if (++since_hermitize == config.hermitize_every) {
        since_hermitize = 0;
        const double drift = prop.hermiticity_drift();
        if (!(drift <= 1e-10)) {
          a.step_failure = true;
          a.failure = "Hermiticity drift " + std::to_string(drift) + " exceeds 1e-10";
          return a;
        }
        prop.hermitize();
      }
    }
    Checkpoint cp;
    cp.t = prop.time();
    cp.residual = prop.residual();
    cp.trace_error = std::abs(prop.trace() - cplx{1.0, 0.0});
    cp.hermiticity_drift = prop.hermiticity_drift();
    a.result.history.push_back(cp);
    if (!(cp.trace_error <= 1e-8)) {
      a.step_failure = true;
      a.failure = "trace drift " + std::to_string(cp.trace_error) + " exceeds 1e-8";
      return a;
    }
    best = std::min(best, cp.residual);
    if (cp.residual < config.tol) {
      a.result.converged = true;
      break;
    }
    if (prop.time() >= t_max - 0.5 * h) break;
  }
  prop.hermitize();
  DenseMatrix rho = prop.rho();
  rho /= rho.trace();
  a.result.rho_ss = rho;
  a.result.residual = a.result.history.back().residual;
  a.result.steps = prop.steps();
  a.result.t_final = prop.time();
  a.result.step_size = h;
  return a;
}

}  // namespace

SteadyStateResult propagate_to_steady_state(const Liouvillian& liouvillian, const DenseMatrix& rho0,
                                            const SolverConfig& config) {
  validate_density_matrix(0.5 * (rho0 + rho0.adjoint()), "initial state");
  if (hermiticity_defect(rho0) > 1e-12) throw std::invalid_argument("initial state: not Hermitian");
  if (!(config.tol > 0.0)) throw std::invalid_argument("solver.tol: must be positive");
  if (!(config.courant > 0.0)) throw std::invalid_argument("solver.courant: must be positive");
  if (!(config.check_interval > 0.0)) throw std::invalid_argument("solver.check_interval: must be positive");
  if (config.hermitize_every < 1) throw std::invalid_argument("solver.hermitize_every: must be >= 1");
  const auto start = std::chrono::steady_clock::now();

  double t_max = 0.0;
  if (config.t_max) {
    t_max = *config.t_max;
  } else {
    const double g = liouvillian.min_gamma();
    if (!std::isfinite(g)) throw std::invalid_argument("solver.t_max: required when no bath is attached");
    t_max = 200.0 / g;
  }
  if (!(t_max > 0.0)) throw std::invalid_argument("solver.t_max: must be positive");

  const double norm = estimate_generator_norm(liouvillian.generator, config.power_iterations, config.seed);
  double h = norm > 0.0 ? config.courant / norm : config.check_interval;
  // Land exactly on the checkpoint grid.
  h = config.check_interval / std::ceil(config.check_interval / h);

  Attempt a = run_attempt(liouvillian, rho0, config, h, t_max);
  if (a.step_failure) {
    h /= 2.0;
    a = run_attempt(liouvillian, rho0, config, h, t_max);
    if (a.step_failure) throw SteadyStateError("propagation failed after step halving: " + a.failure);
  }
  SteadyStateResult result = std::move(a.result);
  result.norm_estimate = norm;
  const ExponentialFit fit = fit_log_residual(result.history);
  result.decay_rate = fit.rate;
  result.fit_r_squared = fit.r_squared;
  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

SteadyStateResult nullspace_steady_state(const Liouvillian& liouvillian) {
  if (liouvillian.n > kMaxOracleSites) {
    throw std::invalid_argument("nullspace_steady_state: dense oracle limited to n <= 4");
  }
  const auto start = std::chrono::steady_clock::now();
  const DenseMatrix gen = liouvillian.generator.to_dense();
  Eigen::ComplexEigenSolver<DenseMatrix> solver(gen);
  if (solver.info() != Eigen::Success) throw SteadyStateError("nullspace_steady_state: eigensolve failed");
  const auto& values = solver.eigenvalues();

  Eigen::Index best = 0;
  int zero_count = 0;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (std::abs(values(k)) < std::abs(values(best))) best = k;
    if (std::abs(values(k)) < 1e-8) ++zero_count;
  }
  if (std::abs(values(best)) > 1e-10) {
    std::ostringstream msg;
    msg << "nullspace_steady_state: no eigenvalue within 1e-10 of zero (closest " << std::abs(values(best)) << ")";
    throw SteadyStateError(msg.str());
  }
  if (zero_count > 1) {
    throw SteadyStateError("nullspace_steady_state: zero eigenvalue has multiplicity " +
                           std::to_string(zero_count) + "; steady state is not unique");
  }
  // Dividing by the trace removes the eigenvector's arbitrary phase.
  DenseMatrix rho = unvectorize(solver.eigenvectors().col(best));
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint());
  const double lowest = eigvalsh(rho).minCoeff();
  if (lowest < -1e-8) {
    std::ostringstream msg;
    msg << "nullspace_steady_state: null vector is not positive (min eigenvalue " << lowest << ")";
    throw SteadyStateError(msg.str());
  }

  SteadyStateResult result;
  result.rho_ss = rho;
  result.residual = max_abs(DenseVector(gen * vectorize(rho)));
  result.converged = true;
  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

DenseMatrix maximally_mixed(int n) {
  const auto d = Eigen::Index{1} << n;
  return DenseMatrix::Identity(d, d) / static_cast<double>(d);
}

DenseMatrix random_product_state(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DenseVector psi = DenseVector::Ones(1);
  for (int s = 0; s < n; ++s) {
    // Uniform point on the Bloch sphere.
    const double cos_theta = 2.0 * unit(rng) - 1.0;
    const double theta = std::acos(cos_theta);
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    DenseVector site(2);
    site << std::cos(theta / 2.0), std::polar(std::sin(theta / 2.0), phi);
    DenseVector next(psi.size() * 2);
    for (Eigen::Index k = 0; k < psi.size(); ++k) next.segment(2 * k, 2) = psi(k) * site;
    psi = next;
  }
  DenseMatrix rho = psi * psi.adjoint();
  return 0.5 * (rho + rho.adjoint());
}

}  // namespace oqtherm
