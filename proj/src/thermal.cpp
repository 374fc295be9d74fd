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

#include "oqtherm/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace oqtherm {

namespace {

void check_dense_size(int n) {
  if (n > kMaxDenseEnsembleSites) {
    throw std::invalid_argument("ensemble: n = " + std::to_string(n) + " exceeds the dense limit of " +
                                std::to_string(kMaxDenseEnsembleSites) + " sites");
  }
}

// Normalized exp(-K) for Hermitian K, shifted by the lowest eigenvalue.
DenseMatrix normalized_exp_minus(const DenseMatrix& k) {
  const Eigensystem es = eigh(k);
  const double shift = es.values.minCoeff();
  const RealVector w = (-(es.values.array() - shift)).exp();
  DenseMatrix rho = es.vectors * (w / w.sum()).cast<cplx>().asDiagonal() * es.vectors.adjoint();
  return 0.5 * (rho + rho.adjoint());
}

DenseMatrix dense_block(const SparseOperator& op, const std::vector<std::int64_t>& basis) {
  std::map<std::int64_t, Eigen::Index> position;
  for (std::size_t i = 0; i < basis.size(); ++i) position[basis[i]] = static_cast<Eigen::Index>(i);
  const auto d = static_cast<Eigen::Index>(basis.size());
  DenseMatrix out = DenseMatrix::Zero(d, d);
  const SparseMatrix& m = op.matrix();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (SparseMatrix::InnerIterator it(m, basis[i]); it; ++it) {
      auto found = position.find(it.col());
      if (found != position.end()) out(i, found->second) = it.value();
    }
  }
  return out;
}

}  // namespace

void EnsembleSpec::validate() const {
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw std::invalid_argument("ensemble temperature must be positive, got " + std::to_string(T));
  }
}

std::string to_string(Side s) { return s == Side::Left ? "left" : "right"; }

std::vector<int> boundary_sites(Side side, int m, int n) {
  if (m < 1 || m > n) throw std::out_of_range("boundary_sites: m outside [1, n]");
  std::vector<int> sites(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) sites[k] = side == Side::Left ? k : n - m + k;
  return sites;
}

DenseMatrix ensemble_state(const ChainModel& model, const EnsembleSpec& spec) {
  spec.validate();
  model.validate();
  check_dense_size(model.n);
  const DenseMatrix h = hamiltonian(model).to_dense();
  if (spec.kind == EnsembleKind::Gibbs || spec.q == 0.0) {
    DenseMatrix k = h;
    const double mu = spec.kind == EnsembleKind::Gibbs ? spec.mu : 0.0;
    if (mu != 0.0) k -= mu * total_magnetization(model.n).to_dense();
    return normalized_exp_minus(k / spec.T);
  }
  const DenseMatrix k = h / spec.T - spec.q * q4_charge(model.n).to_dense();
  return normalized_exp_minus(k);
}

DenseMatrix reduced_target(const ChainModel& model, const EnsembleSpec& spec, Side side, int m) {
  if (m < 1 || m > 4) throw std::out_of_range("reduced_target: m must lie in [1, 4]");
  if (m > model.n) throw std::out_of_range("reduced_target: m exceeds chain length");
  const DenseMatrix rho = ensemble_state(model, spec);
  return partial_trace(rho, boundary_sites(side, m, model.n), model.n);
}

GrandCanonicalFamily::GrandCanonicalFamily(const ChainModel& model) : model_(model) {
  model_.validate();
  check_dense_size(model_.n);
  const int n = model_.n;
  const std::int64_t dim = std::int64_t{1} << n;
  const SparseOperator h = hamiltonian(model_);
  conserves_ = model_.conserves_magnetization();

  energies_.resize(dim);
  magnetizations_.resize(dim);
  vectors_ = DenseMatrix::Zero(dim, dim);
  if (!conserves_) {
    const Eigensystem es = eigh(h.to_dense());
    energies_ = es.values;
    vectors_ = es.vectors;
    magnetizations_.setConstant(std::numeric_limits<double>::quiet_NaN());
    return;
  }
  // Block-diagonalize by magnetization; eigenvectors are scattered back into
  // the full basis.
  Eigen::Index col = 0;
  for (int down = 0; down <= n; ++down) {
    std::vector<std::int64_t> basis;
    for (std::int64_t s = 0; s < dim; ++s) {
      if (magnetization_of(s, n) == n - 2 * down) basis.push_back(s);
    }
    const Eigensystem es = eigh(dense_block(h, basis));
    for (Eigen::Index k = 0; k < es.values.size(); ++k, ++col) {
      energies_(col) = es.values(k);
      magnetizations_(col) = n - 2 * down;
      for (std::size_t i = 0; i < basis.size(); ++i) vectors_(basis[i], col) = es.vectors(i, k);
    }
  }
}

RealVector GrandCanonicalFamily::weights(double T, double mu) const {
  if (!(T > 0.0)) throw std::invalid_argument("ensemble temperature must be positive");
  RealVector exponent = -energies_ / T;
  if (mu != 0.0) exponent += (mu / T) * magnetizations_;
  const double top = exponent.maxCoeff();
  RealVector w = (exponent.array() - top).exp();
  return w / w.sum();
}

RealVector GrandCanonicalFamily::diagonal_elements(const SparseOperator& op) const {
  const DenseMatrix applied = op.matrix() * vectors_;
  return (vectors_.conjugate().cwiseProduct(applied)).colwise().sum().real().transpose();
}

double GrandCanonicalFamily::expectation(const RealVector& diagonal, double T, double mu) const {
  if (!conserves_ && mu != 0.0) {
    throw std::logic_error("diagonal expectation with mu != 0 requires a magnetization-conserving model");
  }
  return weights(T, mu).dot(diagonal);
}

double GrandCanonicalFamily::expectation(const SparseOperator& op, double T, double mu) const {
  if (!conserves_ && mu != 0.0) return trace_product(state(T, mu), op).real();
  return expectation(diagonal_elements(op), T, mu);
}

DenseMatrix GrandCanonicalFamily::state(double T, double mu) const {
  if (!conserves_ && mu != 0.0) return ensemble_state(model_, EnsembleSpec::gibbs(T, mu));
  const RealVector w = weights(T, mu);
  DenseMatrix rho = vectors_ * w.cast<cplx>().asDiagonal() * vectors_.adjoint();
  return 0.5 * (rho + rho.adjoint());
}

MatchingSet default_matching(const ChainModel& model) {
  const int n = model.n;
  if (model.family == ModelFamily::IsingTilted) {
    if (n < 2) throw std::invalid_argument("default_matching: chain too short");
    return MatchingSet{n / 2 - 1, std::nullopt};
  }
  if (n < 3) throw std::invalid_argument("default_matching: XXZ matching needs n >= 3");
  const double centre = (n - 1) / 2.0;
  int best = 0;
  for (int l = 0; 3 * l + 2 <= n - 1; ++l) {
    if (std::abs(3 * l + 1.5 - centre) < std::abs(3 * best + 1.5 - centre)) best = l;
  }
  return MatchingSet{3 * best + 1, 3 * best + 1};
}

namespace {

struct Targets {
  RealVector bond_diag;
  double bond_value = 0.0;
  SparseOperator site_op;
  RealVector site_diag;
  double site_value = 0.0;
};

double bisect_temperature(const GrandCanonicalFamily& family, const Targets& t,
                          const ThermometryOptions& options, int& iterations) {
  auto f = [&](double T) { return family.expectation(t.bond_diag, T, 0.0) - t.bond_value; };
  double lo = options.t_low;
  double hi = options.t_high;
  double flo = f(lo);
  double fhi = f(hi);
  if (flo * fhi > 0.0) {
    // One expansion of the bracket, then give up.
    lo /= 10.0;
    hi *= 10.0;
    flo = f(lo);
    fhi = f(hi);
    if (flo * fhi > 0.0) {
      std::ostringstream msg;
      msg << "thermometry: no temperature in [" << lo << ", " << hi
          << "] reproduces the measured bond energy " << t.bond_value << " (ensemble range ["
          << std::min(flo, fhi) + t.bond_value << ", " << std::max(flo, fhi) + t.bond_value << "])";
      throw ThermometryError(msg.str());
    }
  }
  for (iterations = 0; iterations < 400; ++iterations) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ThermometryResult measure_temperature(const DenseMatrix& rho_ss, const GrandCanonicalFamily& family,
                                      const MatchingSet& matching, const ThermometryOptions& options) {
  const ChainModel& model = family.model();
  Targets t;
  const SparseOperator bond = local_density(model, matching.bond);
  t.bond_diag = family.diagonal_elements(bond);
  t.bond_value = trace_product(rho_ss, bond).real();

  ThermometryResult result;
  if (!matching.site) {
    result.T = bisect_temperature(family, t, options, result.iterations);
    result.mu = 0.0;
    result.residual = std::abs(family.expectation(t.bond_diag, result.T, 0.0) - t.bond_value);
    if (result.residual > options.tolerance) {
      throw ThermometryError("thermometry: bisection residual " + std::to_string(result.residual) +
                             " above tolerance");
    }
    return result;
  }

  if (!family.conserves_magnetization()) {
    throw ThermometryError("thermometry: (T, mu) matching requires a magnetization-conserving model");
  }
  t.site_op = pauli_string({{*matching.site, Axis::Z}}, model.n);
  t.site_diag = family.diagonal_elements(t.site_op);
  t.site_value = trace_product(rho_ss, t.site_op).real();

  auto residual = [&](double T, double mu) {
    return Eigen::Vector2d(family.expectation(t.bond_diag, T, mu) - t.bond_value,
                           family.expectation(t.site_diag, T, mu) - t.site_value);
  };

  // Start from the energy-only temperature at mu = 0 when one exists.
  double T = 2.0;
  double mu = 0.0;
  try {
    int ignored = 0;
    T = bisect_temperature(family, t, options, ignored);
  } catch (const ThermometryError&) {
  }

  Eigen::Vector2d r = residual(T, mu);
  int it = 0;
  for (; it < options.max_newton_iterations; ++it) {
    if (r.cwiseAbs().maxCoeff() < 1e-13) break;
    const double hT = 1e-6 * std::max(1.0, T);
    const double hmu = 1e-6 * std::max(1.0, std::abs(mu));
    Eigen::Matrix2d jac;
    jac.col(0) = (residual(T + hT, mu) - residual(T - hT, mu)) / (2.0 * hT);
    jac.col(1) = (residual(T, mu + hmu) - residual(T, mu - hmu)) / (2.0 * hmu);
    const Eigen::Vector2d step = jac.fullPivLu().solve(-r);
    if (!step.allFinite()) break;

    // Halve the step until the residual decreases and T stays positive.
    double lambda = 1.0;
    Eigen::Vector2d trial_r;
    bool accepted = false;
    while (lambda > 1e-10) {
      const double trial_T = T + lambda * step(0);
      const double trial_mu = mu + lambda * step(1);
      if (trial_T > 0.0) {
        trial_r = residual(trial_T, trial_mu);
        if (trial_r.norm() < r.norm()) {
          T = trial_T;
          mu = trial_mu;
          r = trial_r;
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
  }
  result.T = T;
  result.mu = mu;
  result.iterations = it;
  result.residual = r.cwiseAbs().maxCoeff();
  if (result.residual > options.tolerance) {
    std::ostringstream msg;
    msg << "thermometry: Newton iteration did not converge after " << it << " iterations (residual "
        << result.residual << ")";
    throw ThermometryError(msg.str());
  }
  return result;
}

ThermometryResult measure_temperature(const DenseMatrix& rho_ss, const ChainModel& model,
                                      const MatchingSet& matching, const ThermometryOptions& options) {
  return measure_temperature(rho_ss, GrandCanonicalFamily(model), matching, options);
}

}  // namespace oqtherm
