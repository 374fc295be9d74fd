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

#include "oqtherm/models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oqtherm {

namespace {

DenseMatrix two_site(Axis a, Axis b) { return kron(pauli(a), pauli(b)); }

DenseMatrix xx_bond() { return two_site(Axis::X, Axis::X) + two_site(Axis::Y, Axis::Y); }

}  // namespace

std::string to_string(ModelFamily f) {
  return f == ModelFamily::IsingTilted ? "ising_tilted" : "xxz_staggered";
}

ModelFamily model_family_from_string(const std::string& s) {
  if (s == "ising_tilted") return ModelFamily::IsingTilted;
  if (s == "xxz_staggered") return ModelFamily::XxzStaggered;
  throw std::invalid_argument("unknown model family '" + s + "' (expected ising_tilted or xxz_staggered)");
}

std::vector<double> layered_couplings(int n, int tau, double scale) {
  if (n < 2) throw std::invalid_argument("layered_couplings: n must be at least 2");
  if (tau < 0) throw std::invalid_argument("layered_couplings: tau must be non-negative");
  std::vector<double> J(static_cast<std::size_t>(n - 1), scale);
  for (int l = 0; l < tau && l < n - 1; ++l) {
    const double s = scale * std::sin((static_cast<double>(l) / tau) * (std::numbers::pi / 2.0));
    J[l] = std::min(J[l], s);
    J[n - 2 - l] = std::min(J[n - 2 - l], s);
  }
  return J;
}

std::vector<double> staggered_fields(int n, double B) {
  std::vector<double> b(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    switch (l % 3) {
      case 0: b[l] = -B; break;
      case 1: b[l] = -B / 2.0; break;
      default: b[l] = 0.0; break;
    }
  }
  return b;
}

ChainModel ChainModel::ising(int n, double bx, double bz, int tau, double J) {
  ChainModel m;
  m.family = ModelFamily::IsingTilted;
  m.n = n;
  m.bx = bx;
  m.bz = bz;
  m.tau = tau;
  m.couplings = layered_couplings(n, tau, J);
  m.validate();
  return m;
}

ChainModel ChainModel::xxz(int n, double delta, std::vector<double> fields, int tau, double J) {
  ChainModel m;
  m.family = ModelFamily::XxzStaggered;
  m.n = n;
  m.delta = delta;
  m.fields = std::move(fields);
  m.tau = tau;
  m.couplings = layered_couplings(n, tau, J);
  m.validate();
  return m;
}

ChainModel ChainModel::xxz_staggered(int n, double delta, double B, int tau, double J) {
  ChainModel m = xxz(n, delta, staggered_fields(n, B), tau, J);
  m.stagger = B;
  return m;
}

bool ChainModel::conserves_magnetization() const {
  return family == ModelFamily::XxzStaggered || bx == 0.0;
}

bool ChainModel::reflection_symmetric(double tol) const {
  for (int l = 0; l < n - 1; ++l) {
    if (std::abs(couplings[l] - couplings[n - 2 - l]) > tol) return false;
  }
  if (family == ModelFamily::XxzStaggered) {
    for (int l = 0; l < n; ++l) {
      if (std::abs(fields[l] - fields[n - 1 - l]) > tol) return false;
    }
  }
  return true;
}

void ChainModel::validate() const {
  if (n < 2) throw std::invalid_argument("model.n: chain length must be at least 2");
  if (n > 16) throw std::invalid_argument("model.n: chain length above 16 is not supported");
  if (static_cast<int>(couplings.size()) != n - 1) {
    throw std::invalid_argument("model.J: coupling schedule must have n-1 entries");
  }
  if (family == ModelFamily::XxzStaggered && static_cast<int>(fields.size()) != n) {
    throw std::invalid_argument("model.fields: field schedule must have n entries");
  }
  if (tau < 0) throw std::invalid_argument("model.tau: must be non-negative");
}

DenseMatrix local_density_matrix(const ChainModel& model, int bond) {
  if (bond < 0 || bond > model.n - 2) {
    throw std::out_of_range("local_density: bond " + std::to_string(bond) + " outside [0, n-2]");
  }
  const DenseMatrix id = pauli(Axis::I);
  const DenseMatrix z = pauli(Axis::Z);
  const double J = model.couplings[bond];
  if (model.family == ModelFamily::IsingTilted) {
    const DenseMatrix x = pauli(Axis::X);
    return J * two_site(Axis::Z, Axis::Z) + (model.bx / 2.0) * (kron(x, id) + kron(id, x)) +
           (model.bz / 2.0) * (kron(z, id) + kron(id, z));
  }
  return J * (xx_bond() + model.delta * two_site(Axis::Z, Axis::Z)) +
         (model.fields[bond] / 2.0) * kron(z, id) + (model.fields[bond + 1] / 2.0) * kron(id, z);
}

SparseOperator local_density(const ChainModel& model, int bond) {
  return embed(local_density_matrix(model, bond), {bond, bond + 1}, model.n);
}

SparseOperator hamiltonian(const ChainModel& model) {
  model.validate();
  SparseOperator h = SparseOperator::zero(std::int64_t{1} << model.n);
  for (int l = 0; l < model.n - 1; ++l) h += local_density(model, l);
  return h;
}

int magnetization_of(std::int64_t basis_state, int n) {
  // bit 1 = spin down
  const int down = std::popcount(static_cast<std::uint64_t>(basis_state));
  return n - 2 * down;
}

std::int64_t reflect_basis_state(std::int64_t basis_state, int n) {
  std::int64_t out = 0;
  for (int b = 0; b < n; ++b) {
    if (basis_state & (std::int64_t{1} << b)) out |= std::int64_t{1} << (n - 1 - b);
  }
  return out;
}

SparseOperator total_magnetization(int n) {
  if (n < 1) throw std::invalid_argument("total_magnetization: n must be positive");
  const std::int64_t dim = std::int64_t{1} << n;
  SparseMatrix m(dim, dim);
  m.reserve(Eigen::VectorXi::Constant(dim, 1));
  for (std::int64_t s = 0; s < dim; ++s) {
    const int mag = magnetization_of(s, n);
    if (mag != 0) m.insert(s, s) = static_cast<double>(mag);
  }
  m.makeCompressed();
  return SparseOperator(std::move(m));
}

DenseMatrix q4_density_matrix() {
  const DenseMatrix zz = two_site(Axis::Z, Axis::Z);
  const DenseMatrix x = pauli(Axis::X);
  const DenseMatrix y = pauli(Axis::Y);
  return kron(kron(x, zz), x) + kron(kron(y, zz), y);
}

SparseOperator q4_density(int n, int l) {
  if (l < 0 || l > n - 4) throw std::out_of_range("q4_density: window start outside [0, n-4]");
  return embed(q4_density_matrix(), {l, l + 1, l + 2, l + 3}, n);
}

SparseOperator q4_charge(int n) {
  if (n < 4) throw std::invalid_argument("q4_charge: requires n >= 4");
  const DenseMatrix h = xx_bond();
  SparseOperator q = embed(h, {0, 1}, n) + embed(h, {n - 2, n - 1}, n);
  q *= -1.0;
  for (int l = 0; l <= n - 4; ++l) q += q4_density(n, l);
  return q;
}

}  // namespace oqtherm
