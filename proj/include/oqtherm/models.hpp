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

#include <string>
#include <vector>

#include "oqtherm/spin_algebra.hpp"

namespace oqtherm {

enum class ModelFamily { IsingTilted, XxzStaggered };

std::string to_string(ModelFamily f);
ModelFamily model_family_from_string(const std::string& s);

/// Open spin-1/2 chain with nearest-neighbour bond energies h_{l,l+1}.
///
/// Ising:  h = J_l Z_l Z_{l+1} + bx/2 (X_l + X_{l+1}) + bz/2 (Z_l + Z_{l+1})
/// XXZ:    h = J_l (X_l X_{l+1} + Y_l Y_{l+1} + delta Z_l Z_{l+1})
///             + b_l/2 Z_l + b_{l+1}/2 Z_{l+1}
///
/// Fields are split half-half between the two bonds touching a site, so the
/// end sites of the chain carry only half their field.
struct ChainModel {
  ModelFamily family = ModelFamily::IsingTilted;
  int n = 0;
  std::vector<double> couplings;  // J_0 .. J_{n-2}
  double bx = 0.0;                // Ising only
  double bz = 0.0;                // Ising only
  double delta = 0.0;             // XXZ only
  std::vector<double> fields;     // XXZ only: b_0 .. b_{n-1}
  double stagger = 0.0;           // XXZ: B when built by xxz_staggered, informational
  int tau = 0;                    // boundary-layer thickness, 0 = uniform

  static ChainModel ising(int n, double bx, double bz, int tau = 0, double J = 1.0);
  static ChainModel xxz(int n, double delta, std::vector<double> fields, int tau = 0, double J = 1.0);
  static ChainModel xxz_staggered(int n, double delta, double B, int tau = 0, double J = 1.0);

  int bond_count() const { return n - 1; }
  bool conserves_magnetization() const;
  // True when the chain is invariant under site reversal l -> n-1-l.
  bool reflection_symmetric(double tol = 1e-14) const;

  void validate() const;
};

/// J_l = scale * sin((l/tau)(pi/2)) on the first and last tau bonds, scale
/// in between. tau = 0 gives a uniform schedule.
std::vector<double> layered_couplings(int n, int tau, double scale = 1.0);

/// b_{3k} = -B, b_{3k+1} = -B/2, b_{3k+2} = 0.
std::vector<double> staggered_fields(int n, double B);

// Bond energy h_{l,l+1} as a 4x4 matrix on (l, l+1).
DenseMatrix local_density_matrix(const ChainModel& model, int bond);
SparseOperator local_density(const ChainModel& model, int bond);
SparseOperator hamiltonian(const ChainModel& model);

SparseOperator total_magnetization(int n);

// sigma^x_l Z Z sigma^x_{l+3} + sigma^y_l Z Z sigma^y_{l+3}, 16x16 on l..l+3.
DenseMatrix q4_density_matrix();
SparseOperator q4_density(int n, int l);

/// Q4 = -h_{0,1} - h_{n-2,n-1} + sum_l q4_l with h taken from the uniform XX
/// chain (delta = 0, b = 0, J = 1) regardless of the model being probed.
SparseOperator q4_charge(int n);

// Diagonal of the magnetization operator: sum of (+1 up / -1 down) per basis state.
int magnetization_of(std::int64_t basis_state, int n);
std::int64_t reflect_basis_state(std::int64_t basis_state, int n);

}  // namespace oqtherm
