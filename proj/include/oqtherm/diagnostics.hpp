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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oqtherm/models.hpp"
#include "oqtherm/spin_algebra.hpp"

namespace oqtherm {

/// tr(rho op) for Hermitian op; throws if the imaginary part exceeds 1e-10.
double expectation(const DenseMatrix& rho, const SparseOperator& op);

/// Few-spin observables of a chain state.
struct ObservableReport {
  int n = 0;
  std::vector<double> sigma_x, sigma_y, sigma_z;  // per site
  std::vector<double> bond_energy, xx, zz;        // per bond (l, l+1)
  std::vector<double> q4;                         // per window start l = 0 .. n-4
};

ObservableReport observable_report(const DenseMatrix& rho, const ChainModel& model);
// Entry-wise a - b.
ObservableReport difference(const ObservableReport& a, const ObservableReport& b);

struct MomentReport {
  int window_start = 0;  // first site of the 6-site block
  std::vector<int> orders;
  std::vector<double> state;
  std::vector<double> reference;
  std::vector<double> relative_error;
};

// Sum of the 5 bond energies inside the central 6-site window, as a 64x64
// matrix on that window.
DenseMatrix central_block_hamiltonian(const ChainModel& model, int& window_start);

// <[(H6 - <H6>)/5]^p> for p = 2 .. p_max.
std::vector<double> central_moments(const DenseMatrix& rho, const ChainModel& model, int p_max = 5);

MomentReport moment_report(const DenseMatrix& rho_ss, const DenseMatrix& rho_ref, const ChainModel& model,
                           int p_max = 5);

// -------------------------------------------------------------------------
// Level spacing statistics

enum class SectorKind { Full, Magnetization, ReflectionEven, ReflectionOdd };

struct Sector {
  SectorKind kind = SectorKind::Full;
  int magnetization = 0;

  // XXZ: the largest magnetization sector. Ising: even reflection parity when
  // the chain is reflection symmetric, otherwise the full space.
  static Sector automatic(const ChainModel& model);
  std::string label() const;
};

Sector sector_from_string(const std::string& s);

struct SpacingOptions {
  double edge_trim = 0.1;   // fraction dropped at each spectral edge
  int poly_degree = 9;      // staircase fit
  int bins = 40;
  double s_max = 4.0;
  int min_levels = 200;
};

struct SpacingStatistics {
  std::string sector;
  RealVector eigenvalues;
  std::vector<double> spacings;  // unfolded
  double mean_spacing = 0.0;
  double bin_width = 0.0;
  std::vector<double> bin_centers;
  std::vector<int> counts;
  std::vector<double> density;  // integrates to 1 over [0, s_max]
  double eta = 0.0;
};

// Sector-projected Hamiltonian as a dense matrix.
DenseMatrix sector_hamiltonian(const ChainModel& model, const Sector& sector);

SpacingStatistics level_spacings(const ChainModel& model, const Sector& sector, const SpacingOptions& options = {});

// Unfold, histogram and score a raw level sequence.
SpacingStatistics spacing_statistics_from_levels(std::vector<double> levels, const std::string& label,
                                                 const SpacingOptions& options = {});

// Histogram already-unfolded spacings; spacings beyond s_max go to the last bin.
SpacingStatistics histogram_spacings(std::vector<double> spacings, const SpacingOptions& options = {});

double poisson_density(double s);
double wigner_dyson_density(double s);

/// Integral over s >= 0 of |exp(-s) - (pi s / 2) exp(-pi s^2 / 4)|; regenerate
/// with tools/eta_denominator.py.
inline constexpr double kPoissonWignerDistance = 0.6156951993126490;

// sum_k |density_k - p_WD(center_k)| width / kPoissonWignerDistance
double eta_from_density(std::span<const double> density, double bin_width);
double eta_metric(const SpacingStatistics& stats);

// -------------------------------------------------------------------------
// Q4 probes

// Most central window start l with full support l..l+3.
int central_q4_window(int n);

/// tr[q4_l (rho_ss - rho_ref)] at window l (default: central).
double q4_deviation(const DenseMatrix& rho_ss, const DenseMatrix& rho_ref, int n,
                    std::optional<int> window = std::nullopt);

// deviation / baseline; throws std::invalid_argument without a usable baseline.
double relative_q4_deviation(double deviation, std::optional<double> baseline);

}  // namespace oqtherm
