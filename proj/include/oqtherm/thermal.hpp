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
#include <stdexcept>
#include <string>
#include <vector>

#include "oqtherm/models.hpp"
#include "oqtherm/spin_algebra.hpp"

namespace oqtherm {

// Largest chain for which dense ensembles are built.
inline constexpr int kMaxDenseEnsembleSites = 12;

enum class EnsembleKind { Gibbs, ChargeDeformed };

/// gibbs:           rho ~ exp(-(H - mu Sigma^z) / T)
/// charge_deformed: rho ~ exp(-H / T + q Q4)
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::Gibbs;
  double T = 1.0;
  double mu = 0.0;
  double q = 0.0;

  static EnsembleSpec gibbs(double T, double mu = 0.0) { return {EnsembleKind::Gibbs, T, mu, 0.0}; }
  static EnsembleSpec charge_deformed(double T, double q) {
    return {EnsembleKind::ChargeDeformed, T, 0.0, q};
  }
  void validate() const;
};

enum class Side { Left, Right };

std::string to_string(Side s);
// The m leftmost or rightmost sites, in ascending order.
std::vector<int> boundary_sites(Side side, int m, int n);

DenseMatrix ensemble_state(const ChainModel& model, const EnsembleSpec& spec);

/// Reduced state of ensemble_state on the m boundary spins of `side`.
DenseMatrix reduced_target(const ChainModel& model, const EnsembleSpec& spec, Side side, int m);

/// Spectral cache of H for repeated grand-canonical evaluations at varying
/// (T, mu). When H conserves Sigma^z the diagonalization is done per
/// magnetization sector and every eigenvector carries its magnetization.
class GrandCanonicalFamily {
 public:
  explicit GrandCanonicalFamily(const ChainModel& model);

  const ChainModel& model() const { return model_; }
  bool conserves_magnetization() const { return conserves_; }

  // <k|op|k> for every eigenvector k.
  RealVector diagonal_elements(const SparseOperator& op) const;
  double expectation(const RealVector& diagonal, double T, double mu) const;
  double expectation(const SparseOperator& op, double T, double mu) const;
  DenseMatrix state(double T, double mu) const;

 private:
  RealVector weights(double T, double mu) const;

  ChainModel model_;
  bool conserves_ = false;
  RealVector energies_;
  RealVector magnetizations_;
  DenseMatrix vectors_;
};

/// Observables that fix the reference ensemble. Without `site` only the
/// temperature is fitted (mu = 0); with it, (T, mu) are fitted jointly to the
/// bond energy and the one-site magnetization.
struct MatchingSet {
  int bond = 0;
  std::optional<int> site;
};

// Central bond for Ising; for XXZ the bond (3l+1, 3l+2) and site 3l+1 closest
// to the chain centre.
MatchingSet default_matching(const ChainModel& model);

struct ThermometryResult {
  double T = 0.0;
  double mu = 0.0;
  int iterations = 0;
  double residual = 0.0;  // max-norm mismatch of matched observables
};

class ThermometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ThermometryOptions {
  double t_low = 0.05;
  double t_high = 1e3;
  double tolerance = 1e-9;
  int max_newton_iterations = 200;
};

ThermometryResult measure_temperature(const DenseMatrix& rho_ss, const GrandCanonicalFamily& family,
                                      const MatchingSet& matching, const ThermometryOptions& options = {});
ThermometryResult measure_temperature(const DenseMatrix& rho_ss, const ChainModel& model,
                                      const MatchingSet& matching, const ThermometryOptions& options = {});

}  // namespace oqtherm
