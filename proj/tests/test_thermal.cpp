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

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "oqtherm/diagnostics.hpp"
#include "oqtherm/models.hpp"
#include "oqtherm/thermal.hpp"

using namespace oqtherm;

namespace {

// sum_k e^{-E_k/T} |k><k| / Z from an independent eigensolve.
DenseMatrix spectral_gibbs(const DenseMatrix& h, double T) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h);
  const RealVector e = es.eigenvalues();
  RealVector w = (-(e.array() - e.minCoeff()) / T).exp();
  w /= w.sum();
  return es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

TEST_SUITE("thermal") {
  TEST_CASE("infinite temperature limit") {
    const ChainModel m = ChainModel::ising(5, 1.0, 1.0);
    const DenseMatrix rho = ensemble_state(m, EnsembleSpec::gibbs(1e6));
    CHECK(max_abs(rho - DenseMatrix::Identity(32, 32) / 32.0) < 1e-5);
    const DenseMatrix target = reduced_target(m, EnsembleSpec::gibbs(1e6), Side::Left, 2);
    CHECK(max_abs(target - DenseMatrix::Identity(4, 4) / 4.0) < 1e-5);
  }

  TEST_CASE("decoupled spin in a longitudinal field") {
    // J = 0, b_z = 2 on two sites: H = Z_0 + Z_1.
    const double T = 0.7;
    const ChainModel m = ChainModel::ising(2, 0.0, 2.0, 0, 0.0);
    const DenseMatrix rho = ensemble_state(m, EnsembleSpec::gibbs(T));
    CHECK(expectation(rho, embed(pauli(Axis::Z), {0}, 2)) == doctest::Approx(-std::tanh(1.0 / T)).epsilon(1e-12));
  }

  TEST_CASE("Gibbs state matches a spectral-sum oracle") {
    const ChainModel m = ChainModel::ising(4, 1.0, 0.0);
    const DenseMatrix rho = ensemble_state(m, EnsembleSpec::gibbs(1.3));
    CHECK(max_abs(rho - spectral_gibbs(hamiltonian(m).to_dense(), 1.3)) < 1e-12);
  }

  TEST_CASE("grand canonical state with chemical potential") {
    const ChainModel m = ChainModel::xxz_staggered(6, 0.5, 0.7);
    const DenseMatrix k = (hamiltonian(m) - 0.4 * total_magnetization(6)).to_dense();
    const DenseMatrix rho = ensemble_state(m, EnsembleSpec::gibbs(2.5, 0.4));
    CHECK(max_abs(rho - spectral_gibbs(k, 2.5)) < 1e-12);
    CHECK(max_abs(commutator(k, rho)) < 1e-10);
    CHECK(std::abs(rho.trace() - cplx{1.0}) < 1e-13);
    CHECK(eigvalsh(rho).minCoeff() > 0.0);
  }

  TEST_CASE("charge-deformed ensemble") {
    const ChainModel m = ChainModel::xxz_staggered(6, 0.5, 0.3);
    const DenseMatrix q0 = ensemble_state(m, EnsembleSpec::charge_deformed(3.0, 0.0));
    CHECK(max_abs(q0 - ensemble_state(m, EnsembleSpec::gibbs(3.0))) == 0.0);

    const DenseMatrix k = hamiltonian(m).to_dense() / 3.0 - 1.5 * q4_charge(6).to_dense();
    CHECK(max_abs(ensemble_state(m, EnsembleSpec::charge_deformed(3.0, 1.5)) - spectral_gibbs(k, 1.0)) < 1e-12);
  }

  TEST_CASE("ensemble errors") {
    const ChainModel m = ChainModel::ising(4, 1.0, 1.0);
    CHECK_THROWS_AS(ensemble_state(m, EnsembleSpec::gibbs(0.0)), std::invalid_argument);
    CHECK_THROWS_AS(ensemble_state(m, EnsembleSpec::gibbs(-1.0)), std::invalid_argument);
    CHECK_THROWS_AS(ensemble_state(ChainModel::ising(13, 1.0, 1.0), EnsembleSpec::gibbs(1.0)), std::invalid_argument);
    CHECK_THROWS_AS(reduced_target(m, EnsembleSpec::gibbs(1.0), Side::Left, 0), std::out_of_range);
    CHECK_THROWS_AS(reduced_target(ChainModel::ising(6, 1.0, 1.0), EnsembleSpec::gibbs(1.0), Side::Left, 5),
                    std::out_of_range);
  }

  TEST_CASE("reduced targets") {
    const ChainModel m = ChainModel::ising(8, 1.0, 1.0);
    const EnsembleSpec spec = EnsembleSpec::gibbs(4.0);
    const DenseMatrix rho = ensemble_state(m, spec);
    const int left[] = {0, 1};
    const int right[] = {6, 7};
    const DenseMatrix tl = reduced_target(m, spec, Side::Left, 2);
    CHECK(max_abs(tl - partial_trace(rho, left, 8)) < 1e-12);
    // Uniform chain is reflection symmetric; the mirrored right target has
    // its two spins swapped.
    DenseMatrix swap = DenseMatrix::Zero(4, 4);
    swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1.0;
    const DenseMatrix tr = reduced_target(m, spec, Side::Right, 2);
    CHECK(max_abs(tr - partial_trace(rho, right, 8)) < 1e-12);
    CHECK(max_abs(tl - swap * tr * swap) < 1e-12);
    CHECK(boundary_sites(Side::Right, 3, 8) == std::vector<int>{5, 6, 7});
  }

  TEST_CASE("product-form ensembles factorize") {
    const ChainModel m = ChainModel::ising(5, 0.6, 0.9, 0, 0.0);
    const EnsembleSpec spec = EnsembleSpec::gibbs(1.1);
    const DenseMatrix two = reduced_target(m, spec, Side::Left, 2);
    const int s0[] = {0};
    const int s1[] = {1};
    const DenseMatrix rho = ensemble_state(m, spec);
    CHECK(max_abs(two - kron(partial_trace(rho, s0, 5), partial_trace(rho, s1, 5))) < 1e-13);
  }

  TEST_CASE("grand canonical family reproduces ensemble_state") {
    const ChainModel xxz = ChainModel::xxz_staggered(6, 0.5, 0.9);
    const GrandCanonicalFamily fam(xxz);
    CHECK(fam.conserves_magnetization());
    CHECK(max_abs(fam.state(2.0, -0.3) - ensemble_state(xxz, EnsembleSpec::gibbs(2.0, -0.3))) < 1e-12);
    const SparseOperator h2 = local_density(xxz, 2);
    CHECK(fam.expectation(h2, 2.0, -0.3) ==
          doctest::Approx(expectation(ensemble_state(xxz, EnsembleSpec::gibbs(2.0, -0.3)), h2)).epsilon(1e-12));

    const ChainModel ising = ChainModel::ising(6, 1.0, 1.0);
    const GrandCanonicalFamily ifam(ising);
    CHECK_FALSE(ifam.conserves_magnetization());
    CHECK(max_abs(ifam.state(3.0, 0.0) - ensemble_state(ising, EnsembleSpec::gibbs(3.0))) < 1e-12);
  }

  TEST_CASE("default matching sets") {
    const MatchingSet ising = default_matching(ChainModel::ising(8, 1.0, 1.0));
    CHECK(ising.bond == 3);
    CHECK_FALSE(ising.site.has_value());
    const MatchingSet xxz = default_matching(ChainModel::xxz_staggered(8, 0.5, 1.0));
    CHECK(xxz.bond == 4);
    REQUIRE(xxz.site.has_value());
    CHECK(*xxz.site == 4);
  }

  TEST_CASE("central bond energy is monotone in T for Ising n = 8") {
    const ChainModel m = ChainModel::ising(8, 1.0, 1.0);
    const GrandCanonicalFamily fam(m);
    const RealVector diag = fam.diagonal_elements(local_density(m, 3));
    double prev = fam.expectation(diag, 0.05, 0.0);
    for (double T = 0.06; T < 1000.0; T *= 1.05) {
      const double e = fam.expectation(diag, T, 0.0);
      CHECK(e >= prev - 1e-12);
      prev = e;
    }
  }

  TEST_CASE("thermometry recovers the temperature of a Gibbs state") {
    const ChainModel m = ChainModel::ising(6, 1.0, 1.0);
    const GrandCanonicalFamily fam(m);
    const ThermometryResult r = measure_temperature(fam.state(3.0, 0.0), fam, default_matching(m));
    CHECK(r.T == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(r.mu == 0.0);
  }

  TEST_CASE("thermometry recovers (T, mu) on an XXZ chain") {
    const ChainModel m = ChainModel::xxz_staggered(6, 0.5, 1.0);
    const GrandCanonicalFamily fam(m);
    const ThermometryResult r = measure_temperature(fam.state(5.851, -0.534), fam, default_matching(m));
    CHECK(std::abs(r.T - 5.851) < 1e-6);
    CHECK(std::abs(r.mu + 0.534) < 1e-6);
    CHECK(r.residual < 1e-9);
  }

  TEST_CASE("thermometry reports unreachable observables") {
    const ChainModel m = ChainModel::ising(6, 1.0, 1.0);
    const GrandCanonicalFamily fam(m);
    // The highest-energy eigenstate has a central bond energy above every
    // positive-temperature Gibbs value.
    const Eigensystem es = eigh(hamiltonian(m).to_dense());
    const DenseVector top = es.vectors.col(es.vectors.cols() - 1);
    const DenseMatrix inverted = top * top.adjoint();
    CHECK_THROWS_AS(measure_temperature(inverted, fam, default_matching(m)), ThermometryError);
  }
}
