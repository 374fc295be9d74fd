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

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "oqtherm/liouville.hpp"
#include "test_support.hpp"

using namespace oqtherm;
using oqtherm::testing::random_density;

namespace {

std::vector<BathSpec> gibbs_baths(const ChainModel& m, int mm, double T, double gamma = 1.0) {
  const EnsembleSpec spec = EnsembleSpec::gibbs(T);
  return {BathSpec{Side::Left, mm, gamma, reduced_target(m, spec, Side::Left, mm)},
          BathSpec{Side::Right, mm, gamma, reduced_target(m, spec, Side::Right, mm)}};
}

std::vector<cplx> dense_spectrum(const SparseOperator& g) {
  Eigen::ComplexEigenSolver<DenseMatrix> es(g.to_dense(), false);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

}  // namespace

TEST_SUITE("liouville") {
  TEST_CASE("unitary generator has eigenvalues i(E_j - E_k)") {
    const ChainModel m = ChainModel::ising(2, 1.0, 0.4);
    const Liouvillian L = assemble(m, {});
    const RealVector e = eigvalsh(hamiltonian(m).to_dense());
    std::vector<double> expected;
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) expected.push_back(e(j) - e(k));
    std::vector<double> got;
    for (cplx z : dense_spectrum(L.generator)) {
      CHECK(std::abs(z.real()) < 1e-12);
      got.push_back(z.imag());
    }
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - expected[i]) < 1e-12);
    // Column-stacked form -i (1 kron H - H^T kron 1).
    const DenseMatrix h = hamiltonian(m).to_dense();
    const DenseMatrix id = DenseMatrix::Identity(4, 4);
    CHECK(max_abs(L.generator.to_dense() - cplx{0.0, -1.0} * (kron(id, h) - kron(h.transpose(), id))) < 1e-15);
  }

  TEST_CASE("unitary generator annihilates the grand canonical state") {
    const ChainModel m = ChainModel::xxz_staggered(5, 0.5, 0.6);
    const Liouvillian L = assemble(m, {});
    const DenseMatrix rho = ensemble_state(m, EnsembleSpec::gibbs(2.0, 0.3));
    CHECK(L.generator.apply(vectorize(rho)).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("single spin without Hamiltonian is the local dissipator") {
    std::mt19937_64 rng(1);
    const DenseMatrix target = random_density(2, rng);
    const Liouvillian L = assemble(SparseOperator::zero(2), {BathSpec{Side::Left, 1, 0.9, target}});
    CHECK(max_abs(L.generator.to_dense() - reset_superop(target, 0.9)) < 1e-15);
  }

  TEST_CASE("generator preserves the trace and has no growing modes") {
    const ChainModel m = ChainModel::ising(4, 1.0, 1.0);
    const Liouvillian L = assemble(m, gibbs_baths(m, 1, 4.0));
    const DenseVector id = vectorize(DenseMatrix::Identity(16, 16));
    CHECK((L.generator.matrix().transpose() * id).cwiseAbs().maxCoeff() < 1e-12);
    double abscissa = -1.0;
    for (cplx z : dense_spectrum(L.generator)) abscissa = std::max(abscissa, z.real());
    CHECK(abscissa <= 1e-10);
  }

  TEST_CASE("assembly errors") {
    const ChainModel m = ChainModel::ising(4, 1.0, 1.0);
    const DenseMatrix t3 = reduced_target(m, EnsembleSpec::gibbs(2.0), Side::Left, 3);
    CHECK_THROWS_WITH_AS(assemble(m, {BathSpec{Side::Left, 3, 1.0, t3}, BathSpec{Side::Right, 3, 1.0, t3}}),
                         doctest::Contains("overlap"), std::invalid_argument);
    CHECK_THROWS_AS(assemble(ChainModel::ising(11, 1.0, 1.0), {}), std::length_error);
  }

  TEST_CASE("pure reset converges to the target at rate gamma") {
    std::mt19937_64 rng(2);
    const DenseMatrix target = random_density(4, rng);
    const Liouvillian L = assemble(SparseOperator::zero(4), {BathSpec{Side::Left, 2, 0.5, target}});
    const SteadyStateResult r = propagate_to_steady_state(L, maximally_mixed(2));
    REQUIRE(r.converged);
    CHECK(max_abs(r.rho_ss - target) < 1e-8);
    CHECK(r.decay_rate == doctest::Approx(0.5).epsilon(0.05));
    CHECK(r.fit_r_squared > 0.99);
  }

  TEST_CASE("propagation matches the null-space oracle") {
    for (const ChainModel& m : {ChainModel::ising(3, 1.0, 1.0), ChainModel::xxz_staggered(3, 0.5, 0.5)}) {
      const Liouvillian L = assemble(m, gibbs_baths(m, 1, 4.0));
      const SteadyStateResult oracle = nullspace_steady_state(L);
      CHECK(oracle.residual < 1e-10);
      SolverConfig cfg;
      cfg.tol = 1e-11;
      const SteadyStateResult prop = propagate_to_steady_state(L, maximally_mixed(3), cfg);
      REQUIRE(prop.converged);
      CHECK(trace_distance(oracle.rho_ss, prop.rho_ss) < 1e-8);
      CHECK(eigvalsh(prop.rho_ss).minCoeff() >= -1e-8);
    }
  }

  TEST_CASE("null-space oracle refuses a degenerate zero eigenvalue") {
    const Liouvillian L = assemble(ChainModel::ising(3, 1.0, 1.0), {});
    CHECK_THROWS_WITH_AS(nullspace_steady_state(L), doctest::Contains("multiplicity"), SteadyStateError);
    const ChainModel big = ChainModel::ising(5, 1.0, 1.0);
    CHECK_THROWS_AS(nullspace_steady_state(assemble(big, gibbs_baths(big, 1, 4.0))), std::invalid_argument);
  }

  TEST_CASE("steady state is independent of the initial state and the flow is contractive") {
    const ChainModel m = ChainModel::ising(4, 1.0, 1.0);
    const Liouvillian L = assemble(m, gibbs_baths(m, 1, 4.0));
    SolverConfig cfg;
    cfg.tol = 1e-11;
    const SteadyStateResult a = propagate_to_steady_state(L, maximally_mixed(4), cfg);
    const SteadyStateResult b = propagate_to_steady_state(L, random_product_state(4, 7), cfg);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(trace_distance(a.rho_ss, b.rho_ss) < 1e-8);

    Rk4Propagator pa(L, maximally_mixed(4), 0.02);
    Rk4Propagator pb(L, random_product_state(4, 7), 0.02);
    double prev = trace_distance(pa.rho(), pb.rho());
    for (int k = 0; k < 40; ++k) {
      pa.advance(0.5);
      pb.advance(0.5);
      const double d = trace_distance(pa.rho(), pb.rho());
      CHECK(d <= prev + 1e-12);
      prev = d;
    }
  }

  TEST_CASE("trace and Hermiticity are preserved along the trajectory") {
    const ChainModel m = ChainModel::ising(5, 1.0, 1.0);
    const Liouvillian L = assemble(m, gibbs_baths(m, 2, 4.0));
    const SteadyStateResult r = propagate_to_steady_state(L, random_product_state(5, 3));
    REQUIRE(r.converged);
    for (const Checkpoint& c : r.history) {
      CHECK(c.trace_error < 1e-10);
      CHECK(c.hermiticity_drift < 1e-10);
    }
    CHECK(r.fit_r_squared > 0.99);
    CHECK(r.residual < 1e-9);
    CHECK(std::abs(r.rho_ss.trace() - cplx{1.0}) < 1e-12);
  }

  TEST_CASE("non-convergence is flagged, not thrown") {
    const ChainModel m = ChainModel::ising(4, 1.0, 1.0);
    const Liouvillian L = assemble(m, gibbs_baths(m, 1, 4.0));
    SolverConfig cfg;
    cfg.t_max = 3.0;
    const SteadyStateResult r = propagate_to_steady_state(L, maximally_mixed(4), cfg);
    CHECK_FALSE(r.converged);
    CHECK(r.history.size() == 3);
    CHECK(r.residual > cfg.tol);
  }

  TEST_CASE("an unstable step is rejected") {
    const ChainModel m = ChainModel::ising(3, 1.0, 1.0);
    const Liouvillian L = assemble(m, gibbs_baths(m, 1, 4.0));
    SolverConfig cfg;
    cfg.courant = 40.0;
    cfg.check_interval = 40.0;
    CHECK_THROWS_AS(propagate_to_steady_state(L, maximally_mixed(3), cfg), SteadyStateError);
  }

  TEST_CASE("solver argument errors") {
    const ChainModel m = ChainModel::ising(3, 1.0, 1.0);
    const Liouvillian L = assemble(m, gibbs_baths(m, 1, 4.0));
    SolverConfig cfg;
    cfg.tol = 0.0;
    CHECK_THROWS_AS(propagate_to_steady_state(L, maximally_mixed(3), cfg), std::invalid_argument);
    CHECK_THROWS_AS(propagate_to_steady_state(L, DenseMatrix::Identity(8, 8), {}), std::invalid_argument);
    CHECK_THROWS_AS(propagate_to_steady_state(assemble(m, {}), maximally_mixed(3), {}), std::invalid_argument);
  }

  TEST_CASE("log-residual fit on an exact exponential") {
    std::vector<Checkpoint> h;
    for (int k = 1; k <= 20; ++k) h.push_back(Checkpoint{static_cast<double>(k), 3.0 * std::exp(-0.7 * k), 0.0, 0.0});
    const ExponentialFit fit = fit_log_residual(h);
    CHECK(fit.rate == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("initial states") {
    const DenseMatrix p = random_product_state(4, 11);
    CHECK(std::abs((p * p).trace() - cplx{1.0}) < 1e-12);
    CHECK(max_abs(p - random_product_state(4, 11)) == 0.0);
    CHECK(max_abs(p - random_product_state(4, 12)) > 1e-3);
    CHECK(max_abs(maximally_mixed(3) - DenseMatrix::Identity(8, 8) / 8.0) == 0.0);
  }
}
