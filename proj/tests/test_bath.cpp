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

#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "oqtherm/bath.hpp"
#include "oqtherm/models.hpp"
#include "test_support.hpp"

using namespace oqtherm;
using oqtherm::testing::random_density;

namespace {

// Sorted by decreasing real part.
std::vector<cplx> spectrum(const DenseMatrix& a) {
  Eigen::ComplexEigenSolver<DenseMatrix> es(a, false);
  std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), [](cplx x, cplx y) { return x.real() > y.real(); });
  return ev;
}

double reset_spectrum_error(const DenseMatrix& superop, double gamma) {
  const std::vector<cplx> ev = spectrum(superop);
  double err = std::abs(ev.front());
  for (std::size_t k = 1; k < ev.size(); ++k) err = std::max(err, std::abs(ev[k] + gamma));
  return err;
}

// D(rho) = gamma sum_k (2 L rho L^dag - L^dag L rho - rho L^dag L) in matrix form.
DenseMatrix apply_lindblad(const LindbladSet& set, const DenseMatrix& rho) {
  DenseMatrix out = DenseMatrix::Zero(rho.rows(), rho.cols());
  for (const DenseMatrix& l : set.operators) {
    const DenseMatrix ldl = l.adjoint() * l;
    out += 2.0 * l * rho * l.adjoint() - ldl * rho - rho * ldl;
  }
  return set.gamma * out;
}

}  // namespace

TEST_SUITE("bath") {
  TEST_CASE("maximally mixed single-spin target") {
    const DenseMatrix target = DenseMatrix::Identity(2, 2) / 2.0;
    const LindbladSet set = reset_lindblads(target, 1.0);
    CHECK(set.operators.size() == 4);
    for (const DenseMatrix& l : set.operators) CHECK(l.cwiseAbs().maxCoeff() == doctest::Approx(0.5));
    CHECK(reset_spectrum_error(lindblad_superop(set), 1.0) < 1e-12);
  }

  TEST_CASE("pure target resets any state onto it") {
    DenseMatrix up = DenseMatrix::Zero(2, 2);
    up(0, 0) = 1.0;
    const LindbladSet set = reset_lindblads(up, 0.7);
    CHECK(set.operators.size() == 2);  // zero-weight operators dropped
    std::mt19937_64 rng(4);
    const DenseMatrix rho = random_density(2, rng);
    CHECK(max_abs(apply_lindblad(set, rho) - 0.7 * (up - rho)) < 1e-14);
    CHECK(reset_spectrum_error(lindblad_superop(set), 0.7) < 1e-12);
  }

  TEST_CASE("reduced Gibbs targets give the reset spectrum") {
    const ChainModel m = ChainModel::ising(6, 1.0, 1.0);
    for (int mm : {1, 2, 3}) {
      for (double T : {1.0, 4.0}) {
        const DenseMatrix target = reduced_target(m, EnsembleSpec::gibbs(T), Side::Left, mm);
        const double gamma = 1.3;
        CHECK(reset_spectrum_error(reset_superop(target, gamma), gamma) < 1e-10);
        CHECK(reset_spectrum_error(lindblad_superop(reset_lindblads(target, gamma)), gamma) < 1e-10);
      }
    }
  }

  TEST_CASE("Lindblad operators are normalized to one half") {
    std::mt19937_64 rng(9);
    for (int d : {2, 4, 8}) {
      const LindbladSet set = reset_lindblads(random_density(d, rng), 1.0);
      DenseMatrix sum = DenseMatrix::Zero(d, d);
      for (const DenseMatrix& l : set.operators) sum += l.adjoint() * l;
      CHECK(max_abs(sum - 0.5 * DenseMatrix::Identity(d, d)) < 1e-12);
    }
  }

  TEST_CASE("term-by-term superoperator equals the closed form and the matrix action") {
    std::mt19937_64 rng(13);
    const DenseMatrix target = random_density(4, rng);
    const LindbladSet set = reset_lindblads(target, 0.8);
    CHECK(max_abs(lindblad_superop(set) - reset_superop(target, 0.8)) < 1e-12);
    const DenseMatrix rho = random_density(4, rng);
    const DenseMatrix via_superop = unvectorize(reset_superop(target, 0.8) * vectorize(rho));
    CHECK(max_abs(via_superop - apply_lindblad(set, rho)) < 1e-12);
    CHECK(max_abs(via_superop - 0.8 * (target - rho)) < 1e-12);
    CHECK(hermiticity_defect(via_superop) < 1e-12);
  }

  TEST_CASE("short-time channel has a positive Choi matrix") {
    std::mt19937_64 rng(15);
    for (int d : {2, 4}) {
      const DenseMatrix target = random_density(d, rng);
      const DenseMatrix channel = (0.1 * reset_superop(target, 1.0)).exp();
      CHECK(eigvalsh(choi_matrix(channel)).minCoeff() >= -1e-10);
    }
    // Choi matrix of the identity channel is the unnormalized Bell projector.
    const DenseMatrix choi = choi_matrix(DenseMatrix::Identity(4, 4));
    CHECK(eigvalsh(choi).maxCoeff() == doctest::Approx(2.0));
  }

  TEST_CASE("vectorization is column stacking") {
    DenseMatrix rho(2, 2);
    rho << 1.0, 2.0, 3.0, 4.0;
    const DenseVector v = vectorize(rho);
    CHECK(v(1) == cplx{3.0});
    CHECK(v(2) == cplx{2.0});
    CHECK(max_abs(unvectorize(v) - rho) == 0.0);
    std::mt19937_64 rng(21);
    const DenseMatrix a = oqtherm::testing::random_matrix(2, rng);
    const DenseMatrix b = oqtherm::testing::random_matrix(2, rng);
    const DenseVector lhs = vectorize(a * rho * b);
    const DenseVector rhs = kron(b.transpose(), a) * v;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
  }

  TEST_CASE("embedded dissipator fixes target times anything") {
    std::mt19937_64 rng(19);
    const DenseMatrix target = random_density(2, rng);
    const BathSpec spec{Side::Left, 1, 1.0, target};
    const SparseOperator d = dissipator_superop(spec, 2);
    for (int trial = 0; trial < 5; ++trial) {
      const DenseMatrix sigma = random_density(2, rng);
      CHECK(d.apply(vectorize(kron(target, sigma))).cwiseAbs().maxCoeff() < 1e-14);
    }
  }

  TEST_CASE("embedded dissipator acts as the reset map on the coupled spins") {
    std::mt19937_64 rng(25);
    const int n = 4;
    const DenseMatrix target = random_density(4, rng);
    const BathSpec spec{Side::Right, 2, 0.6, target};
    const DenseMatrix rho = random_density(16, rng);
    const DenseMatrix got = unvectorize(dissipator_superop(spec, n).apply(vectorize(rho)));
    const int keep[] = {0, 1};
    const DenseMatrix expected = 0.6 * (kron(partial_trace(rho, keep, n), target) - rho);
    CHECK(max_abs(got - expected) < 1e-13);
  }

  TEST_CASE("embedded dissipator preserves the trace") {
    std::mt19937_64 rng(27);
    const BathSpec spec{Side::Left, 2, 1.0, random_density(4, rng)};
    const SparseOperator d = dissipator_superop(spec, 4);
    const DenseVector id = vectorize(DenseMatrix::Identity(16, 16));
    const DenseVector row = d.matrix().transpose() * id;
    CHECK(row.cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("bath specification errors") {
    std::mt19937_64 rng(31);
    const DenseMatrix target = random_density(2, rng);
    CHECK_THROWS_WITH_AS(BathSpec({Side::Left, 1, 0.0, target}).validate(), doctest::Contains("bath.gamma"),
                         std::invalid_argument);
    CHECK_THROWS_AS(BathSpec({Side::Left, 2, 1.0, target}).validate(), std::invalid_argument);
    DenseMatrix bad = target;
    bad(0, 1) += 0.1;
    CHECK_THROWS_AS(reset_lindblads(bad, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(reset_lindblads(2.0 * target, 1.0), std::invalid_argument);
    DenseMatrix negative = DenseMatrix::Zero(2, 2);
    negative(0, 0) = 1.5;
    negative(1, 1) = -0.5;
    CHECK_THROWS_AS(reset_lindblads(negative, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(dissipator_superop(BathSpec{Side::Left, 1, 1.0, target}, 11), std::length_error);
  }
}
