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

#include "oqtherm/spin_algebra.hpp"

#include "site_bits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace oqtherm {

namespace {

using detail::deposit_table;
using detail::extract;
using detail::site_mask;
using Triplet = Eigen::Triplet<cplx>;

constexpr int kMaxLocalSites = 6;

// Enumerates every assignment of the bits outside `mask`.
std::vector<std::int64_t> complement_configs(std::int64_t mask, int n) {
  std::vector<int> free_bits;
  for (int b = 0; b < n; ++b) {
    if (!(mask & (std::int64_t{1} << b))) free_bits.push_back(b);
  }
  std::vector<std::int64_t> out(std::size_t{1} << free_bits.size(), 0);
  for (std::size_t x = 0; x < out.size(); ++x) {
    std::int64_t g = 0;
    for (std::size_t q = 0; q < free_bits.size(); ++q) {
      if ((x >> q) & 1U) g |= std::int64_t{1} << free_bits[q];
    }
    out[x] = g;
  }
  return out;
}

void check_trace(cplx tr) {
  if (std::abs(tr - cplx{1.0, 0.0}) > 1e-10) {
    throw std::invalid_argument("partial_trace: input trace " + std::to_string(tr.real()) +
                                " is not 1");
  }
}

}  // namespace

SparseOperator::SparseOperator(SparseMatrix m) : matrix_(std::move(m)) {
  if (matrix_.rows() != matrix_.cols() || !is_power_of_two(matrix_.rows())) {
    throw std::invalid_argument("SparseOperator: dimension must be a square power of two");
  }
  prune();
}

SparseOperator SparseOperator::identity(std::int64_t dim) {
  SparseMatrix m(dim, dim);
  m.setIdentity();
  return SparseOperator(std::move(m));
}

SparseOperator SparseOperator::zero(std::int64_t dim) { return SparseOperator(SparseMatrix(dim, dim)); }

SparseOperator SparseOperator::from_dense(const DenseMatrix& m) {
  return SparseOperator(SparseMatrix(m.sparseView(1.0, kPruneThreshold)));
}

DenseMatrix SparseOperator::to_dense() const { return DenseMatrix(matrix_); }

SparseOperator SparseOperator::adjoint() const { return SparseOperator(SparseMatrix(matrix_.adjoint())); }

SparseOperator SparseOperator::transpose() const {
  return SparseOperator(SparseMatrix(matrix_.transpose()));
}

cplx SparseOperator::trace() const {
  cplx tr{0.0, 0.0};
  for (std::int64_t r = 0; r < matrix_.outerSize(); ++r) tr += matrix_.coeff(r, r);
  return tr;
}

void SparseOperator::apply_into(const DenseVector& v, DenseVector& out) const {
  const auto* outer = matrix_.outerIndexPtr();
  const auto* inner = matrix_.innerIndexPtr();
  const auto* vals = matrix_.valuePtr();
  const cplx* x = v.data();
  cplx* y = out.data();
  const std::int64_t rows = matrix_.rows();
  for (std::int64_t r = 0; r < rows; ++r) {
    cplx acc{0.0, 0.0};
    for (std::int64_t k = outer[r]; k < outer[r + 1]; ++k) acc += vals[k] * x[inner[k]];
    y[r] = acc;
  }
}

bool SparseOperator::is_hermitian(double tol) const {
  SparseMatrix diff = matrix_ - SparseMatrix(matrix_.adjoint());
  for (std::int64_t k = 0; k < diff.nonZeros(); ++k) {
    if (std::abs(diff.valuePtr()[k]) > tol) return false;
  }
  return true;
}

SparseOperator& SparseOperator::operator+=(const SparseOperator& other) {
  matrix_ += other.matrix_;
  prune();
  return *this;
}

SparseOperator& SparseOperator::operator-=(const SparseOperator& other) {
  matrix_ -= other.matrix_;
  prune();
  return *this;
}

SparseOperator& SparseOperator::operator*=(cplx s) {
  matrix_ *= s;
  prune();
  return *this;
}

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
  return SparseOperator(SparseMatrix(a.matrix_ * b.matrix_));
}

void SparseOperator::prune() {
  matrix_.prune([](std::int64_t, std::int64_t, const cplx& v) { return std::abs(v) >= kPruneThreshold; });
  matrix_.makeCompressed();
}

DenseMatrix pauli(Axis axis) {
  using namespace std::complex_literals;
  DenseMatrix p(2, 2);
  switch (axis) {
    case Axis::I: p << 1.0, 0.0, 0.0, 1.0; break;
    case Axis::X: p << 0.0, 1.0, 1.0, 0.0; break;
    case Axis::Y: p << 0.0, -1i, 1i, 0.0; break;
    case Axis::Z: p << 1.0, 0.0, 0.0, -1.0; break;
  }
  return p;
}

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

SparseOperator embed(const DenseMatrix& op, std::span<const int> sites, int n) {
  const int k = static_cast<int>(sites.size());
  if (k > kMaxLocalSites) throw std::invalid_argument("embed: at most 6 local sites");
  if (op.rows() != (Eigen::Index{1} << k) || op.cols() != op.rows()) {
    throw std::invalid_argument("embed: operator dimension does not match site count");
  }
  const std::int64_t mask = site_mask(sites, n);
  const auto deposit = deposit_table(sites, n);
  const std::int64_t dim = std::int64_t{1} << n;

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(dim) * static_cast<std::size_t>(op.rows()));
  for (std::int64_t row = 0; row < dim; ++row) {
    const std::int64_t local_row = extract(row, sites, n);
    const std::int64_t rest = row & ~mask;
    for (Eigen::Index lc = 0; lc < op.cols(); ++lc) {
      const cplx v = op(local_row, lc);
      if (std::abs(v) < kPruneThreshold) continue;
      triplets.emplace_back(static_cast<int>(row), static_cast<int>(rest | deposit[lc]), v);
    }
  }
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return SparseOperator(std::move(m));
}

SparseOperator embed(const DenseMatrix& op, std::initializer_list<int> sites, int n) {
  return embed(op, std::span<const int>(sites.begin(), sites.size()), n);
}

SparseOperator pauli_string(std::span<const std::pair<int, Axis>> factors, int n) {
  std::vector<int> sites;
  DenseMatrix op = DenseMatrix::Identity(1, 1);
  for (const auto& [site, axis] : factors) {
    sites.push_back(site);
    op = kron(op, pauli(axis));
  }
  return embed(op, sites, n);
}

SparseOperator pauli_string(std::initializer_list<std::pair<int, Axis>> factors, int n) {
  return pauli_string(std::span<const std::pair<int, Axis>>(factors.begin(), factors.size()), n);
}

DenseMatrix partial_trace(const DenseMatrix& rho, std::span<const int> keep, int n) {
  const std::int64_t dim = std::int64_t{1} << n;
  if (rho.rows() != dim || rho.cols() != dim) {
    throw std::invalid_argument("partial_trace: dimension mismatch");
  }
  if (keep.size() > kMaxLocalSites) throw std::invalid_argument("partial_trace: keep at most 6 sites");
  check_trace(rho.trace());
  const std::int64_t mask = site_mask(keep, n);
  const auto deposit = deposit_table(keep, n);
  const auto rest = complement_configs(mask, n);
  const auto d = static_cast<Eigen::Index>(deposit.size());

  DenseMatrix out = DenseMatrix::Zero(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      cplx acc{0.0, 0.0};
      for (std::int64_t r : rest) acc += rho(deposit[a] | r, deposit[b] | r);
      out(a, b) = acc;
    }
  }
  return 0.5 * (out + out.adjoint());
}

DenseMatrix partial_trace(const SparseOperator& rho, std::span<const int> keep, int n) {
  if (rho.dim() != (std::int64_t{1} << n)) throw std::invalid_argument("partial_trace: dimension mismatch");
  if (keep.size() > kMaxLocalSites) throw std::invalid_argument("partial_trace: keep at most 6 sites");
  check_trace(rho.trace());
  const std::int64_t mask = site_mask(keep, n);
  const auto d = Eigen::Index{1} << keep.size();

  DenseMatrix out = DenseMatrix::Zero(d, d);
  const SparseMatrix& m = rho.matrix();
  for (std::int64_t r = 0; r < m.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
      if ((it.row() & ~mask) != (it.col() & ~mask)) continue;
      out(extract(it.row(), keep, n), extract(it.col(), keep, n)) += it.value();
    }
  }
  return 0.5 * (out + out.adjoint());
}

Eigensystem eigh(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("eigh: matrix must be square");
  Eigensystem es;
  if (a.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.real());
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigh: diagonalization failed");
    es.values = solver.eigenvalues();
    es.vectors = solver.eigenvectors().cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(a);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigh: diagonalization failed");
    es.values = solver.eigenvalues();
    es.vectors = solver.eigenvectors();
  }
  return es;
}

RealVector eigvalsh(const DenseMatrix& a) {
  if (a.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.real(), Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
  }
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(a, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

DenseMatrix dense_expm_hermitian(const DenseMatrix& a) {
  if (hermiticity_defect(a) > 1e-12 * std::max(1.0, max_abs(a))) {
    throw std::invalid_argument("dense_expm_hermitian: input is not Hermitian");
  }
  const Eigensystem es = eigh(0.5 * (a + a.adjoint()));
  const RealVector w = es.values.array().exp();
  DenseMatrix out = es.vectors * w.cast<cplx>().asDiagonal() * es.vectors.adjoint();
  return 0.5 * (out + out.adjoint());
}

double max_abs(const DenseMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double max_abs(const SparseOperator& m) {
  double best = 0.0;
  const auto& mat = m.matrix();
  for (std::int64_t k = 0; k < mat.nonZeros(); ++k) best = std::max(best, std::abs(mat.valuePtr()[k]));
  return best;
}

double hermiticity_defect(const DenseMatrix& m) { return max_abs(m - m.adjoint()); }

bool is_power_of_two(std::int64_t d) { return d > 0 && (d & (d - 1)) == 0; }

int log2_dim(std::int64_t d) {
  if (!is_power_of_two(d)) throw std::invalid_argument("dimension is not a power of two");
  int k = 0;
  while ((std::int64_t{1} << k) < d) ++k;
  return k;
}

SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) { return a * b - b * a; }

DenseMatrix commutator(const DenseMatrix& a, const DenseMatrix& b) { return a * b - b * a; }

double trace_distance(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix diff = a - b;
  diff = 0.5 * (diff + diff.adjoint());
  return 0.5 * eigvalsh(diff).cwiseAbs().sum();
}

cplx trace_product(const DenseMatrix& rho, const SparseOperator& op) {
  if (rho.rows() != op.dim() || rho.cols() != op.dim()) {
    throw std::invalid_argument("trace_product: dimension mismatch");
  }
  cplx acc{0.0, 0.0};
  const SparseMatrix& m = op.matrix();
  for (std::int64_t r = 0; r < m.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) acc += rho(it.col(), it.row()) * it.value();
  }
  return acc;
}

}  // namespace oqtherm
