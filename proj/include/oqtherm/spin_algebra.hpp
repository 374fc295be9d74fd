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

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace oqtherm {

using cplx = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

// Entries with magnitude below this are dropped after sparse arithmetic.
inline constexpr double kPruneThreshold = 1e-14;

enum class Axis { I, X, Y, Z };

/// Operator on a 2^k dimensional spin space stored row-major sparse.
///
/// Basis convention shared by the whole library: computational z basis,
/// site 0 is the most significant bit of the basis index, |0> = spin up
/// (sigma^z eigenvalue +1).
class SparseOperator {
 public:
  SparseOperator() = default;
  explicit SparseOperator(SparseMatrix m);

  static SparseOperator identity(std::int64_t dim);
  static SparseOperator zero(std::int64_t dim);
  static SparseOperator from_dense(const DenseMatrix& m);

  std::int64_t dim() const { return matrix_.rows(); }
  std::int64_t nnz() const { return matrix_.nonZeros(); }
  const SparseMatrix& matrix() const { return matrix_; }

  DenseMatrix to_dense() const;
  SparseOperator adjoint() const;
  SparseOperator transpose() const;
  cplx trace() const;

  DenseVector apply(const DenseVector& v) const { return matrix_ * v; }
  // out = A v without allocating; out must already be sized.
  void apply_into(const DenseVector& v, DenseVector& out) const;

  bool is_hermitian(double tol = 1e-12) const;

  SparseOperator& operator+=(const SparseOperator& other);
  SparseOperator& operator-=(const SparseOperator& other);
  SparseOperator& operator*=(cplx s);

  friend SparseOperator operator+(SparseOperator a, const SparseOperator& b) { return a += b; }
  friend SparseOperator operator-(SparseOperator a, const SparseOperator& b) { return a -= b; }
  friend SparseOperator operator*(SparseOperator a, cplx s) { return a *= s; }
  friend SparseOperator operator*(cplx s, SparseOperator a) { return a *= s; }
  friend SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);

 private:
  void prune();

  SparseMatrix matrix_;
};

DenseMatrix pauli(Axis axis);

// Dense tensor product; the left factor occupies the more significant bits.
DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b);

/// Embeds `op`, acting on `sites` (sites[0] is the most significant local
/// bit), into an n-spin space with identity on the remaining sites.
SparseOperator embed(const DenseMatrix& op, std::span<const int> sites, int n);
SparseOperator embed(const DenseMatrix& op, std::initializer_list<int> sites, int n);

// Product of single-site Paulis, e.g. pauli_string({{0, X}, {3, X}}, n).
SparseOperator pauli_string(std::span<const std::pair<int, Axis>> factors, int n);
SparseOperator pauli_string(std::initializer_list<std::pair<int, Axis>> factors, int n);

/// Reduced state on `keep` (output ordering follows `keep`). Requires unit
/// trace within 1e-10.
DenseMatrix partial_trace(const DenseMatrix& rho, std::span<const int> keep, int n);
DenseMatrix partial_trace(const SparseOperator& rho, std::span<const int> keep, int n);

struct Eigensystem {
  RealVector values;     // ascending
  DenseMatrix vectors;   // columns
};

// Hermitian eigendecomposition; takes the real-symmetric path when the
// imaginary part vanishes identically.
Eigensystem eigh(const DenseMatrix& a);
RealVector eigvalsh(const DenseMatrix& a);

/// exp(A) for Hermitian A via its spectral decomposition.
DenseMatrix dense_expm_hermitian(const DenseMatrix& a);

// Helpers shared by tests and diagnostics.
double max_abs(const DenseMatrix& m);
double max_abs(const SparseOperator& m);
double hermiticity_defect(const DenseMatrix& m);
bool is_power_of_two(std::int64_t d);
int log2_dim(std::int64_t d);
SparseOperator commutator(const SparseOperator& a, const SparseOperator& b);
DenseMatrix commutator(const DenseMatrix& a, const DenseMatrix& b);
double trace_distance(const DenseMatrix& a, const DenseMatrix& b);
// tr(rho * op)
cplx trace_product(const DenseMatrix& rho, const SparseOperator& op);

}  // namespace oqtherm
