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

#include <span>
#include <string>
#include <vector>

#include "oqtherm/spin_algebra.hpp"
#include "oqtherm/thermal.hpp"

namespace oqtherm {

// Largest chain whose 4^n Liouville space is assembled.
inline constexpr int kMaxLiouvilleSites = 10;

/// Throws std::invalid_argument unless `rho` is Hermitian (1e-12), has
/// eigenvalues >= -1e-12 and unit trace (1e-12). `what` prefixes the message.
void validate_density_matrix(const DenseMatrix& rho, const std::string& what);

struct BathSpec {
  Side side = Side::Left;
  int m = 1;
  double gamma = 1.0;
  DenseMatrix target;  // 2^m x 2^m

  void validate() const;
};

/// Lindblad operators of the boundary dissipator. Their normalization is
/// fixed against  D rho = gamma sum_k (2 L rho L^dag - L^dag L rho - rho L^dag L),
/// under which sum_k L_k^dag L_k = 1/2.
struct LindbladSet {
  std::vector<DenseMatrix> operators;
  double gamma = 1.0;
};

/// L_(i,j) = sqrt(lambda_i / 2) |i><j| over the eigenbasis of `target`;
/// zero-weight operators are dropped. The generated dissipator is the reset
/// map gamma (target tr(rho) - rho).
LindbladSet reset_lindblads(const DenseMatrix& target, double gamma);

// Column-stacked superoperator of a Lindblad set, built term by term.
DenseMatrix lindblad_superop(const LindbladSet& set);

// Closed form gamma (|vec target><vec 1| - 1) on the 4^m local space.
DenseMatrix reset_superop(const DenseMatrix& target, double gamma);

/// Embeds a local column-stacked superoperator on `sites` into the 4^n
/// Liouville space (identity on the other sites).
SparseOperator embed_superop(const DenseMatrix& local, std::span<const int> sites, int n);

SparseOperator dissipator_superop(const BathSpec& spec, int n);

// Column-stacking helpers; vec(rho)[i + d j] = rho(i, j).
DenseVector vectorize(const DenseMatrix& rho);
DenseMatrix unvectorize(const DenseVector& v);

// Choi matrix sum_kl |k><l| kron S(|k><l|) of a column-stacked superoperator.
DenseMatrix choi_matrix(const DenseMatrix& superop);

}  // namespace oqtherm
