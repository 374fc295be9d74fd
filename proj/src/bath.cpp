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

#include "oqtherm/bath.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "superop_rows.hpp"

namespace oqtherm {

void validate_density_matrix(const DenseMatrix& rho, const std::string& what) {
  if (rho.rows() != rho.cols() || !is_power_of_two(rho.rows())) {
    throw std::invalid_argument(what + ": density matrix must be square with power-of-two dimension");
  }
  const double herm = hermiticity_defect(rho);
  if (herm > 1e-12) {
    std::ostringstream msg;
    msg << what << ": density matrix is not Hermitian (defect " << herm << ")";
    throw std::invalid_argument(msg.str());
  }
  const cplx tr = rho.trace();
  if (std::abs(tr - cplx{1.0, 0.0}) > 1e-12) {
    std::ostringstream msg;
    msg << what << ": density matrix trace " << tr.real() << " is not 1";
    throw std::invalid_argument(msg.str());
  }
  const double lowest = eigvalsh(0.5 * (rho + rho.adjoint())).minCoeff();
  if (lowest < -1e-12) {
    std::ostringstream msg;
    msg << what << ": density matrix has negative eigenvalue " << lowest;
    throw std::invalid_argument(msg.str());
  }
}

void BathSpec::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("bath.gamma: coupling rate must be positive");
  }
  if (m < 1) throw std::invalid_argument("bath.m: must be at least 1");
  if (target.rows() != (Eigen::Index{1} << m)) {
    throw std::invalid_argument("bath target dimension does not match m");
  }
  validate_density_matrix(target, "bath target");
}

LindbladSet reset_lindblads(const DenseMatrix& target, double gamma) {
  validate_density_matrix(target, "reset_lindblads");
  if (!(gamma > 0.0)) throw std::invalid_argument("reset_lindblads: gamma must be positive");
  const Eigensystem es = eigh(0.5 * (target + target.adjoint()));
  RealVector weights = es.values.cwiseMax(0.0);
  weights /= weights.sum();

  LindbladSet set;
  set.gamma = gamma;
  const Eigen::Index d = target.rows();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (weights(i) == 0.0) continue;
    const double amp = std::sqrt(weights(i) / 2.0);
    for (Eigen::Index j = 0; j < d; ++j) {
      set.operators.push_back(amp * es.vectors.col(i) * es.vectors.col(j).adjoint());
    }
  }
  return set;
}

DenseMatrix lindblad_superop(const LindbladSet& set) {
  if (set.operators.empty()) throw std::invalid_argument("lindblad_superop: empty Lindblad set");
  const Eigen::Index d = set.operators.front().rows();
  const DenseMatrix id = DenseMatrix::Identity(d, d);
  DenseMatrix out = DenseMatrix::Zero(d * d, d * d);
  for (const DenseMatrix& l : set.operators) {
    const DenseMatrix ldl = l.adjoint() * l;
    // A rho B -> (B^T kron A) vec(rho)
    out += 2.0 * kron(l.conjugate(), l) - kron(id, ldl) - kron(ldl.transpose(), id);
  }
  return set.gamma * out;
}

DenseMatrix reset_superop(const DenseMatrix& target, double gamma) {
  const Eigen::Index d = target.rows();
  const DenseVector vt = vectorize(target);
  const DenseVector vid = vectorize(DenseMatrix::Identity(d, d));
  return gamma * (vt * vid.transpose() - DenseMatrix::Identity(d * d, d * d));
}

SparseOperator embed_superop(const DenseMatrix& local, std::span<const int> sites, int n) {
  if (n > kMaxLiouvilleSites) {
    throw std::length_error("Liouville space for n = " + std::to_string(n) + " exceeds the n <= " +
                            std::to_string(kMaxLiouvilleSites) + " memory budget");
  }
  const detail::LocalSuperopRows rows(local, sites, n);
  const std::int64_t dim = std::int64_t{1} << (2 * n);
  return SparseOperator(detail::build_by_rows(
      dim, [&](std::int64_t r, detail::RowEntries& out) { rows.append_row(r, out); }));
}

SparseOperator dissipator_superop(const BathSpec& spec, int n) {
  spec.validate();
  if (spec.m > n) throw std::invalid_argument("bath.m: exceeds chain length");
  const auto sites = boundary_sites(spec.side, spec.m, n);
  return embed_superop(reset_superop(spec.target, spec.gamma), sites, n);
}

DenseVector vectorize(const DenseMatrix& rho) {
  return Eigen::Map<const DenseVector>(rho.data(), rho.size());
}

DenseMatrix unvectorize(const DenseVector& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size()) throw std::invalid_argument("unvectorize: length is not a square");
  return Eigen::Map<const DenseMatrix>(v.data(), d, d);
}

DenseMatrix choi_matrix(const DenseMatrix& superop) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(superop.rows()))));
  if (d * d != superop.rows() || superop.rows() != superop.cols()) {
    throw std::invalid_argument("choi_matrix: superoperator must be square on a d^2 space");
  }
  DenseMatrix choi(d * d, d * d);
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index l = 0; l < d; ++l)
        for (Eigen::Index j = 0; j < d; ++j) choi(k * d + i, l * d + j) = superop(i + d * j, k + d * l);
  return choi;
}

}  // namespace oqtherm
