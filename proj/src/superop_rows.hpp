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

// Row-wise assembly of superoperators on the column-stacked 4^n space.
// Global vec index of rho(i, j) is i + 2^n j.

#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "oqtherm/spin_algebra.hpp"
#include "site_bits.hpp"

namespace oqtherm::detail {

using RowEntries = std::vector<std::pair<std::int64_t, cplx>>;

// A dense superoperator on a few sites, with per-row nonzero lists so that
// its contribution to one global row can be emitted without scanning.
class LocalSuperopRows {
 public:
  LocalSuperopRows(const DenseMatrix& local, std::span<const int> sites, int n)
      : n_(n), dn_(std::int64_t{1} << n), sites_(sites.begin(), sites.end()) {
    mask_ = site_mask(sites, n);
    deposit_ = deposit_table(sites, n);
    dm_ = static_cast<std::int64_t>(deposit_.size());
    if (local.rows() != dm_ * dm_ || local.cols() != dm_ * dm_) {
      throw std::invalid_argument("local superoperator dimension does not match its sites");
    }
    rows_.resize(static_cast<std::size_t>(dm_ * dm_));
    for (Eigen::Index r = 0; r < local.rows(); ++r) {
      for (Eigen::Index c = 0; c < local.cols(); ++c) {
        if (std::abs(local(r, c)) >= kPruneThreshold) rows_[r].emplace_back(c, local(r, c));
      }
    }
  }

  void append_row(std::int64_t row, RowEntries& out) const {
    const std::int64_t i = row % dn_;
    const std::int64_t j = row / dn_;
    const std::int64_t local_row = extract(i, sites_, n_) + dm_ * extract(j, sites_, n_);
    const std::int64_t i_rest = i & ~mask_;
    const std::int64_t j_rest = j & ~mask_;
    for (const auto& [lc, v] : rows_[local_row]) {
      const std::int64_t col = (i_rest | deposit_[lc % dm_]) + dn_ * (j_rest | deposit_[lc / dm_]);
      out.emplace_back(col, v);
    }
  }

 private:
  int n_;
  std::int64_t dn_;
  std::int64_t dm_ = 0;
  std::vector<int> sites_;
  std::int64_t mask_ = 0;
  std::vector<std::int64_t> deposit_;
  std::vector<std::vector<std::pair<std::int64_t, cplx>>> rows_;
};

// Builds a row-major sparse matrix from a row generator; duplicate columns
// are summed and small entries pruned.
template <typename RowFn>
SparseMatrix build_by_rows(std::int64_t dim, RowFn&& fill_row) {
  SparseMatrix m(dim, dim);
  std::vector<int> counts(static_cast<std::size_t>(dim), 0);
  std::vector<std::pair<int, cplx>> flat;
  RowEntries entries;
  for (std::int64_t r = 0; r < dim; ++r) {
    entries.clear();
    fill_row(r, entries);
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t k = 0;
    while (k < entries.size()) {
      const std::int64_t col = entries[k].first;
      cplx acc{0.0, 0.0};
      for (; k < entries.size() && entries[k].first == col; ++k) acc += entries[k].second;
      if (std::abs(acc) >= kPruneThreshold) {
        flat.emplace_back(static_cast<int>(col), acc);
        ++counts[r];
      }
    }
  }
  m.resizeNonZeros(static_cast<Eigen::Index>(flat.size()));
  int* outer = m.outerIndexPtr();
  outer[0] = 0;
  for (std::int64_t r = 0; r < dim; ++r) outer[r + 1] = outer[r] + counts[r];
  for (std::size_t k = 0; k < flat.size(); ++k) {
    m.innerIndexPtr()[k] = flat[k].first;
    m.valuePtr()[k] = flat[k].second;
  }
  return m;
}

}  // namespace oqtherm::detail
