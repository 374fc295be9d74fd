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

// Bit bookkeeping for sites inside an n-spin basis index (site 0 = MSB).

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace oqtherm::detail {

inline std::int64_t bit_of(int site, int n) { return std::int64_t{1} << (n - 1 - site); }

// Validates a site list and returns the mask of its bits in the n-spin index.
inline std::int64_t site_mask(std::span<const int> sites, int n) {
  std::int64_t mask = 0;
  for (int s : sites) {
    if (s < 0 || s >= n) {
      throw std::out_of_range("site " + std::to_string(s) + " outside chain of length " + std::to_string(n));
    }
    if (mask & bit_of(s, n)) throw std::invalid_argument("duplicate site " + std::to_string(s));
    mask |= bit_of(s, n);
  }
  return mask;
}

// deposit[li] scatters the local index li onto the global bit positions of `sites`.
inline std::vector<std::int64_t> deposit_table(std::span<const int> sites, int n) {
  const int k = static_cast<int>(sites.size());
  std::vector<std::int64_t> table(std::size_t{1} << k, 0);
  for (std::size_t li = 0; li < table.size(); ++li) {
    std::int64_t g = 0;
    for (int q = 0; q < k; ++q) {
      if ((li >> (k - 1 - q)) & 1U) g |= bit_of(sites[q], n);
    }
    table[li] = g;
  }
  return table;
}

inline std::int64_t extract(std::int64_t index, std::span<const int> sites, int n) {
  const int k = static_cast<int>(sites.size());
  std::int64_t li = 0;
  for (int q = 0; q < k; ++q) {
    if (index & bit_of(sites[q], n)) li |= std::int64_t{1} << (k - 1 - q);
  }
  return li;
}

}  // namespace oqtherm::detail
