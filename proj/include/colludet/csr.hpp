// Copyright 2026 The Colludet Authors.
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

#ifndef COLLUDET_CSR_HPP_
#define COLLUDET_CSR_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace colludet {

// Compressed sparse rows. Column indices within a row are ascending and
// unique.
struct Csr {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::size_t> offsets{0};
  std::vector<std::uint32_t> indices;

  std::span<const std::uint32_t> neighbors(std::size_t row) const {
    return {indices.data() + offsets[row], offsets[row + 1] - offsets[row]};
  }
  std::size_t degree(std::size_t row) const {
    return offsets[row + 1] - offsets[row];
  }
  std::size_t nnz() const { return indices.size(); }

  // Sorts and deduplicates `pairs` (row, col) before packing them.
  static Csr from_pairs(std::size_t n_rows, std::size_t n_cols,
                        std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs);
  Csr transposed() const;
};

}  // namespace colludet

#endif  // COLLUDET_CSR_HPP_
