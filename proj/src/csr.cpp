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

#include "colludet/csr.hpp"

#include <algorithm>

namespace colludet {

Csr Csr::from_pairs(std::size_t n_rows, std::size_t n_cols,
                    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs) {
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  Csr out;
  out.n_rows = n_rows;
  out.n_cols = n_cols;
  out.offsets.assign(n_rows + 1, 0);
  out.indices.reserve(pairs.size());
  for (const auto& [r, c] : pairs) {
    ++out.offsets[r + 1];
    out.indices.push_back(c);
  }
  for (std::size_t i = 0; i < n_rows; ++i) out.offsets[i + 1] += out.offsets[i];
  return out;
}

Csr Csr::transposed() const {
  Csr out;
  out.n_rows = n_cols;
  out.n_cols = n_rows;
  out.offsets.assign(n_cols + 1, 0);
  for (auto c : indices) ++out.offsets[c + 1];
  for (std::size_t i = 0; i < n_cols; ++i) out.offsets[i + 1] += out.offsets[i];
  out.indices.resize(indices.size());
  std::vector<std::size_t> cursor(out.offsets.begin(), out.offsets.end() - 1);
  // Rows are visited in ascending order, so each transposed row stays sorted.
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (auto c : neighbors(r)) out.indices[cursor[c]++] = static_cast<std::uint32_t>(r);
  }
  return out;
}

}  // namespace colludet
