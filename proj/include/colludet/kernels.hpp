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

#ifndef COLLUDET_KERNELS_HPP_
#define COLLUDET_KERNELS_HPP_

// Data-parallel inner loops. Each kernel has a plain serial reference in
// `kernels::serial` and an OpenMP version in `kernels::parallel`; both
// produce bit-identical results (every output row is reduced in a fixed
// order by exactly one thread). The library calls the parallel versions;
// tests and the benchmark compare the two.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "colludet/csr.hpp"
#include "colludet/tensor.hpp"

namespace colludet::kernels {

// Per-source sparse row of (endpoint, count) pairs, ascending endpoint.
using CountRow = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

// Row i of a topic histogram, as (topic, count) pairs with count > 0.
using SparseHistogram = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

namespace serial {

// out = A * X where A is `adj` with per-entry `values`.
void spmm(const Csr& adj, std::span<const double> values, const Matrix& x,
          Matrix& out);
// out = a * b
void matmul(const Matrix& a, const Matrix& b, Matrix& out);
// out = a^T * b
void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& out);
// out = a * b^T
void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& out);

// For each row: index of the centroid with the largest dot product (lowest
// index on ties) and that dot product.
void cosine_assign(const Matrix& rows, const Matrix& centroids,
                   std::vector<std::uint32_t>& assign, std::vector<double>& best);

// For each source s in `sources` counts the endpoints y reachable as
// s -first-> x -second-> y, with endpoint_of[y] >= 0 and endpoint_of[y] !=
// endpoint_of[s]. Output rows hold (endpoint_of[y], #x).
std::vector<CountRow> two_hop_counts(const Csr& first, const Csr& second,
                                     std::span<const std::uint32_t> sources,
                                     std::span<const std::int64_t> endpoint_of);

// Row i holds (j, sum_k min(h_i[k], h_j[k])) for every j != i with a
// positive sum.
std::vector<CountRow> min_overlap(std::span<const SparseHistogram> hist,
                                  std::size_t n_topics);

}  // namespace serial

namespace parallel {

void spmm(const Csr& adj, std::span<const double> values, const Matrix& x,
          Matrix& out);
void matmul(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& out);
void cosine_assign(const Matrix& rows, const Matrix& centroids,
                   std::vector<std::uint32_t>& assign, std::vector<double>& best);
std::vector<CountRow> two_hop_counts(const Csr& first, const Csr& second,
                                     std::span<const std::uint32_t> sources,
                                     std::span<const std::int64_t> endpoint_of);
std::vector<CountRow> min_overlap(std::span<const SparseHistogram> hist,
                                  std::size_t n_topics);

}  // namespace parallel

}  // namespace colludet::kernels

#endif  // COLLUDET_KERNELS_HPP_
