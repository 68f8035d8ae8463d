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

#include <map>

#include "colludet/kernels.hpp"

namespace colludet::kernels::serial {

void spmm(const Csr& adj, std::span<const double> values, const Matrix& x,
          Matrix& out) {
  require_shape(x, adj.n_cols, x.cols(), "spmm input");
  out = Matrix(adj.n_rows, x.cols());
  for (std::size_t i = 0; i < adj.n_rows; ++i) {
    for (std::size_t e = adj.offsets[i]; e < adj.offsets[i + 1]; ++e) {
      const std::size_t j = adj.indices[e];
      for (std::size_t c = 0; c < x.cols(); ++c) out(i, c) += values[e] * x(j, c);
    }
  }
}

void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.cols() != b.rows()) throw ShapeError("matmul: inner dimension mismatch");
  out = Matrix(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
}

void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.rows() != b.rows()) throw ShapeError("matmul_at_b: row mismatch");
  out = Matrix(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      for (std::size_t j = 0; j < b.cols(); ++j) out(k, j) += a(i, k) * b(i, j);
}

void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.cols() != b.cols()) throw ShapeError("matmul_a_bt: column mismatch");
  out = Matrix(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(j, k);
      out(i, j) = s;
    }
}

void cosine_assign(const Matrix& rows, const Matrix& centroids,
                   std::vector<std::uint32_t>& assign, std::vector<double>& best) {
  if (rows.cols() != centroids.cols())
    throw ShapeError("cosine_assign: dimension mismatch");
  assign.assign(rows.rows(), 0);
  best.assign(rows.rows(), 0.0);
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    for (std::size_t k = 0; k < centroids.rows(); ++k) {
      double s = 0.0;
      for (std::size_t c = 0; c < rows.cols(); ++c) s += rows(i, c) * centroids(k, c);
      if (k == 0 || s > best[i]) {
        best[i] = s;
        assign[i] = static_cast<std::uint32_t>(k);
      }
    }
  }
}

std::vector<CountRow> two_hop_counts(const Csr& first, const Csr& second,
                                     std::span<const std::uint32_t> sources,
                                     std::span<const std::int64_t> endpoint_of) {
  std::vector<CountRow> out(sources.size());
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const auto src = sources[s];
    std::map<std::uint32_t, std::uint32_t> counts;
    for (auto x : first.neighbors(src)) {
      for (auto y : second.neighbors(x)) {
        const auto ep = endpoint_of[y];
        if (ep < 0 || ep == endpoint_of[src]) continue;
        ++counts[static_cast<std::uint32_t>(ep)];
      }
    }
    out[s].assign(counts.begin(), counts.end());
  }
  return out;
}

std::vector<CountRow> min_overlap(std::span<const SparseHistogram> hist,
                                  std::size_t n_topics) {
  const std::size_t n = hist.size();
  std::vector<std::vector<std::uint32_t>> dense(n, std::vector<std::uint32_t>(n_topics, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [k, c] : hist[i]) dense[i][k] = c;
  std::vector<CountRow> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      std::uint32_t w = 0;
      for (std::size_t k = 0; k < n_topics; ++k) w += std::min(dense[i][k], dense[j][k]);
      if (w > 0) out[i].emplace_back(static_cast<std::uint32_t>(j), w);
    }
  }
  return out;
}

}  // namespace colludet::kernels::serial
