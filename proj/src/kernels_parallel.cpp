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

#include <algorithm>
#include <cstddef>

#include "colludet/kernels.hpp"

namespace colludet::kernels::parallel {

namespace {

using Index = std::ptrdiff_t;

std::size_t endpoint_span(std::span<const std::int64_t> endpoint_of) {
  std::int64_t hi = -1;
  for (auto e : endpoint_of) hi = std::max(hi, e);
  return static_cast<std::size_t>(hi + 1);
}

}  // namespace

void spmm(const Csr& adj, std::span<const double> values, const Matrix& x,
          Matrix& out) {
  require_shape(x, adj.n_cols, x.cols(), "spmm input");
  out = Matrix(adj.n_rows, x.cols());
  const Index n = static_cast<Index>(adj.n_rows);
  const std::size_t d = x.cols();
#pragma omp parallel for schedule(dynamic, 64)
  for (Index i = 0; i < n; ++i) {
    double* dst = out.row(i).data();
    for (std::size_t e = adj.offsets[i]; e < adj.offsets[i + 1]; ++e) {
      const double v = values[e];
      const double* src = x.row(adj.indices[e]).data();
      for (std::size_t c = 0; c < d; ++c) dst[c] += v * src[c];
    }
  }
}

void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.cols() != b.rows()) throw ShapeError("matmul: inner dimension mismatch");
  out = Matrix(a.rows(), b.cols());
  const Index n = static_cast<Index>(a.rows());
  const std::size_t inner = a.cols();
  const std::size_t m = b.cols();
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    double* dst = out.row(i).data();
    const double* ai = a.row(i).data();
    for (std::size_t k = 0; k < inner; ++k) {
      const double v = ai[k];
      const double* bk = b.row(k).data();
      for (std::size_t j = 0; j < m; ++j) dst[j] += v * bk[j];
    }
  }
}

void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.rows() != b.rows()) throw ShapeError("matmul_at_b: row mismatch");
  out = Matrix(a.cols(), b.cols());
  const Index kk = static_cast<Index>(a.cols());
  const std::size_t n = a.rows();
  const std::size_t m = b.cols();
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < kk; ++k) {
    double* dst = out.row(k).data();
    for (std::size_t i = 0; i < n; ++i) {
      const double v = a(i, k);
      if (v == 0.0) continue;
      const double* bi = b.row(i).data();
      for (std::size_t j = 0; j < m; ++j) dst[j] += v * bi[j];
    }
  }
}

void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.cols() != b.cols()) throw ShapeError("matmul_a_bt: column mismatch");
  out = Matrix(a.rows(), b.rows());
  const Index n = static_cast<Index>(a.rows());
  const std::size_t m = b.rows();
  const std::size_t inner = a.cols();
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    const double* ai = a.row(i).data();
    for (std::size_t j = 0; j < m; ++j) {
      const double* bj = b.row(j).data();
      double s = 0.0;
      for (std::size_t k = 0; k < inner; ++k) s += ai[k] * bj[k];
      out(i, j) = s;
    }
  }
}

void cosine_assign(const Matrix& rows, const Matrix& centroids,
                   std::vector<std::uint32_t>& assign, std::vector<double>& best) {
  if (rows.cols() != centroids.cols())
    throw ShapeError("cosine_assign: dimension mismatch");
  assign.assign(rows.rows(), 0);
  best.assign(rows.rows(), 0.0);
  const Index n = static_cast<Index>(rows.rows());
  const std::size_t k_count = centroids.rows();
  const std::size_t d = rows.cols();
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    const double* r = rows.row(i).data();
    double top = 0.0;
    std::uint32_t arg = 0;
    for (std::size_t k = 0; k < k_count; ++k) {
      const double* c = centroids.row(k).data();
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += r[j] * c[j];
      if (k == 0 || s > top) {
        top = s;
        arg = static_cast<std::uint32_t>(k);
      }
    }
    assign[i] = arg;
    best[i] = top;
  }
}

std::vector<CountRow> two_hop_counts(const Csr& first, const Csr& second,
                                     std::span<const std::uint32_t> sources,
                                     std::span<const std::int64_t> endpoint_of) {
  std::vector<CountRow> out(sources.size());
  const std::size_t width = endpoint_span(endpoint_of);
  const Index n = static_cast<Index>(sources.size());
#pragma omp parallel
  {
    std::vector<std::uint32_t> counts(width, 0);
    std::vector<std::uint32_t> touched;
#pragma omp for schedule(dynamic, 16)
    for (Index s = 0; s < n; ++s) {
      const auto src = sources[s];
      const auto self = endpoint_of[src];
      for (auto x : first.neighbors(src)) {
        for (auto y : second.neighbors(x)) {
          const auto ep = endpoint_of[y];
          if (ep < 0 || ep == self) continue;
          if (counts[ep]++ == 0) touched.push_back(static_cast<std::uint32_t>(ep));
        }
      }
      std::sort(touched.begin(), touched.end());
      auto& row = out[s];
      row.reserve(touched.size());
      for (auto ep : touched) {
        row.emplace_back(ep, counts[ep]);
        counts[ep] = 0;
      }
      touched.clear();
    }
  }
  return out;
}

std::vector<CountRow> min_overlap(std::span<const SparseHistogram> hist,
                                  std::size_t n_topics) {
  const std::size_t n = hist.size();
  // topic -> (user, count), ascending user
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> by_topic(n_topics);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [k, c] : hist[i])
      by_topic[k].emplace_back(static_cast<std::uint32_t>(i), c);

  std::vector<CountRow> out(n);
  const Index n_signed = static_cast<Index>(n);
#pragma omp parallel
  {
    std::vector<std::uint32_t> acc(n, 0);
    std::vector<std::uint32_t> touched;
#pragma omp for schedule(dynamic, 16)
    for (Index i = 0; i < n_signed; ++i) {
      for (const auto& [k, ci] : hist[i]) {
        for (const auto& [j, cj] : by_topic[k]) {
          if (j == static_cast<std::uint32_t>(i)) continue;
          if (acc[j] == 0) touched.push_back(j);
          acc[j] += std::min(ci, cj);
        }
      }
      std::sort(touched.begin(), touched.end());
      auto& row = out[i];
      row.reserve(touched.size());
      for (auto j : touched) {
        row.emplace_back(j, acc[j]);
        acc[j] = 0;
      }
      touched.clear();
    }
  }
  return out;
}

}  // namespace colludet::kernels::parallel
