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

// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include "colludet/kernels.hpp"
#include "colludet/random.hpp"

using namespace colludet;

namespace {

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (double& v : m.flat()) v = rng.uniform(-1.0, 1.0);
  return m;
}

Csr random_csr(Rng& rng, std::size_t rows, std::size_t cols, std::size_t per_row) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < per_row; ++k)
      pairs.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(rng.below(cols)));
  return Csr::from_pairs(rows, cols, std::move(pairs));
}

template <auto Kernel>
void bm_spmm(benchmark::State& state) {
  Rng rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const Csr adj = random_csr(rng, n, n, 20);
  std::vector<double> values(adj.indices.size());
  for (double& v : values) v = rng.uniform();
  const Matrix x = random_matrix(rng, n, 32);
  Matrix out;
  for (auto _ : state) {
    Kernel(adj, values, x, out);
    benchmark::DoNotOptimize(out.flat().data());
  }
}

template <auto Kernel>
void bm_matmul(benchmark::State& state) {
  Rng rng(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(rng, n, 64);
  const Matrix b = random_matrix(rng, 64, 128);
  Matrix out;
  for (auto _ : state) {
    Kernel(a, b, out);
    benchmark::DoNotOptimize(out.flat().data());
  }
}

template <auto Kernel>
void bm_two_hop(benchmark::State& state) {
  Rng rng(3);
  const auto n = static_cast<std::size_t>(state.range(0));
  const Csr follows = random_csr(rng, n, n, 15);
  const Csr followed_by = follows.transposed();
  std::vector<std::uint32_t> sources;
  std::vector<std::int64_t> endpoint_of(n, -1);
  for (std::size_t u = 0; u < n; u += 2) {
    endpoint_of[u] = static_cast<std::int64_t>(sources.size());
    sources.push_back(static_cast<std::uint32_t>(u));
  }
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(follows, followed_by, sources, endpoint_of));
}

template <auto Kernel>
void bm_min_overlap(benchmark::State& state) {
  Rng rng(4);
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t topics = 20;
  std::vector<kernels::SparseHistogram> hist(n);
  for (auto& row : hist)
    for (std::uint32_t k = 0; k < topics; ++k)
      if (rng.bernoulli(0.2)) row.emplace_back(k, static_cast<std::uint32_t>(1 + rng.below(10)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(hist, topics));
}

}  // namespace

BENCHMARK(bm_spmm<kernels::serial::spmm>)->Arg(1000)->Arg(10000);
BENCHMARK(bm_spmm<kernels::parallel::spmm>)->Arg(1000)->Arg(10000);
BENCHMARK(bm_matmul<kernels::serial::matmul>)->Arg(1000)->Arg(10000);
BENCHMARK(bm_matmul<kernels::parallel::matmul>)->Arg(1000)->Arg(10000);
BENCHMARK(bm_two_hop<kernels::serial::two_hop_counts>)->Arg(1000)->Arg(5000);
BENCHMARK(bm_two_hop<kernels::parallel::two_hop_counts>)->Arg(1000)->Arg(5000);
BENCHMARK(bm_min_overlap<kernels::serial::min_overlap>)->Arg(600)->Arg(2000);
BENCHMARK(bm_min_overlap<kernels::parallel::min_overlap>)->Arg(600)->Arg(2000);

BENCHMARK_MAIN();
