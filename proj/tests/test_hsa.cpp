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

#include "colludet/error.hpp"
#include "colludet/hsa.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace colludet;

namespace {

SubgraphOperator op_of(std::size_t n, std::vector<WeightedEdge> edges) {
  return SubgraphOperator::from(Subgraph::from_edges(Relationship::kDirect, n, edges));
}

}  // namespace

TEST_CASE("single unit edge") {
  const auto op = op_of(2, {{0, 1, 1.0}});
  REQUIRE(op.coef.size() == 2);
  CHECK(op.coef[0] == 1.0);
  Matrix x(2, 2);
  x(1, 0) = 2.0;
  x(1, 1) = -1.0;
  ConvParams p{Matrix(2, 1), Matrix(1, 1)};
  p.weight(0, 0) = 0.5;
  p.weight(1, 0) = 1.0;
  p.bias(0, 0) = 0.25;
  const Matrix h = subgraph_conv(op, x, p);
  CHECK(h(0, 0) == doctest::Approx(0.25 + 2.0 * 0.5 - 1.0));
  CHECK(h(1, 0) == doctest::Approx(0.25));
}

TEST_CASE("isolated node gets the activated bias") {
  const auto op = op_of(3, {{0, 1, 2.0}});
  Rng rng(1);
  const Matrix x = testing::random_matrix(rng, 3, 4);
  ConvParams p{testing::random_matrix(rng, 4, 3), Matrix(1, 3)};
  p.bias(0, 0) = 0.7;
  p.bias(0, 1) = -0.2;
  p.bias(0, 2) = 0.0;
  const Matrix h = subgraph_conv(op, x, p);
  CHECK(h(2, 0) == 0.7);
  CHECK(h(2, 1) == 0.0);
  CHECK(h(2, 2) == 0.0);
}

TEST_CASE("sparse convolution equals the dense loop") {
  Rng rng(2);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 1 + rng.below(50);
    const Subgraph s = testing::random_subgraph(rng, Relationship::kCommonTopic, n, rng.uniform(0, 0.4), false);
    const Matrix x = testing::random_matrix(rng, n, 1 + rng.below(10));
    ConvParams p{testing::random_matrix(rng, x.cols(), 1 + rng.below(16)), Matrix()};
    p.bias = testing::random_matrix(rng, 1, p.weight.cols());
    const Matrix got = subgraph_conv(SubgraphOperator::from(s), x, p);
    const Matrix want = testing::dense_conv(s, x, p);
    for (std::size_t k = 0; k < got.size(); ++k) CHECK(std::abs(got.flat()[k] - want.flat()[k]) <= 1e-12);
  }
}

TEST_CASE("convolution rejects mismatched shapes") {
  const auto op = op_of(3, {{0, 1, 1.0}});
  ConvParams p{Matrix(2, 2), Matrix(1, 2)};
  CHECK_THROWS_AS(subgraph_conv(op, Matrix(4, 2), p), ShapeError);
  CHECK_THROWS_AS(subgraph_conv(op, Matrix(3, 3), p), ShapeError);
}

TEST_CASE("identical subgraph embeddings share attention equally") {
  Rng rng(3);
  const Matrix h = testing::random_matrix(rng, 6, 4);
  const std::vector<Matrix> hs(4, h);
  const AttnParams p{testing::random_matrix(rng, 4, 5), testing::random_matrix(rng, 1, 5),
                     testing::random_matrix(rng, 5, 1), testing::random_matrix(rng, 1, 1)};
  const auto r = subgraph_attention(hs, p);
  for (double b : r.beta) CHECK(b == doctest::Approx(0.25).epsilon(1e-12));
  for (std::size_t k = 0; k < h.size(); ++k) CHECK(r.z.flat()[k] == doctest::Approx(h.flat()[k]));
}

TEST_CASE("attention is shift invariant and normalised") {
  Rng rng(4);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t m = 1 + rng.below(4);
    std::vector<Matrix> hs;
    for (std::size_t i = 0; i < m; ++i) hs.push_back(testing::random_matrix(rng, 5, 3, 2.0));
    AttnParams p{testing::random_matrix(rng, 3, 4), testing::random_matrix(rng, 1, 4),
                 testing::random_matrix(rng, 4, 1, 3.0), testing::random_matrix(rng, 1, 1)};
    const auto a = subgraph_attention(hs, p);
    double sum = 0;
    for (double b : a.beta) sum += b;
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    p.b2(0, 0) += rng.uniform(-50, 50);
    const auto b = subgraph_attention(hs, p);
    for (std::size_t i = 0; i < m; ++i) CHECK(std::abs(a.beta[i] - b.beta[i]) <= 1e-12);
    if (m == 1) CHECK(a.beta[0] == 1.0);
  }
}

TEST_CASE("three-node attention by hand") {
  // hidden 1, attention width 1: w^m = mean_i tanh(h_i * a + c) * v + d.
  const std::vector<Matrix> hs = {Matrix(3, 1, 0.0), Matrix(3, 1, 0.0)};
  std::vector<Matrix> h = hs;
  h[0](0, 0) = 1.0;
  h[0](1, 0) = 2.0;
  h[0](2, 0) = 0.0;
  h[1](0, 0) = 0.5;
  h[1](1, 0) = 0.5;
  h[1](2, 0) = 3.0;
  AttnParams p{Matrix(1, 1, 0.8), Matrix(1, 1, -0.1), Matrix(1, 1, 2.0), Matrix(1, 1, 0.3)};
  const double w0 = (std::tanh(0.7) + std::tanh(1.5) + std::tanh(-0.1)) / 3.0 * 2.0 + 0.3;
  const double w1 = (std::tanh(0.3) + std::tanh(0.3) + std::tanh(2.3)) / 3.0 * 2.0 + 0.3;
  const double b0 = std::exp(w0) / (std::exp(w0) + std::exp(w1));
  const auto r = subgraph_attention(h, p);
  CHECK(r.importance[0] == doctest::Approx(w0).epsilon(1e-14));
  CHECK(r.importance[1] == doctest::Approx(w1).epsilon(1e-14));
  CHECK(r.beta[0] == doctest::Approx(b0).epsilon(1e-14));
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(r.z(i, 0) == doctest::Approx(b0 * h[0](i, 0) + (1 - b0) * h[1](i, 0)).epsilon(1e-14));
}

TEST_CASE("one head is one convolution and attention pass") {
  Rng rng(5);
  const auto ops = testing::random_operators(rng, 12, 0.3);
  const Matrix x = testing::random_matrix(rng, 12, 18);
  const HsaParams params = testing::random_params(rng, {18, 6, 5, 1, 4});
  const auto trace = hsa_forward(ops, x, params);
  std::vector<Matrix> hs;
  for (std::size_t m = 0; m < 4; ++m) hs.push_back(subgraph_conv(ops[m], x, params.heads[0].conv[m]));
  const auto a = subgraph_attention(hs, params.heads[0].attn);
  CHECK(trace.output() == a.z);
  CHECK(trace.heads.size() == 1);
}

TEST_CASE("heads are stacked") {
  Rng rng(6);
  const auto ops = testing::random_operators(rng, 10, 0.3);
  const Matrix x = testing::random_matrix(rng, 10, 18);
  const HsaParams params = testing::random_params(rng, {18, 6, 5, 3, 4});
  const auto trace = hsa_forward(ops, x, params);
  REQUIRE(trace.heads.size() == 3);
  CHECK(trace.heads[1].input == trace.heads[0].output);
  CHECK(trace.heads[2].input == trace.heads[1].output);
  CHECK(trace.output().cols() == 6);
}

TEST_CASE("zero weights give identical rows") {
  Rng rng(7);
  const auto ops = testing::random_operators(rng, 9, 0.3);
  const Matrix x = testing::random_matrix(rng, 9, 18);
  HsaParams params = HsaParams::zeros({18, 4, 3, 2, 4});
  for (auto& head : params.heads)
    for (auto& c : head.conv) c.bias = testing::random_matrix(rng, 1, 4);
  const auto trace = hsa_forward(ops, x, params);
  const Matrix& z = trace.output();
  for (std::size_t i = 1; i < z.rows(); ++i)
    for (std::size_t c = 0; c < z.cols(); ++c) CHECK(z(i, c) == z(0, c));
}

TEST_CASE("backward of a zero upstream gradient is zero") {
  Rng rng(8);
  const auto ops = testing::random_operators(rng, 10, 0.3);
  const Matrix x = testing::random_matrix(rng, 10, 18);
  const HsaParams params = testing::random_params(rng, {18, 5, 4, 2, 4});
  const auto trace = hsa_forward(ops, x, params);
  Matrix dx;
  const HsaParams g = hsa_backward(ops, trace, Matrix(10, 5), params, &dx);
  for (const auto& [name, t] : g.tensors())
    for (double v : t->flat()) CHECK(v == 0.0);
  for (double v : dx.flat()) CHECK(v == 0.0);
}

TEST_CASE("identical subgraphs and blocks get identical gradients") {
  Rng rng(9);
  const auto one = SubgraphOperator::from(testing::random_subgraph(rng, Relationship::kDirect, 10, 0.3));
  const std::vector<SubgraphOperator> ops(4, one);
  const Matrix x = testing::random_matrix(rng, 10, 18);
  HsaParams params = testing::random_params(rng, {18, 5, 4, 2, 4});
  for (auto& head : params.heads)
    for (std::size_t m = 1; m < 4; ++m) head.conv[m] = head.conv[0];
  const auto trace = hsa_forward(ops, x, params);
  const Matrix dz = testing::random_matrix(rng, 10, 5);
  const HsaParams g = hsa_backward(ops, trace, dz, params);
  for (const auto& head : g.heads)
    for (std::size_t m = 1; m < 4; ++m) {
      for (std::size_t k = 0; k < head.conv[0].weight.size(); ++k)
        CHECK(head.conv[m].weight.flat()[k] == doctest::Approx(head.conv[0].weight.flat()[k]).epsilon(1e-12));
      for (std::size_t k = 0; k < head.conv[0].bias.size(); ++k)
        CHECK(head.conv[m].bias.flat()[k] == doctest::Approx(head.conv[0].bias.flat()[k]).epsilon(1e-12));
    }
}

TEST_CASE("gradients match central differences") {
  for (std::uint64_t seed : {1, 2}) {
    const auto r = testing::gradient_check(seed);
    INFO("worst " << r.worst << " rel " << r.max_rel_error);
    CHECK(r.checked > 1000);
    CHECK(r.max_rel_error < 1e-4);
  }
}

TEST_CASE("input gradient matches central differences") {
  Rng rng(12);
  const auto ops = testing::random_operators(rng, 8, 0.4);
  Matrix x = testing::random_matrix(rng, 8, 18);
  const HsaParams params = testing::random_params(rng, {18, 4, 3, 2, 4});
  const Matrix dz = testing::random_matrix(rng, 8, 4);
  const auto objective = [&](const Matrix& in) {
    const auto trace = hsa_forward(ops, in, params);
    const Matrix& z = trace.output();
    double s = 0;
    for (std::size_t k = 0; k < z.size(); ++k) s += z.flat()[k] * dz.flat()[k];
    return s;
  };
  Matrix dx;
  hsa_backward(ops, hsa_forward(ops, x, params), dz, params, &dx);
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double saved = x.flat()[k];
    x.flat()[k] = saved + 1e-6;
    const double up = objective(x);
    x.flat()[k] = saved - 1e-6;
    const double down = objective(x);
    x.flat()[k] = saved;
    CHECK(dx.flat()[k] == doctest::Approx((up - down) / 2e-6).epsilon(1e-5).scale(1e-3));
  }
}

TEST_CASE("parameter names and validation") {
  HsaParams p = HsaParams::init({18, 32, 128, 2, 4}, 7);
  const auto t = p.tensors();
  CHECK(t.size() == 2 * (4 * 2 + 4));
  CHECK(t.front().first == "head0.conv1.weight");
  CHECK(t.back().first == "head1.attn.b2");
  CHECK(p.heads[1].conv[0].weight.rows() == 32);
  CHECK_NOTHROW(p.validate());
  for (double v : p.heads[0].conv[0].bias.flat()) CHECK(v == 0.0);
  p.heads[1].attn.w1 = Matrix(3, 3);
  CHECK_THROWS_AS(p.validate(), ShapeError);
  CHECK(HsaParams::init({18, 32, 128, 2, 4}, 7).heads[0].conv[0].weight ==
        HsaParams::init({18, 32, 128, 2, 4}, 7).heads[0].conv[0].weight);
}
