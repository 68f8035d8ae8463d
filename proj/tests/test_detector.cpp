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

#include "colludet/detector.hpp"
#include "colludet/error.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace colludet;

namespace {

Hypersphere sphere_at(std::vector<double> c, double r2, double mu = 0.2) {
  Hypersphere s;
  s.center = std::move(c);
  s.radius2 = r2;
  s.mu = mu;
  return s;
}

Matrix rows_of(std::vector<std::vector<double>> v) {
  Matrix m(v.size(), v.front().size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v[i].size(); ++j) m(i, j) = v[i][j];
  return m;
}

// Collusive block: dense Δ subgraphs among themselves and shifted features.
struct Separable {
  std::vector<SubgraphOperator> ops;
  Matrix x;
  std::vector<std::size_t> train_rows, organic_rows;
};

Separable separable(std::uint64_t seed, std::size_t n_coll = 40, std::size_t n_org = 20) {
  Rng rng(seed);
  const std::size_t n = n_coll + n_org;
  Separable s;
  s.x = Matrix(n, 18);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < 18; ++f) s.x(i, f) = rng.normal() + (i < n_coll ? 0.0 : 1.5);
    (i < n_coll ? s.train_rows : s.organic_rows).push_back(i);
  }
  for (auto rel : kAllRelationships) {
    std::vector<WeightedEdge> edges;
    for (std::uint32_t i = 0; i < n; ++i)
      for (std::uint32_t j = i + 1; j < n; ++j) {
        const bool both = i < n_coll && j < n_coll;
        if (rng.bernoulli(both ? 0.3 : 0.03)) edges.push_back({i, j, 1.0 + static_cast<double>(rng.below(3))});
      }
    s.ops.push_back(SubgraphOperator::from(Subgraph::from_edges(rel, n, edges)));
  }
  return s;
}

}  // namespace

TEST_CASE("center of identical embeddings is that embedding") {
  const Matrix z = rows_of({{0.5, -2.0, 3.0}, {0.5, -2.0, 3.0}});
  CHECK(init_center(z) == std::vector<double>{0.5, -2.0, 3.0});
}

TEST_CASE("center components near zero are pushed out") {
  const Matrix z = rows_of({{1.0, -0.02, 0.3}, {-1.0, 0.0, -0.3}});
  CHECK(init_center(z) == std::vector<double>{0.1, -0.1, 0.1});
}

TEST_CASE("center equals column means on a 10-user fixture") {
  Rng rng(3);
  const Matrix z = testing::random_matrix(rng, 10, 6, 4.0);
  const auto c = init_center(z, 0.0);
  for (std::size_t j = 0; j < 6; ++j) {
    double m = 0;
    for (std::size_t i = 0; i < 10; ++i) m += z(i, j);
    CHECK(c[j] == doctest::Approx(m / 10).epsilon(1e-14));
  }
}

TEST_CASE("loss examples") {
  const Matrix inside = rows_of({{0.0, 0.5}, {0.3, 0.0}});
  CHECK(svdd_loss(inside, sphere_at({0.0, 0.0}, 1.0)).loss == 1.0);
  const Matrix far = rows_of({{2.0, 0.0}});
  CHECK(svdd_loss(far, sphere_at({0.0, 0.0}, 0.0)).loss == doctest::Approx(20.0));

  Rng rng(4);
  const Matrix z = testing::random_matrix(rng, 30, 3, 2.0);
  const auto sphere = sphere_at({0.0, 0.0, 0.0}, 0.5);
  const auto base = svdd_loss(z, sphere);
  // Scaling the vectors by sqrt(t) scales every distance^2 by t; with r = 0
  // the slack term scales by t.
  const double t = 2.5;
  Matrix scaled = z;
  for (double& v : scaled.flat()) v *= std::sqrt(t);
  const auto s0 = svdd_loss(z, sphere_at({0, 0, 0}, 0.0));
  const auto s1 = svdd_loss(scaled, sphere_at({0, 0, 0}, 0.0));
  CHECK(s1.loss == doctest::Approx(t * s0.loss));
  CHECK(base.dist2.size() == 30);
  CHECK_THROWS_AS(svdd_loss(z, Hypersphere{{0, 0, 0}, std::nullopt, 0.2}), ShapeError);
}

TEST_CASE("loss gradient is zero for inside points and at the boundary") {
  const Matrix z = rows_of({{1.0, 0.0}, {0.5, 0.0}, {3.0, 0.0}});
  Matrix dz;
  svdd_loss(z, sphere_at({0.0, 0.0}, 1.0, 0.5), &dz);
  CHECK(dz(0, 0) == 0.0);
  CHECK(dz(1, 0) == 0.0);
  // 1/(mu n) * 2 (z - c)
  CHECK(dz(2, 0) == doctest::Approx(2.0 * 3.0 / (0.5 * 3.0)));
}

TEST_CASE("radius quantile") {
  CHECK(update_radius(std::vector<double>(7, 4.0), 0.2) == 4.0);
  std::vector<double> d{7, 3, 10, 1, 5, 2, 8, 4, 9, 6};
  CHECK(update_radius(d, 0.2) == 8.0);
  CHECK(update_radius(d, 1.0) == 1.0);
  CHECK(update_radius(d, 0.999) == 1.0);
  CHECK_THROWS_AS(update_radius(d, 0.0), ShapeError);
  CHECK_THROWS_AS(update_radius(std::vector<double>{}, 0.2), ShapeError);
}

TEST_CASE("radius keeps at most ceil(mu n) + 1 points outside") {
  Rng rng(5);
  for (std::size_t n : {10, 100, 1000}) {
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> d(n);
      for (double& v : d) v = rep % 2 ? static_cast<double>(rng.below(5)) : rng.uniform(0, 10);
      const double r2 = update_radius(d, 0.2);
      const auto outside = std::count_if(d.begin(), d.end(), [&](double v) { return v > r2; });
      CHECK(static_cast<double>(outside) <= std::ceil(0.2 * static_cast<double>(n)) + 1);
      const auto inside = static_cast<double>(d.size()) - static_cast<double>(outside);
      CHECK(inside >= std::ceil(0.8 * static_cast<double>(n) - 1e-9));
    }
  }
}

TEST_CASE("quantile radius minimises the loss over r") {
  Rng rng(6);
  const Matrix z = testing::random_matrix(rng, 25, 2, 3.0);
  auto sphere = sphere_at({0.0, 0.0}, 0.0, 0.2);
  const auto d = svdd_loss(z, sphere).dist2;
  sphere.radius2 = update_radius(d, 0.2);
  const double best = svdd_loss(z, sphere).loss;
  for (double r2 = 0.0; r2 < 20.0; r2 += 0.05) {
    sphere.radius2 = r2;
    CHECK(svdd_loss(z, sphere).loss >= best - 1e-12);
  }
}

TEST_CASE("adam matches a hand-written step") {
  HsaParams p = HsaParams::zeros({1, 1, 1, 1, 1});
  p.heads[0].conv[0].weight(0, 0) = 1.0;
  HsaParams g = HsaParams::zeros({1, 1, 1, 1, 1});
  g.heads[0].conv[0].weight(0, 0) = 0.5;
  Adam adam(p, {0.1, 0.9, 0.999, 1e-8, 0.01});
  adam.step(p, g);
  // First step: m_hat = g, v_hat = g^2, update = g / (|g| + eps).
  const double expected = 1.0 - 0.1 * (0.5 / (0.5 + 1e-8) + 0.01 * 1.0);
  CHECK(p.heads[0].conv[0].weight(0, 0) == doctest::Approx(expected).epsilon(1e-15));
  adam.step(p, g);
  CHECK(adam.state().step == 2);
  const double m2 = 0.9 * 0.05 + 0.1 * 0.5;
  const double v2 = 0.999 * 0.00025 + 0.001 * 0.25;
  const double upd = (m2 / (1 - 0.81)) / (std::sqrt(v2 / (1 - 0.999 * 0.999)) + 1e-8);
  CHECK(p.heads[0].conv[0].weight(0, 0) == doctest::Approx(expected - 0.1 * (upd + 0.01 * expected)).epsilon(1e-14));
}

TEST_CASE("default hyperparameters") {
  const TrainConfig c;
  CHECK(c.mu == 0.2);
  CHECK(c.learning_rate == 0.6);
  CHECK(c.weight_decay == 0.0005);
  CHECK(c.hidden == 32);
  CHECK(c.attn_dim == 128);
  CHECK(c.heads == 2);
}

TEST_CASE("training is deterministic") {
  const auto s = separable(1);
  TrainConfig cfg;
  cfg.epochs = 8;
  cfg.hidden = 8;
  cfg.attn_dim = 8;
  cfg.learning_rate = 0.01;
  const auto a = train(s.ops, s.x, s.train_rows, cfg);
  const auto b = train(s.ops, s.x, s.train_rows, cfg);
  const auto ta = a.params.tensors();
  const auto tb = b.params.tensors();
  for (std::size_t k = 0; k < ta.size(); ++k) CHECK(*ta[k].second == *tb[k].second);
  CHECK(a.sphere.center == b.sphere.center);
  CHECK(*a.sphere.radius2 == *b.sphere.radius2);
  cfg.seed = 8;
  const auto c = train(s.ops, s.x, s.train_rows, cfg);
  CHECK_FALSE(c.params.heads[0].conv[0].weight == a.params.heads[0].conv[0].weight);
}

TEST_CASE("loss trends down on a separable fixture") {
  const auto s = separable(2);
  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.hidden = 16;
  cfg.attn_dim = 16;
  cfg.learning_rate = 0.006;
  const auto r = train(s.ops, s.x, s.train_rows, cfg, s.organic_rows);
  REQUIRE(r.log.size() == 60);
  const std::size_t warmup = 10;
  // Adam may wobble; no epoch may rise more than 5% over the previous one.
  for (std::size_t e = warmup + 1; e < r.log.size(); ++e) CHECK(r.log[e].loss <= 1.05 * r.log[e - 1].loss);
  CHECK(r.log.back().loss < r.log[warmup].loss);
  CHECK(r.log.back().val_loss.has_value());
  REQUIRE(r.log.back().beta.size() == 2);
  for (const auto& beta : r.log.back().beta) CHECK(beta.size() == 4);

  // Training users: at least a (1 - mu) share inside after the final update.
  const auto scores = score(s.ops, s.x, r.params, r.sphere);
  std::size_t inside = 0;
  for (auto i : s.train_rows) inside += scores[i].collusive;
  CHECK(static_cast<double>(inside) >= 0.8 * static_cast<double>(s.train_rows.size()));
}

TEST_CASE("non-finite inputs abort with a numeric error") {
  auto s = separable(3, 10, 5);
  s.x(2, 3) = std::nan("");
  TrainConfig cfg;
  cfg.epochs = 2;
  CHECK_THROWS_AS(train(s.ops, s.x, s.train_rows, cfg), NumericError);
}

TEST_CASE("divergent learning rates abort with a numeric error naming the epoch") {
  auto s = separable(4, 10, 5);
  for (double& v : s.x.flat()) v *= 1e200;
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.hidden = 4;
  cfg.attn_dim = 4;
  try {
    train(s.ops, s.x, s.train_rows, cfg);
    FAIL("expected a numeric error");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
}

TEST_CASE("decision rule") {
  const auto sphere = sphere_at({1.0, 1.0}, 4.0);
  const Matrix z = rows_of({{1.0, 1.0}, {3.0, 1.0}, {3.0, 3.0}});
  const auto s = score_embeddings(z, sphere);
  CHECK(s[0].collusive);
  CHECK(s[0].dist2 == 0.0);
  CHECK(s[1].dist2 == 4.0);
  CHECK(s[1].collusive);  // boundary counts as inside
  CHECK(s[1].margin == 0.0);
  CHECK_FALSE(s[2].collusive);
  CHECK(s[2].margin == 4.0);
  CHECK_THROWS_AS(score_embeddings(z, Hypersphere{{1.0, 1.0}, std::nullopt, 0.2}), ShapeError);
}
