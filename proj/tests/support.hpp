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

#ifndef COLLUDET_TESTS_SUPPORT_HPP_
#define COLLUDET_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "colludet/decompose.hpp"
#include "colludet/detector.hpp"
#include "colludet/features.hpp"
#include "colludet/hetnet.hpp"
#include "colludet/hsa.hpp"
#include "colludet/jsonl.hpp"
#include "colludet/random.hpp"
#include "colludet/tensor.hpp"

namespace testing {

using namespace colludet;

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("colludet_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_lines(const std::filesystem::path& path, const std::vector<jsonl::Json>& records) {
  std::ofstream out(path);
  for (const auto& r : records) out << r.dump() << '\n';
}

inline jsonl::Json user_json(const std::string& id, const std::string& created = "2015-01-01") {
  return {{"id", id},
          {"followers_count", 0},
          {"friends_count", 0},
          {"statuses_count", 0},
          {"favourites_count", 0},
          {"description", ""},
          {"url_in_description", false},
          {"location_present", false},
          {"profile_image", false},
          {"background_image", false},
          {"created_at", created},
          {"tweet_year_counts", jsonl::Json::object()}};
}

inline jsonl::Json tweet_json(const std::string& user, const std::string& id, std::vector<double> embedding) {
  return {{"user", user},
          {"tweet_id", id},
          {"text", "hello"},
          {"is_retweet", false},
          {"n_emojis", 0},
          {"n_urls", 0},
          {"n_mentions", 0},
          {"n_words", 1},
          {"n_hashtags", 0},
          {"embedding", embedding}};
}

inline UserRecord plain_user(const std::string& id) {
  UserRecord u;
  u.id = id;
  u.created_at = parse_date("2015-01-01");
  return u;
}

inline Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.flat()) v = rng.uniform(-scale, scale);
  return m;
}

inline Subgraph random_subgraph(Rng& rng, Relationship rel, std::size_t n, double p, bool integer_weights = true) {
  std::vector<WeightedEdge> edges;
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j)
      if (rng.bernoulli(p))
        edges.push_back({i, j, integer_weights ? static_cast<double>(1 + rng.below(5)) : rng.uniform(0.1, 3.0)});
  return Subgraph::from_edges(rel, n, edges);
}

struct RandomGraph {
  HetNet net;
  std::vector<std::vector<bool>> follows;       // user x user
  std::vector<std::vector<std::uint32_t>> topic_hist;  // user x topic
  std::size_t n_topics = 0;
  TopicHistogram histogram;
};

// Random network with `labeled` labeled users and `extra` unlabeled
// intermediaries; topic histograms are drawn directly.
inline RandomGraph random_graph(Rng& rng, std::size_t labeled, std::size_t extra, std::size_t n_topics,
                                double p_follow) {
  RandomGraph r;
  const std::size_t n = labeled + extra;
  r.n_topics = n_topics;
  r.follows.assign(n, std::vector<bool>(n, false));
  r.topic_hist.assign(n, std::vector<std::uint32_t>(n_topics, 0));
  HetNetBuilder b;
  for (std::size_t u = 0; u < n; ++u) b.add_user(plain_user("u" + std::to_string(u)));
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (u != v && rng.bernoulli(p_follow)) {
        r.follows[u][v] = true;
        b.add_follow("u" + std::to_string(u), "u" + std::to_string(v));
      }
  for (std::size_t u = 0; u < labeled; ++u)
    b.set_label("u" + std::to_string(u), rng.bernoulli(0.5) ? Label::kCollusive : Label::kNonCollusive);
  r.net = std::move(b).build();
  r.histogram.n_topics = n_topics;
  r.histogram.rows.resize(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::uint32_t k = 0; k < n_topics; ++k)
      if (rng.bernoulli(0.4)) {
        const auto c = static_cast<std::uint32_t>(1 + rng.below(4));
        r.topic_hist[u][k] = c;
        r.histogram.rows[u].emplace_back(k, c);
      }
  return r;
}

// Naive path enumeration over all labeled pairs. Returns i<j -> weight.
inline std::map<std::pair<std::uint32_t, std::uint32_t>, double> oracle_edges(const RandomGraph& r,
                                                                              Relationship rel) {
  const auto& labeled = r.net.labeled_users();
  const std::size_t n = r.follows.size();
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> out;
  for (std::uint32_t a = 0; a < labeled.size(); ++a)
    for (std::uint32_t c = a + 1; c < labeled.size(); ++c) {
      const auto i = labeled[a], j = labeled[c];
      double w = 0.0;
      switch (rel) {
        case Relationship::kCommonFollowee:
          for (std::size_t x = 0; x < n; ++x) w += (r.follows[i][x] && r.follows[j][x]) ? 1 : 0;
          break;
        case Relationship::kTransition: {
          double ij = 0, ji = 0;
          for (std::size_t x = 0; x < n; ++x) {
            ij += (r.follows[i][x] && r.follows[x][j]) ? 1 : 0;
            ji += (r.follows[j][x] && r.follows[x][i]) ? 1 : 0;
          }
          w = std::max(ij, ji);
          break;
        }
        case Relationship::kDirect:
          w = (r.follows[i][j] || r.follows[j][i]) ? 1 : 0;
          break;
        case Relationship::kCommonTopic:
          for (std::size_t k = 0; k < r.n_topics; ++k) w += std::min(r.topic_hist[i][k], r.topic_hist[j][k]);
          break;
      }
      if (w > 0) out[{a, c}] = w;
    }
  return out;
}

inline std::map<std::pair<std::uint32_t, std::uint32_t>, double> as_map(const Subgraph& s) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> out;
  for (const auto& e : s.edge_list()) out[{e.i, e.j}] = e.weight;
  return out;
}

// Eq.-style dense evaluation of one convolution: relu(b + sum_j A_ij x_j W).
inline Matrix dense_conv(const Subgraph& s, const Matrix& x, const ConvParams& p) {
  const std::size_t n = s.n;
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (const auto& e : s.edge_list()) a[e.i][e.j] = a[e.j][e.i] = e.weight;
  std::vector<double> deg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) deg[i] += a[i][j] > 0 ? 1 : 0;
  Matrix out(n, p.weight.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t h = 0; h < p.weight.cols(); ++h) {
      double v = p.bias(0, h);
      for (std::size_t j = 0; j < n; ++j) {
        if (a[i][j] == 0) continue;
        double xw = 0.0;
        for (std::size_t f = 0; f < x.cols(); ++f) xw += x(j, f) * p.weight(f, h);
        v += a[i][j] / std::sqrt(deg[i] * deg[j]) * xw;
      }
      out(i, h) = v > 0 ? v : 0;
    }
  return out;
}

inline std::vector<SubgraphOperator> random_operators(Rng& rng, std::size_t n, double p) {
  std::vector<SubgraphOperator> ops;
  for (auto rel : kAllRelationships) ops.push_back(SubgraphOperator::from(random_subgraph(rng, rel, n, p)));
  return ops;
}

inline HsaParams random_params(Rng& rng, const HsaConfig& cfg, double scale = 0.5) {
  HsaParams params = HsaParams::zeros(cfg);
  for (auto& [name, t] : params.tensors())
    for (double& v : t->flat()) v = rng.uniform(-scale, scale);
  return params;
}

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst;  // tensor[index] with the largest error
  std::size_t checked = 0;
};

// Compares the analytic gradient of the hypersphere loss over the full HSA
// stack with central differences. The radius sits in the widest gap of the
// sorted training distances so no hinge switches under the perturbation.
// Relative error is |a - f| / max(|a|, |f|, floor).
inline GradCheckResult gradient_check(std::uint64_t seed, std::size_t n = 20, std::size_t heads = 2,
                                      double step = 1e-5, double floor = 1e-6) {
  Rng rng(seed);
  const auto ops = random_operators(rng, n, 0.25);
  const Matrix x = random_matrix(rng, n, 18);
  HsaConfig cfg{18, 8, 6, heads, 4};
  HsaParams params = random_params(rng, cfg);
  std::vector<std::size_t> train_rows;
  for (std::size_t i = 0; i < n; ++i)
    if (i % 4 != 3) train_rows.push_back(i);

  Hypersphere sphere;
  sphere.mu = 0.2;
  {
    const auto trace = hsa_forward(ops, x, params);
    const Matrix zt = gather_rows(trace.output(), train_rows);
    sphere.center = init_center(zt, 0.1);
    sphere.radius2 = 0.0;
    auto d = svdd_loss(zt, sphere).dist2;
    std::sort(d.begin(), d.end());
    std::size_t best = d.size() / 2;
    for (std::size_t i = d.size() / 2; i + 1 < d.size(); ++i)
      if (d[i + 1] - d[i] > d[best + 1] - d[best]) best = i;
    sphere.radius2 = 0.5 * (d[best] + d[best + 1]);
  }
  const auto loss_at = [&](const HsaParams& p) {
    const auto trace = hsa_forward(ops, x, p);
    return svdd_loss(gather_rows(trace.output(), train_rows), sphere).loss;
  };

  const auto trace = hsa_forward(ops, x, params);
  Matrix dz_train;
  svdd_loss(gather_rows(trace.output(), train_rows), sphere, &dz_train);
  Matrix dz(n, cfg.hidden);
  for (std::size_t r = 0; r < train_rows.size(); ++r)
    for (std::size_t c = 0; c < cfg.hidden; ++c) dz(train_rows[r], c) = dz_train(r, c);
  HsaParams grads = hsa_backward(ops, trace, dz, params);

  GradCheckResult out;
  auto analytic = grads.tensors();
  auto tensors = params.tensors();
  for (std::size_t t = 0; t < tensors.size(); ++t) {
    Matrix& m = *tensors[t].second;
    for (std::size_t k = 0; k < m.size(); ++k) {
      const double saved = m.flat()[k];
      m.flat()[k] = saved + step;
      const double up = loss_at(params);
      m.flat()[k] = saved - step;
      const double down = loss_at(params);
      m.flat()[k] = saved;
      const double numeric = (up - down) / (2 * step);
      const double a = analytic[t].second->flat()[k];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
      ++out.checked;
      if (rel > out.max_rel_error) {
        out.max_rel_error = rel;
        out.worst = tensors[t].first + "[" + std::to_string(k) + "]";
      }
    }
  }
  return out;
}

struct TweetSpec {
  bool retweet;
  std::int64_t emojis, urls, mentions, words, hashtags;
};

struct FeatureFixture {
  HetNet net;
  std::chrono::year_month_day now;
  std::vector<FeatureVector> expected;
};

// Five hand-written users with their 18-dim vectors worked out by hand.
inline FeatureFixture feature_fixture() {
  FeatureFixture f;
  f.now = parse_date("2021-01-01");
  HetNetBuilder b;
  const auto add = [&](UserRecord u, const std::vector<TweetSpec>& tweets) {
    const std::string id = u.id;
    b.add_user(std::move(u));
    for (std::size_t i = 0; i < tweets.size(); ++i) {
      TweetRecord t;
      t.tweet_id = id + std::to_string(i);
      t.is_retweet = tweets[i].retweet;
      t.n_emojis = tweets[i].emojis;
      t.n_urls = tweets[i].urls;
      t.n_mentions = tweets[i].mentions;
      t.n_words = tweets[i].words;
      t.n_hashtags = tweets[i].hashtags;
      b.add_tweet(id, t);
    }
  };

  UserRecord alice = plain_user("alice");
  alice.followers_count = 10;
  alice.friends_count = 20;
  alice.statuses_count = 30;
  alice.favourites_count = 40;
  alice.description = "hi";
  alice.url_in_description = true;
  alice.location_present = true;
  alice.profile_image = true;
  alice.created_at = parse_date("2020-12-01");
  alice.tweet_year_counts = {{2019, 1}};
  add(alice, {{true, 1, 1, 0, 10, 0}, {true, 0, 1, 2, 5, 0}, {true, 0, 0, 0, 5, 0}, {false, 3, 0, 0, 4, 1}});
  f.expected.push_back({10, 20, 30, 40, 1, 2, 1, 1, 1, 0, 31, 0, 1, 0.75, 0.5, 0.5, 6, 0.25});

  UserRecord bob = plain_user("bob");
  bob.created_at = parse_date("2020-01-01");
  bob.tweet_year_counts = {{2018, 2}, {2019, 2}};
  add(bob, {});
  f.expected.push_back({0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 366, 2.772588722239781, 0, 0, 0, 0, 0, 0});

  UserRecord carol = plain_user("carol");
  carol.followers_count = 5;
  carol.description = "h\xc3\xa9llo \xf0\x9f\x99\x82";
  carol.background_image = true;
  carol.created_at = parse_date("2011-01-01");
  carol.tweet_year_counts = {{2011, 3}, {2012, 1}};
  add(carol, {{false, 2, 0, 1, 7, 3}});
  f.expected.push_back({5, 0, 0, 0, 1, 7, 0, 0, 0, 1, 3653, 3.295836866004329, 2, 0, 0, 1, 7, 3});

  UserRecord dave = plain_user("dave");
  dave.statuses_count = 2;
  dave.created_at = parse_date("2021-01-01");
  dave.tweet_year_counts = {{2018, 1}, {2019, 1}, {2020, 1}};
  add(dave, {{true, 0, 0, 0, 3, 0}, {true, 0, 0, 0, 4, 0}});
  f.expected.push_back({0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 3.5, 0});

  UserRecord erin = plain_user("erin");
  erin.friends_count = 1000000;
  erin.description = "x";
  erin.profile_image = true;
  erin.created_at = parse_date("2020-12-31");
  erin.tweet_year_counts = {{2015, 5}, {2016, 10}, {2017, 0}};
  add(erin, {{true, 1, 0, 0, 10, 1},
             {false, 1, 1, 0, 10, 0},
             {false, 1, 0, 0, 10, 1},
             {false, 0, 0, 0, 10, 0},
             {false, 0, 0, 0, 10, 0}});
  f.expected.push_back({0, 1000000, 0, 0, 1, 1, 0, 0, 1, 0, 1, 31.073040492110962, 0.6, 0.2, 0.2, 0, 10, 0.4});

  f.net = std::move(b).build();
  return f;
}

}  // namespace testing

#endif  // COLLUDET_TESTS_SUPPORT_HPP_
