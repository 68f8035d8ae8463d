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

#include "colludet/synth.hpp"

#include <algorithm>
#include <cmath>

#include "colludet/error.hpp"
#include "colludet/random.hpp"

namespace colludet {

namespace {

enum class Role { kCollusive, kOrganic, kIntermediary };

std::vector<double> unit_gaussian(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  double s = 0.0;
  for (double& x : v) {
    x = rng.normal();
    s += x * x;
  }
  s = std::sqrt(s);
  for (double& x : v) x /= s;
  return v;
}

std::string user_name(std::size_t i) { return "u" + std::to_string(i); }

}  // namespace

void SynthConfig::validate() const {
  if (n_collusive + n_organic == 0) throw DataError("synth: no labeled users requested");
  for (double p : {credit_rate, service_fraction, follow_back_prob, topic_concentration,
                   promo_topic_fraction, promo_bias})
    if (!(p >= 0.0 && p <= 1.0)) throw DataError("synth: probabilities must lie in [0, 1]");
  if (k_topics == 0) throw DataError("synth: k_topics must be positive");
  if (embedding_dim == 0) throw DataError("synth: embedding_dim must be positive");
  if (embedding_noise < 0.0) throw DataError("synth: embedding_noise must be non-negative");
  parse_date(now);
}

HetNet generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const std::size_t n = cfg.n_collusive + cfg.n_organic + cfg.n_intermediaries;
  std::vector<Role> role(n, Role::kIntermediary);
  // Interleave roles so user ids carry no ordering signal.
  {
    std::vector<Role> pool;
    pool.insert(pool.end(), cfg.n_collusive, Role::kCollusive);
    pool.insert(pool.end(), cfg.n_organic, Role::kOrganic);
    pool.insert(pool.end(), cfg.n_intermediaries, Role::kIntermediary);
    for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng.below(i)]);
    role = pool;
  }

  const std::size_t k = cfg.k_topics;
  const std::size_t promo = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(cfg.promo_topic_fraction * static_cast<double>(k))));
  std::vector<std::uint32_t> topic(n);
  std::vector<bool> member(n, false);
  for (std::size_t u = 0; u < n; ++u) {
    if (role[u] == Role::kCollusive && rng.bernoulli(cfg.promo_bias))
      topic[u] = static_cast<std::uint32_t>(rng.below(promo));
    else
      topic[u] = static_cast<std::uint32_t>(rng.below(k));
    member[u] = role[u] == Role::kCollusive ||
                (role[u] == Role::kIntermediary && rng.bernoulli(cfg.service_fraction));
  }

  std::vector<std::pair<std::uint32_t, std::uint32_t>> follows;
  // Exchange follows.
  std::vector<std::uint32_t> members;
  for (std::size_t u = 0; u < n; ++u)
    if (member[u]) members.push_back(static_cast<std::uint32_t>(u));
  const auto spend = static_cast<std::size_t>(
      std::llround(cfg.credit_rate * static_cast<double>(cfg.initial_credits)));
  if (members.size() > 1) {
    for (auto u : members) {
      for (std::size_t c = 0; c < spend; ++c) {
        std::uint32_t v = members[rng.below(members.size())];
        if (v == u) continue;
        follows.emplace_back(u, v);
        if (rng.bernoulli(cfg.follow_back_prob)) follows.emplace_back(v, u);
      }
    }
  }
  // Topical follows.
  std::vector<std::vector<std::uint32_t>> by_topic(k);
  for (std::size_t u = 0; u < n; ++u) by_topic[topic[u]].push_back(static_cast<std::uint32_t>(u));
  // Distinct same-topic peers, so out-degree does not depend on topic size.
  std::vector<std::uint32_t> pool;
  for (std::size_t u = 0; u < n; ++u) {
    pool.clear();
    for (auto v : by_topic[topic[u]])
      if (v != u) pool.push_back(v);
    const std::size_t take = std::min(cfg.organic_follows, pool.size());
    for (std::size_t c = 0; c < take; ++c) {
      std::swap(pool[c], pool[c + rng.below(pool.size() - c)]);
      follows.emplace_back(static_cast<std::uint32_t>(u), pool[c]);
    }
  }
  std::sort(follows.begin(), follows.end());
  follows.erase(std::unique(follows.begin(), follows.end()), follows.end());
  std::vector<std::int64_t> in_deg(n, 0), out_deg(n, 0);
  for (const auto& [a, b] : follows) {
    ++out_deg[a];
    ++in_deg[b];
  }

  std::vector<std::vector<double>> directions;
  for (std::size_t t = 0; t < k; ++t) directions.push_back(unit_gaussian(rng, cfg.embedding_dim));

  const auto now = parse_date(cfg.now);
  const int last_year = static_cast<int>(now.year()) - 1;
  HetNetBuilder b;
  struct Pending {
    std::size_t user;
    TweetRecord tweet;
  };
  std::vector<Pending> tweets;
  for (std::size_t u = 0; u < n; ++u) {
    const bool coll = role[u] == Role::kCollusive;
    const bool labeled = role[u] != Role::kIntermediary;
    UserRecord rec;
    rec.id = user_name(u);
    rec.followers_count = in_deg[u];
    rec.friends_count = out_deg[u];
    rec.favourites_count = static_cast<std::int64_t>(rng.poisson(coll ? 40.0 : 30.0));
    rec.description = rng.bernoulli(coll ? 0.9 : 0.75)
                          ? std::string(10 + rng.below(coll ? 120 : 100), 'x')
                          : std::string();
    rec.url_in_description = !rec.description.empty() && rng.bernoulli(coll ? 0.45 : 0.25);
    rec.location_present = rng.bernoulli(0.6);
    rec.profile_image = rng.bernoulli(0.95);
    rec.background_image = rng.bernoulli(0.7);
    const int first_year = 2008 + static_cast<int>(rng.below(static_cast<std::uint64_t>(
                                          std::max(1, last_year - 2008 + 1))));
    rec.created_at = std::chrono::year_month_day{
        std::chrono::year{first_year}, std::chrono::month{static_cast<unsigned>(1 + rng.below(12))},
        std::chrono::day{static_cast<unsigned>(1 + rng.below(28))}};

    const std::size_t n_tweets = labeled ? cfg.tweets_per_user : 0;
    std::int64_t statuses = static_cast<std::int64_t>(n_tweets + rng.poisson(coll ? 25.0 : 20.0));
    rec.statuses_count = statuses;
    for (std::int64_t s = 0; s < statuses; ++s) {
      const int y = first_year + static_cast<int>(rng.below(
                                     static_cast<std::uint64_t>(last_year - first_year + 1)));
      ++rec.tweet_year_counts[y];
    }

    for (std::size_t t = 0; t < n_tweets; ++t) {
      TweetRecord tw;
      tw.tweet_id = rec.id + "_t" + std::to_string(t);
      const auto tk = rng.bernoulli(cfg.topic_concentration) ? topic[u]
                                                             : static_cast<std::uint32_t>(rng.below(k));
      tw.is_retweet = rng.bernoulli(coll ? 0.5 : 0.35);
      tw.n_emojis = static_cast<std::int64_t>(rng.poisson(0.6));
      tw.n_urls = static_cast<std::int64_t>(rng.poisson(coll ? 0.7 : 0.4));
      tw.n_mentions = static_cast<std::int64_t>(rng.poisson(1.0));
      tw.n_hashtags = static_cast<std::int64_t>(rng.poisson(coll ? 1.6 : 1.0));
      tw.n_words = static_cast<std::int64_t>(4 + rng.poisson(coll ? 11.0 : 13.0));
      for (std::int64_t w = 0; w < tw.n_words; ++w) {
        if (w) tw.text += ' ';
        tw.text += rng.bernoulli(0.6) ? "topic" + std::to_string(tk) + "w" + std::to_string(rng.below(30))
                                      : "common" + std::to_string(rng.below(200));
      }
      std::vector<double> e = directions[tk];
      for (double& x : e) x += cfg.embedding_noise * rng.normal() / std::sqrt(static_cast<double>(e.size()));
      tw.embedding = std::move(e);
      tweets.push_back({u, std::move(tw)});
    }
    b.add_user(std::move(rec));
  }
  for (const auto& [a, c] : follows) b.add_follow(user_name(a), user_name(c));
  for (auto& p : tweets) b.add_tweet(user_name(p.user), std::move(p.tweet));
  for (std::size_t u = 0; u < n; ++u) {
    if (role[u] == Role::kCollusive) b.set_label(user_name(u), Label::kCollusive);
    if (role[u] == Role::kOrganic) b.set_label(user_name(u), Label::kNonCollusive);
  }
  return std::move(b).build();
}

DatasetPaths write_synthetic(const SynthConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  DatasetPaths paths{dir / "users.jsonl", dir / "follows.jsonl", dir / "tweets.jsonl",
                     dir / "labels.jsonl"};
  save_hetnet(generate_synthetic(cfg), paths);
  return paths;
}

}  // namespace colludet
