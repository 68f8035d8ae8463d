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

#ifndef COLLUDET_SYNTH_HPP_
#define COLLUDET_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <string>

#include "colludet/hetnet.hpp"

namespace colludet {

// Synthetic follower-market population.
//
// Collusive users and a share of the unlabeled intermediaries are members of
// a credit-based follow exchange: every member spends
// credit_rate * initial_credits credits following random other members, and
// each followed member follows back with follow_back_prob. On top of that,
// every user follows `organic_follows` users who share its primary topic.
// Collusive users mostly pick their primary topic from a small block of
// promotional topics; organic (non-collusive) users and intermediaries pick
// uniformly. Only collusive and organic users are labeled and tweet.
struct SynthConfig {
  std::size_t n_collusive = 500;
  std::size_t n_organic = 100;
  std::size_t n_intermediaries = 300;
  double credit_rate = 0.3;
  std::size_t initial_credits = 50;
  double service_fraction = 0.5;  // intermediaries that trade on the exchange
  double follow_back_prob = 0.3;
  std::size_t organic_follows = 8;
  double topic_concentration = 0.8;  // share of a user's tweets on its primary topic
  double promo_topic_fraction = 0.25;
  double promo_bias = 0.8;  // chance a collusive user's primary topic is promotional
  std::size_t k_topics = 20;
  std::size_t tweets_per_user = 20;
  std::size_t embedding_dim = 32;
  double embedding_noise = 0.35;
  std::uint64_t seed = 1;
  std::string now = "2021-01-01";

  void validate() const;  // throws DataError
};

// Generated graph with labels: collusive users are Label::kCollusive,
// organic users Label::kNonCollusive, intermediaries unlabeled. Tweets carry
// embeddings (noisy topic directions) and topic-vocabulary text.
HetNet generate_synthetic(const SynthConfig& cfg);

// generate_synthetic + save_hetnet into `dir` as users.jsonl, follows.jsonl,
// tweets.jsonl and labels.jsonl.
DatasetPaths write_synthetic(const SynthConfig& cfg, const std::filesystem::path& dir);

}  // namespace colludet

#endif  // COLLUDET_SYNTH_HPP_
