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

#ifndef COLLUDET_PIPELINE_HPP_
#define COLLUDET_PIPELINE_HPP_

#include <array>
#include <chrono>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "colludet/decompose.hpp"
#include "colludet/error.hpp"
#include "colludet/hetnet.hpp"
#include "colludet/hsa.hpp"
#include "colludet/tensor.hpp"
#include "colludet/topics.hpp"

namespace colludet {

// What training and evaluation consume: the four subgraphs over the labeled
// users plus their raw feature rows and labels, all in labeled-user order.
struct Dataset {
  std::vector<Subgraph> subgraphs;  // kAllRelationships order
  Matrix raw_features;
  std::vector<Label> labels;
  std::vector<std::string> user_ids;

  std::size_t size() const { return labels.size(); }
  std::vector<std::size_t> rows_with(Label label) const;
  std::vector<SubgraphOperator> operators(std::span<const Relationship> rels) const;
};

struct BuildOptions {
  std::chrono::year_month_day now{};
  KMeansOptions kmeans;
  std::optional<std::size_t> fallback_dim;
};

struct BuildResult {
  Dataset data;
  EmbeddingMatrix embeddings;
  TopicModel topics;
  TopicHistogram histogram;
  std::array<SubgraphStats, 4> stats;
};

// Runs `fn`, prefixing the message of any DataError or NumericError it
// throws with "<stage>: ".
template <typename Fn>
void in_stage(const char* stage, Fn&& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    throw DataError(std::string(stage) + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError(std::string(stage) + ": " + e.what());
  }
}

// Topics, decomposition and raw features for a loaded network.
BuildResult run_build(HetNet& g, const BuildOptions& options);

// Artifacts written under `dir`:
//   nodes.jsonl              {index, user_id, label}
//   features.csv             raw feature matrix
//   subgraph_d1..d4.jsonl    {i, j, weight}
//   subgraph_stats.jsonl     {relationship, edges, weight_sum, max_weight, density}
//   subgraph_stats.txt       the same as a table
//   topics.jsonl             {tweet_id, topic}
//   topic_centroids.json     checkpoint container with tensor "centroids"
void write_build(const std::filesystem::path& dir, const HetNet& g, const BuildResult& build);
Dataset read_build(const std::filesystem::path& dir);

std::string format_stats_table(const std::array<SubgraphStats, 4>& stats, std::size_t n_users);

}  // namespace colludet

#endif  // COLLUDET_PIPELINE_HPP_
