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

#ifndef COLLUDET_DECOMPOSE_HPP_
#define COLLUDET_DECOMPOSE_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <tuple>
#include <vector>

#include "colludet/csr.hpp"
#include "colludet/hetnet.hpp"
#include "colludet/kernels.hpp"

namespace colludet {

// The four user-user relationships:
//   kCommonFollowee    u1 -follows-> x <-follows- u2     weight #x
//   kTransition        u1 <-follows- x <-follows- u2     weight #x
//   kDirect            u1 -follows-> u2                  weight 1
//   kCommonTopic       u1 -posts-> t -contains-> k ...   weight sum_k min(o1_k, o2_k)
enum class Relationship : std::uint8_t {
  kCommonFollowee = 0,
  kTransition = 1,
  kDirect = 2,
  kCommonTopic = 3,
};

inline constexpr std::array<Relationship, 4> kAllRelationships = {
    Relationship::kCommonFollowee, Relationship::kTransition, Relationship::kDirect,
    Relationship::kCommonTopic};

// Short names "d1".."d4" used in file names and reports.
std::string relationship_name(Relationship rel);
Relationship relationship_from_name(const std::string& name);

struct WeightedEdge {
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  double weight = 0.0;

  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

// Undirected weighted graph over the labeled users (index = position in
// HetNet::labeled_users()). Both directions of every edge are stored.
struct Subgraph {
  Relationship relationship = Relationship::kCommonFollowee;
  std::size_t n = 0;
  Csr adj;
  std::vector<double> weights;  // aligned with adj.indices

  std::size_t degree(std::size_t i) const { return adj.degree(i); }
  // e_ij / sqrt(|N_i| |N_j|), aligned with adj.indices.
  std::vector<double> normalized_weights() const;
  // Each undirected edge once, i < j, ascending.
  std::vector<WeightedEdge> edge_list() const;

  // Symmetrises `edges` (either orientation); a pair listed more than once
  // keeps its largest weight. Self-pairs and non-positive weights throw.
  static Subgraph from_edges(Relationship rel, std::size_t n,
                             const std::vector<WeightedEdge>& edges);
};

// Per-user topic counts o^i over the assigned tweets; rows cover every user.
struct TopicHistogram {
  std::size_t n_topics = 0;
  std::vector<kernels::SparseHistogram> rows;

  std::vector<std::uint32_t> dense(std::size_t user) const;
};

Subgraph build_delta1(const HetNet& g);
Subgraph build_delta2(const HetNet& g);
Subgraph build_delta3(const HetNet& g);
Subgraph build_delta4(const HetNet& g, const TopicHistogram& hist);
std::array<Subgraph, 4> build_all(const HetNet& g, const TopicHistogram& hist);

struct SubgraphStats {
  std::size_t edge_count = 0;
  double weight_sum = 0.0;
  double max_weight = 0.0;
  double density = 0.0;
};

SubgraphStats subgraph_stats(const Subgraph& s);

// Line-delimited {"i", "j", "weight"}, one line per undirected edge.
void write_subgraph(const std::filesystem::path& path, const Subgraph& s);
Subgraph read_subgraph(const std::filesystem::path& path, Relationship rel, std::size_t n);

}  // namespace colludet

#endif  // COLLUDET_DECOMPOSE_HPP_
