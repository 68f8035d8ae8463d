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

#include "colludet/decompose.hpp"

#include <algorithm>
#include <cmath>

#include "colludet/error.hpp"
#include "colludet/jsonl.hpp"

namespace colludet {

namespace {

std::vector<WeightedEdge> rows_to_edges(std::span<const kernels::CountRow> rows) {
  std::vector<WeightedEdge> edges;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& [j, c] : rows[i])
      edges.push_back({static_cast<std::uint32_t>(i), j, static_cast<double>(c)});
  return edges;
}

}  // namespace

std::string relationship_name(Relationship rel) {
  return "d" + std::to_string(static_cast<int>(rel) + 1);
}

Relationship relationship_from_name(const std::string& name) {
  for (auto rel : kAllRelationships)
    if (relationship_name(rel) == name) return rel;
  throw DataError("unknown relationship '" + name + "' (expected d1..d4)");
}

std::vector<double> Subgraph::normalized_weights() const {
  std::vector<double> out(weights.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t e = adj.offsets[i]; e < adj.offsets[i + 1]; ++e) {
      const double c = std::sqrt(static_cast<double>(adj.degree(i)) *
                                 static_cast<double>(adj.degree(adj.indices[e])));
      out[e] = weights[e] / c;
    }
  }
  return out;
}

std::vector<WeightedEdge> Subgraph::edge_list() const {
  std::vector<WeightedEdge> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t e = adj.offsets[i]; e < adj.offsets[i + 1]; ++e)
      if (i < adj.indices[e])
        out.push_back({static_cast<std::uint32_t>(i), adj.indices[e], weights[e]});
  return out;
}

Subgraph Subgraph::from_edges(Relationship rel, std::size_t n,
                              const std::vector<WeightedEdge>& edges) {
  std::vector<WeightedEdge> canon;
  canon.reserve(edges.size());
  for (auto e : edges) {
    if (e.i >= n || e.j >= n) throw ShapeError("subgraph edge endpoint out of range");
    if (e.i == e.j) throw ShapeError("subgraph self-edge");
    if (!(e.weight > 0.0)) throw ShapeError("subgraph edge weight must be positive");
    if (e.i > e.j) std::swap(e.i, e.j);
    canon.push_back(e);
  }
  std::sort(canon.begin(), canon.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    return std::tie(a.i, a.j, a.weight) < std::tie(b.i, b.j, b.weight);
  });
  // Sorted by weight within a pair, so the last entry of each run is the max.
  std::vector<WeightedEdge> merged;
  for (const auto& e : canon) {
    if (!merged.empty() && merged.back().i == e.i && merged.back().j == e.j)
      merged.back().weight = e.weight;
    else
      merged.push_back(e);
  }

  Subgraph s;
  s.relationship = rel;
  s.n = n;
  s.adj.n_rows = n;
  s.adj.n_cols = n;
  s.adj.offsets.assign(n + 1, 0);
  for (const auto& e : merged) {
    ++s.adj.offsets[e.i + 1];
    ++s.adj.offsets[e.j + 1];
  }
  for (std::size_t i = 0; i < n; ++i) s.adj.offsets[i + 1] += s.adj.offsets[i];
  s.adj.indices.resize(2 * merged.size());
  s.weights.resize(2 * merged.size());
  std::vector<std::size_t> cursor(s.adj.offsets.begin(), s.adj.offsets.end() - 1);
  // Pass 1 places lower neighbours (j < i) in ascending order, pass 2 the
  // upper ones, which keeps each row sorted.
  for (const auto& e : merged) {
    s.adj.indices[cursor[e.j]] = e.i;
    s.weights[cursor[e.j]++] = e.weight;
  }
  for (const auto& e : merged) {
    s.adj.indices[cursor[e.i]] = e.j;
    s.weights[cursor[e.i]++] = e.weight;
  }
  return s;
}

std::vector<std::uint32_t> TopicHistogram::dense(std::size_t user) const {
  std::vector<std::uint32_t> out(n_topics, 0);
  for (const auto& [k, c] : rows.at(user)) out[k] = c;
  return out;
}

Subgraph build_delta1(const HetNet& g) {
  const auto& follows = g.out_adjacency(EdgeKind::kFollows);
  const auto& followed_by = g.in_adjacency(EdgeKind::kFollows);
  auto rows = kernels::parallel::two_hop_counts(follows, followed_by, g.labeled_users(),
                                                g.labeled_positions());
  return Subgraph::from_edges(Relationship::kCommonFollowee, g.labeled_users().size(),
                              rows_to_edges(rows));
}

Subgraph build_delta2(const HetNet& g) {
  const auto& follows = g.out_adjacency(EdgeKind::kFollows);
  // Row for u2 holds (u1, #x) with u2 -> x -> u1.
  auto rows = kernels::parallel::two_hop_counts(follows, follows, g.labeled_users(),
                                                g.labeled_positions());
  return Subgraph::from_edges(Relationship::kTransition, g.labeled_users().size(),
                              rows_to_edges(rows));
}

Subgraph build_delta3(const HetNet& g) {
  const auto& follows = g.out_adjacency(EdgeKind::kFollows);
  const auto& pos = g.labeled_positions();
  std::vector<WeightedEdge> edges;
  for (auto u : g.labeled_users())
    for (auto v : follows.neighbors(u))
      if (pos[v] >= 0)
        edges.push_back({static_cast<std::uint32_t>(pos[u]),
                         static_cast<std::uint32_t>(pos[v]), 1.0});
  return Subgraph::from_edges(Relationship::kDirect, g.labeled_users().size(), edges);
}

Subgraph build_delta4(const HetNet& g, const TopicHistogram& hist) {
  if (hist.rows.size() != g.user_count())
    throw ShapeError("topic histogram covers " + std::to_string(hist.rows.size()) +
                     " users, graph has " + std::to_string(g.user_count()));
  if (g.topic_count() != 0 && hist.n_topics != g.topic_count())
    throw ShapeError("topic histogram length does not match the graph's topic count");
  std::vector<kernels::SparseHistogram> labeled;
  labeled.reserve(g.labeled_users().size());
  for (auto u : g.labeled_users()) {
    for (const auto& [k, c] : hist.rows[u])
      if (k >= hist.n_topics || c == 0) throw ShapeError("malformed topic histogram row");
    labeled.push_back(hist.rows[u]);
  }
  auto rows = kernels::parallel::min_overlap(labeled, hist.n_topics);
  return Subgraph::from_edges(Relationship::kCommonTopic, labeled.size(),
                              rows_to_edges(rows));
}

std::array<Subgraph, 4> build_all(const HetNet& g, const TopicHistogram& hist) {
  return {build_delta1(g), build_delta2(g), build_delta3(g), build_delta4(g, hist)};
}

SubgraphStats subgraph_stats(const Subgraph& s) {
  SubgraphStats st;
  for (const auto& e : s.edge_list()) {
    ++st.edge_count;
    st.weight_sum += e.weight;
    st.max_weight = std::max(st.max_weight, e.weight);
  }
  if (s.n >= 2)
    st.density = static_cast<double>(st.edge_count) /
                 (static_cast<double>(s.n) * static_cast<double>(s.n - 1) / 2.0);
  return st;
}

void write_subgraph(const std::filesystem::path& path, const Subgraph& s) {
  jsonl::Writer w(path);
  for (const auto& e : s.edge_list()) w.write({{"i", e.i}, {"j", e.j}, {"weight", e.weight}});
}

Subgraph read_subgraph(const std::filesystem::path& path, Relationship rel, std::size_t n) {
  std::vector<WeightedEdge> edges;
  jsonl::for_each(path, [&](const jsonl::Json& j, std::size_t) {
    edges.push_back({jsonl::field<std::uint32_t>(j, "i"), jsonl::field<std::uint32_t>(j, "j"),
                     jsonl::field<double>(j, "weight")});
  });
  try {
    return Subgraph::from_edges(rel, n, edges);
  } catch (const ShapeError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace colludet
