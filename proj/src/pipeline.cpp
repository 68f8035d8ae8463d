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

#include "colludet/pipeline.hpp"

#include <cstdio>
#include <fstream>

#include "colludet/checkpoint.hpp"
#include "colludet/error.hpp"
#include "colludet/features.hpp"
#include "colludet/jsonl.hpp"

namespace colludet {

std::vector<std::size_t> Dataset::rows_with(Label label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) out.push_back(i);
  return out;
}

std::vector<SubgraphOperator> Dataset::operators(std::span<const Relationship> rels) const {
  std::vector<SubgraphOperator> out;
  for (auto r : rels) out.push_back(SubgraphOperator::from(subgraphs.at(static_cast<std::size_t>(r))));
  return out;
}

BuildResult run_build(HetNet& g, const BuildOptions& options) {
  BuildResult b;
  in_stage("topics", [&] {
    b.embeddings = load_embeddings(g, options.fallback_dim);
    if (b.embeddings.rows.rows() == 0) throw DataError("no tweet embeddings available");
    if (options.kmeans.k > b.embeddings.rows.rows())
      throw DataError("k = " + std::to_string(options.kmeans.k) + " exceeds the " +
                      std::to_string(b.embeddings.rows.rows()) + " embedded tweets");
    b.topics = spherical_kmeans(b.embeddings.rows, options.kmeans);
    b.histogram = attach_topics(g, b.embeddings, b.topics);
  });
  in_stage("decompose", [&] {
    const auto subs = build_all(g, b.histogram);
    for (std::size_t m = 0; m < 4; ++m) b.stats[m] = subgraph_stats(subs[m]);
    b.data.subgraphs.assign(subs.begin(), subs.end());
  });
  in_stage("features", [&] { b.data.raw_features = raw_feature_matrix(g, options.now); });
  for (auto u : g.labeled_users()) {
    b.data.labels.push_back(g.label(u));
    b.data.user_ids.push_back(g.user(u).id);
  }
  return b;
}

std::string format_stats_table(const std::array<SubgraphStats, 4>& stats, std::size_t n_users) {
  std::string out = "relationship  users       edges      weight_sum  max_weight  density\n";
  char line[160];
  for (std::size_t m = 0; m < 4; ++m) {
    std::snprintf(line, sizeof line, "%-12s  %-10zu  %-9zu  %-10.0f  %-10.0f  %.6f\n",
                  relationship_name(kAllRelationships[m]).c_str(), n_users, stats[m].edge_count,
                  stats[m].weight_sum, stats[m].max_weight, stats[m].density);
    out += line;
  }
  return out;
}

void write_build(const std::filesystem::path& dir, const HetNet& g, const BuildResult& b) {
  std::filesystem::create_directories(dir);
  {
    jsonl::Writer w(dir / "nodes.jsonl");
    for (std::size_t i = 0; i < b.data.size(); ++i)
      w.write({{"index", i}, {"user_id", b.data.user_ids[i]}, {"label", static_cast<int>(b.data.labels[i])}});
  }
  write_feature_csv(dir / "features.csv", b.data.raw_features, b.data.user_ids);
  {
    jsonl::Writer w(dir / "subgraph_stats.jsonl");
    for (std::size_t m = 0; m < 4; ++m) {
      write_subgraph(dir / ("subgraph_" + relationship_name(kAllRelationships[m]) + ".jsonl"),
                     b.data.subgraphs[m]);
      const auto& s = b.stats[m];
      w.write({{"relationship", relationship_name(kAllRelationships[m])},
               {"users", b.data.size()},
               {"edges", s.edge_count},
               {"weight_sum", s.weight_sum},
               {"max_weight", s.max_weight},
               {"density", s.density}});
    }
  }
  {
    std::ofstream out(dir / "subgraph_stats.txt");
    out << format_stats_table(b.stats, b.data.size());
  }
  write_topic_assignments(dir / "topics.jsonl", g, b.embeddings, b.topics);
  Checkpoint c;
  c.meta = {{"k", b.topics.k()}, {"iterations", b.topics.iterations}, {"objective", b.topics.objective()}};
  c.add("centroids", b.topics.centroids);
  c.save(dir / "topic_centroids.json");
}

Dataset read_build(const std::filesystem::path& dir) {
  Dataset d;
  jsonl::for_each(dir / "nodes.jsonl", [&](const jsonl::Json& j, std::size_t) {
    if (jsonl::field<std::size_t>(j, "index") != d.labels.size())
      throw DataError("nodes must be listed in index order");
    d.user_ids.push_back(jsonl::field<std::string>(j, "user_id"));
    const int l = jsonl::field<int>(j, "label");
    if (l < -1 || l > 1) throw DataError("bad label");
    d.labels.push_back(static_cast<Label>(l));
  });
  std::vector<std::string> ids;
  d.raw_features = read_feature_csv(dir / "features.csv", &ids);
  if (ids != d.user_ids) throw DataError("features.csv rows do not match nodes.jsonl");
  for (auto rel : kAllRelationships)
    d.subgraphs.push_back(read_subgraph(dir / ("subgraph_" + relationship_name(rel) + ".jsonl"), rel,
                                        d.size()));
  return d;
}

}  // namespace colludet
