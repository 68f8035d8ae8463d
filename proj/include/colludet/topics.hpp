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

#ifndef COLLUDET_TOPICS_HPP_
#define COLLUDET_TOPICS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "colludet/decompose.hpp"
#include "colludet/hetnet.hpp"
#include "colludet/tensor.hpp"

namespace colludet {

// Unit-normalised tweet embeddings. Row r belongs to tweet tweet_of_row[r];
// tweets without an embedding are listed in `unassigned`.
struct EmbeddingMatrix {
  Matrix rows;
  std::vector<std::uint32_t> tweet_of_row;
  std::vector<std::uint32_t> unassigned;
};

// Collects the `embedding` arrays carried by the tweet records. When
// `fallback_dim` is set, tweets without one get hashed_embedding(text) of that
// width instead (and stay unassigned if the text has no tokens). Throws
// DataError on inconsistent widths or zero vectors.
EmbeddingMatrix load_embeddings(const HetNet& g,
                                std::optional<std::size_t> fallback_dim = std::nullopt);

// Same, reading a tweets file directly; tweet indices follow file order.
EmbeddingMatrix load_embeddings(const std::filesystem::path& tweets_path);

// Stand-in sentence embedding: signed feature hashing of lower-cased word
// tokens into `dim` buckets (FNV-1a), not normalised. Deterministic across
// platforms.
std::vector<double> hashed_embedding(const std::string& text, std::size_t dim);

struct KMeansOptions {
  std::size_t k = 1000;
  std::uint64_t seed = 0;
  std::size_t max_iter = 100;
  double tol = 1e-6;
};

struct TopicModel {
  Matrix centroids;  // k x d, unit rows
  std::vector<std::uint32_t> assignment;  // per embedding row
  // Mean cosine of rows to their centroid after each assignment step.
  std::vector<double> objective_trace;
  std::size_t iterations = 0;

  std::size_t k() const { return centroids.rows(); }
  double objective() const { return objective_trace.back(); }
};

// Lloyd iterations on the unit sphere with k-means++ seeding on cosine
// distance. An empty cluster is re-seeded with the row that is currently
// worst served by its own centroid.
TopicModel spherical_kmeans(const Matrix& rows, const KMeansOptions& options);

// Installs one Contains edge per embedded tweet and returns per-user counts.
TopicHistogram attach_topics(HetNet& g, const EmbeddingMatrix& emb, const TopicModel& model);

// Line-delimited {"tweet_id", "topic"}.
void write_topic_assignments(const std::filesystem::path& path, const HetNet& g,
                             const EmbeddingMatrix& emb, const TopicModel& model);

}  // namespace colludet

#endif  // COLLUDET_TOPICS_HPP_
