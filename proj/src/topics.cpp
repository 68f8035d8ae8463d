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

#include "colludet/topics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "colludet/error.hpp"
#include "colludet/jsonl.hpp"
#include "colludet/kernels.hpp"
#include "colludet/random.hpp"

namespace colludet {

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

struct PendingRow {
  std::uint32_t tweet;
  std::vector<double> values;
  std::string label;  // for error messages
};

EmbeddingMatrix pack(std::vector<PendingRow> pending, std::vector<std::uint32_t> unassigned) {
  EmbeddingMatrix out;
  out.unassigned = std::move(unassigned);
  if (pending.empty()) return out;
  const std::size_t dim = pending.front().values.size();
  out.rows = Matrix(pending.size(), dim);
  for (std::size_t r = 0; r < pending.size(); ++r) {
    const auto& p = pending[r];
    if (p.values.size() != dim)
      throw DataError("embedding of tweet '" + p.label + "' has dimension " +
                      std::to_string(p.values.size()) + ", expected " + std::to_string(dim));
    const double n = norm(p.values);
    if (!std::isfinite(n)) throw DataError("embedding of tweet '" + p.label + "' is not finite");
    if (n == 0.0) throw DataError("embedding of tweet '" + p.label + "' has zero norm");
    for (std::size_t c = 0; c < dim; ++c) out.rows(r, c) = p.values[c] / n;
    out.tweet_of_row.push_back(p.tweet);
  }
  return out;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::vector<double> hashed_embedding(const std::string& text, std::size_t dim) {
  std::vector<double> out(dim, 0.0);
  if (dim == 0) return out;
  std::string token;
  const auto flush = [&] {
    if (token.empty()) return;
    const std::uint64_t h = fnv1a(token);
    out[h % dim] += (h >> 63) ? -1.0 : 1.0;
    token.clear();
  };
  for (unsigned char c : text) {
    // Bytes >= 0x80 belong to multi-byte UTF-8 sequences and stay in tokens.
    if (c >= 0x80 || std::isalnum(c)) {
      token.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

EmbeddingMatrix load_embeddings(const HetNet& g, std::optional<std::size_t> fallback_dim) {
  std::vector<PendingRow> pending;
  std::vector<std::uint32_t> unassigned;
  for (std::uint32_t t = 0; t < g.tweet_count(); ++t) {
    const TweetRecord& tw = g.tweet(t);
    if (tw.embedding) {
      pending.push_back({t, *tw.embedding, tw.tweet_id});
    } else if (fallback_dim) {
      auto v = hashed_embedding(tw.text, *fallback_dim);
      if (norm(v) > 0.0)
        pending.push_back({t, std::move(v), tw.tweet_id});
      else
        unassigned.push_back(t);
    } else {
      unassigned.push_back(t);
    }
  }
  return pack(std::move(pending), std::move(unassigned));
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& tweets_path) {
  std::vector<PendingRow> pending;
  std::vector<std::uint32_t> unassigned;
  std::uint32_t t = 0;
  jsonl::for_each(tweets_path, [&](const jsonl::Json& j, std::size_t) {
    const auto id = jsonl::field<std::string>(j, "tweet_id");
    auto it = j.find("embedding");
    if (it != j.end() && !it->is_null()) {
      std::vector<double> v;
      try {
        v = it->get<std::vector<double>>();
      } catch (const jsonl::Json::exception&) {
        throw DataError("embedding of tweet '" + id + "' is not a numeric array");
      }
      pending.push_back({t, std::move(v), id});
    } else {
      unassigned.push_back(t);
    }
    ++t;
  });
  return pack(std::move(pending), std::move(unassigned));
}

TopicModel spherical_kmeans(const Matrix& rows, const KMeansOptions& options) {
  const std::size_t n = rows.rows();
  const std::size_t d = rows.cols();
  const std::size_t k = options.k;
  if (k == 0) throw ShapeError("spherical_kmeans: k must be at least 1");
  if (k > n)
    throw ShapeError("spherical_kmeans: k = " + std::to_string(k) + " exceeds " +
                     std::to_string(n) + " rows");

  Rng rng(options.seed);
  TopicModel model;
  model.centroids = Matrix(k, d);

  // k-means++ on 1 - cos, which is half the squared chord distance.
  std::vector<double> closest(n, -1.0);
  std::size_t pick = rng.below(n);
  for (std::size_t c = 0; c < k; ++c) {
    if (c > 0) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) total += std::max(0.0, 1.0 - closest[i]);
      if (total > 0.0) {
        double target = rng.uniform() * total;
        pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
          target -= std::max(0.0, 1.0 - closest[i]);
          if (target < 0.0) {
            pick = i;
            break;
          }
        }
      } else {
        pick = rng.below(n);
      }
    }
    std::copy_n(rows.row(pick).begin(), d, model.centroids.row(c).begin());
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += rows(i, j) * model.centroids(c, j);
      closest[i] = std::max(closest[i], s);
    }
  }

  std::vector<std::uint32_t> assign;
  std::vector<double> best;
  kernels::parallel::cosine_assign(rows, model.centroids, assign, best);
  const auto mean_of = [n](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
  };
  model.objective_trace.push_back(mean_of(best));

  Matrix sums(k, d);
  std::vector<std::uint32_t> next;
  for (std::size_t it = 0; it < options.max_iter; ++it) {
    sums.fill(0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) sums(assign[i], j) += rows(i, j);

    std::vector<bool> taken(n, false);
    for (std::size_t c = 0; c < k; ++c) {
      const double len = norm(sums.row(c));
      if (len > 1e-12) {
        for (std::size_t j = 0; j < d; ++j) model.centroids(c, j) = sums(c, j) / len;
        continue;
      }
      // Empty (or cancelled-out) cluster.
      std::size_t worst = n;
      for (std::size_t i = 0; i < n; ++i)
        if (!taken[i] && (worst == n || best[i] < best[worst])) worst = i;
      taken[worst] = true;
      std::copy_n(rows.row(worst).begin(), d, model.centroids.row(c).begin());
    }

    kernels::parallel::cosine_assign(rows, model.centroids, next, best);
    std::size_t changes = 0;
    for (std::size_t i = 0; i < n; ++i) changes += next[i] != assign[i];
    assign.swap(next);
    const double prev = model.objective_trace.back();
    model.objective_trace.push_back(mean_of(best));
    model.iterations = it + 1;
    if (changes == 0 || model.objective_trace.back() - prev < options.tol) break;
  }
  model.assignment = std::move(assign);
  return model;
}

TopicHistogram attach_topics(HetNet& g, const EmbeddingMatrix& emb, const TopicModel& model) {
  if (model.assignment.size() != emb.tweet_of_row.size())
    throw ShapeError("attach_topics: model and embeddings disagree on row count");
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(emb.tweet_of_row.size());
  for (std::size_t r = 0; r < emb.tweet_of_row.size(); ++r)
    pairs.emplace_back(emb.tweet_of_row[r], model.assignment[r]);
  g.set_topics(model.k(), pairs);

  TopicHistogram hist;
  hist.n_topics = model.k();
  hist.rows.resize(g.user_count());
  std::vector<std::uint32_t> counts(model.k(), 0);
  const Csr& posts = g.out_adjacency(EdgeKind::kPosts);
  const Csr& contains = g.out_adjacency(EdgeKind::kContains);
  std::vector<std::uint32_t> touched;
  for (std::size_t u = 0; u < g.user_count(); ++u) {
    touched.clear();
    for (auto t : posts.neighbors(u))
      for (auto topic : contains.neighbors(t))
        if (counts[topic]++ == 0) touched.push_back(topic);
    std::sort(touched.begin(), touched.end());
    for (auto topic : touched) {
      hist.rows[u].emplace_back(topic, counts[topic]);
      counts[topic] = 0;
    }
  }
  return hist;
}

void write_topic_assignments(const std::filesystem::path& path, const HetNet& g,
                             const EmbeddingMatrix& emb, const TopicModel& model) {
  jsonl::Writer w(path);
  for (std::size_t r = 0; r < emb.tweet_of_row.size(); ++r)
    w.write({{"tweet_id", g.tweet(emb.tweet_of_row[r]).tweet_id},
             {"topic", model.assignment[r]}});
}

}  // namespace colludet
