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

#ifndef COLLUDET_HETNET_HPP_
#define COLLUDET_HETNET_HPP_

#include <chrono>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "colludet/csr.hpp"

namespace colludet {

enum class NodeKind : std::uint8_t { kUser, kTweet, kTopic };
enum class EdgeKind : std::uint8_t { kFollows, kPosts, kContains };

const char* to_string(NodeKind kind);
const char* to_string(EdgeKind kind);

struct NodeId {
  NodeKind kind = NodeKind::kUser;
  std::uint32_t index = 0;

  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

struct Edge {
  NodeId src;
  NodeId dst;
  EdgeKind kind = EdgeKind::kFollows;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class Label : std::int8_t { kUnknown = -1, kNonCollusive = 0, kCollusive = 1 };

struct UserRecord {
  std::string id;
  std::int64_t followers_count = 0;
  std::int64_t friends_count = 0;
  std::int64_t statuses_count = 0;
  std::int64_t favourites_count = 0;
  std::string description;
  bool url_in_description = false;
  bool location_present = false;
  bool profile_image = false;
  bool background_image = false;
  std::chrono::year_month_day created_at{};
  std::map<int, std::int64_t> tweet_year_counts;

  friend bool operator==(const UserRecord&, const UserRecord&) = default;
};

struct TweetRecord {
  std::string tweet_id;
  std::uint32_t author = 0;  // user index
  std::string text;
  bool is_retweet = false;
  std::int64_t n_emojis = 0;
  std::int64_t n_urls = 0;
  std::int64_t n_mentions = 0;
  std::int64_t n_words = 0;
  std::int64_t n_hashtags = 0;
  std::optional<std::vector<double>> embedding;

  friend bool operator==(const TweetRecord&, const TweetRecord&) = default;
};

// Directed user/tweet/topic network. Node indices are dense per kind and
// assigned in first-seen input order. Immutable after construction except
// for the topic layer, which `attach_topics` installs once clustering is done.
class HetNet {
 public:
  std::size_t user_count() const { return users_.size(); }
  std::size_t tweet_count() const { return tweets_.size(); }
  std::size_t topic_count() const { return topic_count_; }
  std::size_t node_count(NodeKind kind) const;
  std::size_t edge_count(EdgeKind kind) const { return out_[idx(kind)].nnz(); }

  // Ascending destination index. Throws std::out_of_range for unknown nodes.
  std::vector<NodeId> out_neighbors(NodeId v, EdgeKind kind) const;
  std::vector<NodeId> in_neighbors(NodeId v, EdgeKind kind) const;
  std::vector<Edge> edges(EdgeKind kind) const;

  // Raw adjacency: rows are source-kind indices, columns destination-kind.
  const Csr& out_adjacency(EdgeKind kind) const { return out_[idx(kind)]; }
  const Csr& in_adjacency(EdgeKind kind) const { return in_[idx(kind)]; }

  const UserRecord& user(std::uint32_t index) const { return users_.at(index); }
  const TweetRecord& tweet(std::uint32_t index) const { return tweets_.at(index); }
  const std::vector<UserRecord>& users() const { return users_; }
  const std::vector<TweetRecord>& tweets() const { return tweets_; }
  std::optional<std::uint32_t> find_user(const std::string& id) const;

  // Users that become subgraph endpoints, ascending user index.
  const std::vector<std::uint32_t>& labeled_users() const { return labeled_; }
  Label label(std::uint32_t user) const { return labels_.at(user); }
  // Position of `user` in labeled_users(), or -1.
  std::int64_t labeled_position(std::uint32_t user) const {
    return labeled_pos_.at(user);
  }
  const std::vector<std::int64_t>& labeled_positions() const { return labeled_pos_; }

  // Replaces the topic layer: one Contains edge per (tweet, topic) pair.
  void set_topics(std::size_t topic_count,
                  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& tweet_topic);

 private:
  friend class HetNetBuilder;
  static std::size_t idx(EdgeKind k) { return static_cast<std::size_t>(k); }
  void check_node(NodeId v) const;

  std::vector<UserRecord> users_;
  std::vector<TweetRecord> tweets_;
  std::size_t topic_count_ = 0;
  std::unordered_map<std::string, std::uint32_t> user_index_;
  std::vector<Label> labels_;
  std::vector<std::uint32_t> labeled_;
  std::vector<std::int64_t> labeled_pos_;
  Csr out_[3];
  Csr in_[3];
};

// Incremental construction; validation errors throw DataError.
class HetNetBuilder {
 public:
  std::uint32_t add_user(UserRecord record);
  // Duplicate follows collapse to one edge. Self-follows are rejected.
  void add_follow(const std::string& src, const std::string& dst);
  std::uint32_t add_tweet(const std::string& author, TweetRecord record);
  void set_label(const std::string& user, Label label);

  // Without any set_label call, every user is an endpoint with unknown label.
  HetNet build() &&;

 private:
  std::uint32_t require_user(const std::string& id) const;

  HetNet net_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> follows_;
  std::unordered_map<std::string, std::uint32_t> tweet_index_;
  bool any_label_ = false;
};

struct DatasetPaths {
  std::filesystem::path users;
  std::filesystem::path follows;
  std::filesystem::path tweets;
  std::optional<std::filesystem::path> labels;
};

HetNet load_hetnet(const DatasetPaths& paths);

// Writes `g` in the formats load_hetnet reads; labels only when the path is
// set and the graph carries labels.
void save_hetnet(const HetNet& g, const DatasetPaths& paths);

std::chrono::year_month_day parse_date(const std::string& text);
std::string format_date(std::chrono::year_month_day date);

}  // namespace colludet

#endif  // COLLUDET_HETNET_HPP_
