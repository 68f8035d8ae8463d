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

#include "colludet/hetnet.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <stdexcept>

#include "colludet/error.hpp"
#include "colludet/jsonl.hpp"

namespace colludet {

namespace {

std::size_t kind_count(NodeKind kind, const HetNet& g) {
  switch (kind) {
    case NodeKind::kUser:
      return g.user_count();
    case NodeKind::kTweet:
      return g.tweet_count();
    case NodeKind::kTopic:
      return g.topic_count();
  }
  return 0;
}

NodeKind source_kind(EdgeKind kind) {
  return kind == EdgeKind::kContains ? NodeKind::kTweet : NodeKind::kUser;
}

NodeKind target_kind(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::kFollows:
      return NodeKind::kUser;
    case EdgeKind::kPosts:
      return NodeKind::kTweet;
    case EdgeKind::kContains:
      return NodeKind::kTopic;
  }
  return NodeKind::kUser;
}

std::vector<NodeId> to_nodes(NodeKind kind, std::span<const std::uint32_t> idx) {
  std::vector<NodeId> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back({kind, i});
  return out;
}

}  // namespace

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::kUser:
      return "user";
    case NodeKind::kTweet:
      return "tweet";
    case NodeKind::kTopic:
      return "topic";
  }
  return "?";
}

const char* to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::kFollows:
      return "follows";
    case EdgeKind::kPosts:
      return "posts";
    case EdgeKind::kContains:
      return "contains";
  }
  return "?";
}

std::size_t HetNet::node_count(NodeKind kind) const { return kind_count(kind, *this); }

void HetNet::check_node(NodeId v) const {
  if (v.index >= node_count(v.kind)) {
    throw std::out_of_range(std::string("unknown ") + to_string(v.kind) + " node " +
                            std::to_string(v.index));
  }
}

std::vector<NodeId> HetNet::out_neighbors(NodeId v, EdgeKind kind) const {
  check_node(v);
  if (v.kind != source_kind(kind)) return {};
  return to_nodes(target_kind(kind), out_[idx(kind)].neighbors(v.index));
}

std::vector<NodeId> HetNet::in_neighbors(NodeId v, EdgeKind kind) const {
  check_node(v);
  if (v.kind != target_kind(kind)) return {};
  return to_nodes(source_kind(kind), in_[idx(kind)].neighbors(v.index));
}

std::vector<Edge> HetNet::edges(EdgeKind kind) const {
  const Csr& adj = out_[idx(kind)];
  std::vector<Edge> out;
  out.reserve(adj.nnz());
  for (std::size_t r = 0; r < adj.n_rows; ++r) {
    for (auto c : adj.neighbors(r)) {
      out.push_back({{source_kind(kind), static_cast<std::uint32_t>(r)},
                     {target_kind(kind), c},
                     kind});
    }
  }
  return out;
}

std::optional<std::uint32_t> HetNet::find_user(const std::string& id) const {
  auto it = user_index_.find(id);
  if (it == user_index_.end()) return std::nullopt;
  return it->second;
}

void HetNet::set_topics(
    std::size_t topic_count,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& tweet_topic) {
  std::vector<bool> seen(tweets_.size(), false);
  for (const auto& [t, k] : tweet_topic) {
    if (t >= tweets_.size() || k >= topic_count)
      throw std::out_of_range("set_topics: tweet or topic out of range");
    if (seen[t]) throw DataError("set_topics: tweet assigned twice");
    seen[t] = true;
  }
  topic_count_ = topic_count;
  const auto c = idx(EdgeKind::kContains);
  out_[c] = Csr::from_pairs(tweets_.size(), topic_count, tweet_topic);
  in_[c] = out_[c].transposed();
}

std::uint32_t HetNetBuilder::require_user(const std::string& id) const {
  auto it = net_.user_index_.find(id);
  if (it == net_.user_index_.end()) throw DataError("unknown user id '" + id + "'");
  return it->second;
}

std::uint32_t HetNetBuilder::add_user(UserRecord record) {
  const auto index = static_cast<std::uint32_t>(net_.users_.size());
  if (!net_.user_index_.emplace(record.id, index).second)
    throw DataError("duplicate user id '" + record.id + "'");
  net_.users_.push_back(std::move(record));
  net_.labels_.push_back(Label::kUnknown);
  return index;
}

void HetNetBuilder::add_follow(const std::string& src, const std::string& dst) {
  const auto s = require_user(src);
  const auto d = require_user(dst);
  if (s == d) throw DataError("self-follow by '" + src + "'");
  follows_.emplace_back(s, d);
}

std::uint32_t HetNetBuilder::add_tweet(const std::string& author, TweetRecord record) {
  record.author = require_user(author);
  const auto index = static_cast<std::uint32_t>(net_.tweets_.size());
  if (!tweet_index_.emplace(record.tweet_id, index).second)
    throw DataError("duplicate tweet id '" + record.tweet_id + "'");
  net_.tweets_.push_back(std::move(record));
  return index;
}

void HetNetBuilder::set_label(const std::string& user, Label label) {
  net_.labels_[require_user(user)] = label;
  any_label_ = true;
}

HetNet HetNetBuilder::build() && {
  HetNet g = std::move(net_);
  const std::size_t nu = g.users_.size();
  const std::size_t nt = g.tweets_.size();

  const auto f = HetNet::idx(EdgeKind::kFollows);
  g.out_[f] = Csr::from_pairs(nu, nu, std::move(follows_));
  g.in_[f] = g.out_[f].transposed();

  std::vector<std::pair<std::uint32_t, std::uint32_t>> posts;
  posts.reserve(nt);
  for (std::uint32_t t = 0; t < nt; ++t) posts.emplace_back(g.tweets_[t].author, t);
  const auto p = HetNet::idx(EdgeKind::kPosts);
  g.out_[p] = Csr::from_pairs(nu, nt, std::move(posts));
  g.in_[p] = g.out_[p].transposed();

  const auto c = HetNet::idx(EdgeKind::kContains);
  g.out_[c] = Csr::from_pairs(nt, 0, {});
  g.in_[c] = Csr::from_pairs(0, nt, {});

  g.labeled_pos_.assign(nu, -1);
  for (std::uint32_t u = 0; u < nu; ++u) {
    if (any_label_ && g.labels_[u] == Label::kUnknown) continue;
    g.labeled_pos_[u] = static_cast<std::int64_t>(g.labeled_.size());
    g.labeled_.push_back(u);
  }
  return g;
}

std::chrono::year_month_day parse_date(const std::string& text) {
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = 0;
  const int got = std::sscanf(text.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail);
  const bool tail_ok = got == 3 || (got == 4 && (tail == 'T' || tail == ' '));
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                  std::chrono::day{d}};
  if (got < 3 || !tail_ok || !ymd.ok()) throw DataError("invalid date '" + text + "'");
  return ymd;
}

std::string format_date(std::chrono::year_month_day date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

namespace {

using jsonl::field;
using jsonl::Json;

UserRecord parse_user(const Json& j) {
  UserRecord u;
  u.id = field<std::string>(j, "id");
  u.followers_count = field<std::int64_t>(j, "followers_count");
  u.friends_count = field<std::int64_t>(j, "friends_count");
  u.statuses_count = field<std::int64_t>(j, "statuses_count");
  u.favourites_count = field<std::int64_t>(j, "favourites_count");
  u.description = field<std::string>(j, "description");
  u.url_in_description = field<bool>(j, "url_in_description");
  u.location_present = field<bool>(j, "location_present");
  u.profile_image = field<bool>(j, "profile_image");
  u.background_image = field<bool>(j, "background_image");
  u.created_at = parse_date(field<std::string>(j, "created_at"));
  const Json years = field<Json>(j, "tweet_year_counts");
  if (!years.is_object()) throw DataError("tweet_year_counts must be an object");
  for (const auto& [year, count] : years.items()) {
    int y = 0;
    auto [ptr, ec] = std::from_chars(year.data(), year.data() + year.size(), y);
    if (ec != std::errc() || ptr != year.data() + year.size())
      throw DataError("tweet_year_counts: bad year '" + year + "'");
    if (!count.is_number_integer() || count.get<std::int64_t>() < 0)
      throw DataError("tweet_year_counts: bad count for " + year);
    u.tweet_year_counts[y] = count.get<std::int64_t>();
  }
  for (auto c : {u.followers_count, u.friends_count, u.statuses_count, u.favourites_count})
    if (c < 0) throw DataError("negative count for user '" + u.id + "'");
  return u;
}

TweetRecord parse_tweet(const Json& j) {
  TweetRecord t;
  t.tweet_id = field<std::string>(j, "tweet_id");
  t.text = field<std::string>(j, "text");
  t.is_retweet = field<bool>(j, "is_retweet");
  t.n_emojis = field<std::int64_t>(j, "n_emojis");
  t.n_urls = field<std::int64_t>(j, "n_urls");
  t.n_mentions = field<std::int64_t>(j, "n_mentions");
  t.n_words = field<std::int64_t>(j, "n_words");
  t.n_hashtags = field<std::int64_t>(j, "n_hashtags");
  for (auto c : {t.n_emojis, t.n_urls, t.n_mentions, t.n_words, t.n_hashtags})
    if (c < 0) throw DataError("negative count in tweet '" + t.tweet_id + "'");
  auto it = j.find("embedding");
  if (it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw DataError("embedding must be an array");
    std::vector<double> e;
    e.reserve(it->size());
    for (const auto& v : *it) {
      if (!v.is_number()) throw DataError("embedding entries must be numbers");
      e.push_back(v.get<double>());
    }
    t.embedding = std::move(e);
  }
  return t;
}

Label parse_label(const Json& v) {
  if (v.is_number_integer()) {
    const auto i = v.get<int>();
    if (i == 1) return Label::kCollusive;
    if (i == 0) return Label::kNonCollusive;
  } else if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "collusive") return Label::kCollusive;
    if (s == "non-collusive" || s == "noncollusive") return Label::kNonCollusive;
  }
  throw DataError("label must be 1/0 or \"collusive\"/\"non-collusive\"");
}

}  // namespace

HetNet load_hetnet(const DatasetPaths& paths) {
  HetNetBuilder b;
  jsonl::for_each(paths.users, [&](const Json& j, std::size_t) { b.add_user(parse_user(j)); });
  jsonl::for_each(paths.follows, [&](const Json& j, std::size_t) {
    b.add_follow(field<std::string>(j, "src"), field<std::string>(j, "dst"));
  });
  jsonl::for_each(paths.tweets, [&](const Json& j, std::size_t) {
    b.add_tweet(field<std::string>(j, "user"), parse_tweet(j));
  });
  if (paths.labels) {
    jsonl::for_each(*paths.labels, [&](const Json& j, std::size_t) {
      b.set_label(field<std::string>(j, "user_id"), parse_label(field<Json>(j, "label")));
    });
  }
  return std::move(b).build();
}

void save_hetnet(const HetNet& g, const DatasetPaths& paths) {
  {
    jsonl::Writer w(paths.users);
    for (const auto& u : g.users()) {
      Json years = Json::object();
      for (const auto& [y, c] : u.tweet_year_counts) years[std::to_string(y)] = c;
      w.write({{"id", u.id},
               {"followers_count", u.followers_count},
               {"friends_count", u.friends_count},
               {"statuses_count", u.statuses_count},
               {"favourites_count", u.favourites_count},
               {"description", u.description},
               {"url_in_description", u.url_in_description},
               {"location_present", u.location_present},
               {"profile_image", u.profile_image},
               {"background_image", u.background_image},
               {"created_at", format_date(u.created_at)},
               {"tweet_year_counts", years}});
    }
  }
  {
    jsonl::Writer w(paths.follows);
    for (const auto& e : g.edges(EdgeKind::kFollows))
      w.write({{"src", g.user(e.src.index).id}, {"dst", g.user(e.dst.index).id}});
  }
  {
    jsonl::Writer w(paths.tweets);
    for (const auto& t : g.tweets()) {
      Json j = {{"user", g.user(t.author).id},
                {"tweet_id", t.tweet_id},
                {"text", t.text},
                {"is_retweet", t.is_retweet},
                {"n_emojis", t.n_emojis},
                {"n_urls", t.n_urls},
                {"n_mentions", t.n_mentions},
                {"n_words", t.n_words},
                {"n_hashtags", t.n_hashtags}};
      if (t.embedding) j["embedding"] = *t.embedding;
      w.write(j);
    }
  }
  if (paths.labels) {
    jsonl::Writer w(*paths.labels);
    for (std::uint32_t u = 0; u < g.user_count(); ++u) {
      const Label l = g.label(u);
      if (l == Label::kUnknown) continue;
      w.write({{"user_id", g.user(u).id}, {"label", static_cast<int>(l)}});
    }
  }
}

}  // namespace colludet
