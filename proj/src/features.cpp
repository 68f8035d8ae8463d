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

#include "colludet/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "colludet/error.hpp"

namespace colludet {

namespace {

double flag(bool b) { return b ? 1.0 : 0.0; }

std::size_t utf8_length(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

}  // namespace

double account_entropy(const std::map<int, std::int64_t>& year_counts) {
  double h = 0.0;
  for (const auto& [year, c] : year_counts)
    if (c > 0) h += static_cast<double>(c) * std::log(static_cast<double>(c));
  return h;
}

FeatureVector extract_features(const HetNet& g, std::uint32_t user,
                               std::chrono::year_month_day now) {
  const UserRecord& u = g.user(user);
  const auto age = std::chrono::sys_days(now) - std::chrono::sys_days(u.created_at);
  if (age.count() < 0)
    throw DataError("user '" + u.id + "' created after the reference date");

  double retweets = 0, emojis = 0, urls = 0, mentions = 0, words = 0, hashtags = 0;
  const auto posted = g.out_adjacency(EdgeKind::kPosts).neighbors(user);
  for (auto t : posted) {
    const TweetRecord& tw = g.tweet(t);
    retweets += flag(tw.is_retweet);
    emojis += static_cast<double>(tw.n_emojis);
    urls += static_cast<double>(tw.n_urls);
    mentions += static_cast<double>(tw.n_mentions);
    words += static_cast<double>(tw.n_words);
    hashtags += static_cast<double>(tw.n_hashtags);
  }
  const double n = static_cast<double>(posted.size());
  const auto avg = [n](double total) { return n > 0 ? total / n : 0.0; };

  return {static_cast<double>(u.followers_count),
          static_cast<double>(u.friends_count),
          static_cast<double>(u.statuses_count),
          static_cast<double>(u.favourites_count),
          flag(!u.description.empty()),
          static_cast<double>(utf8_length(u.description)),
          flag(u.url_in_description),
          flag(u.location_present),
          flag(u.profile_image),
          flag(u.background_image),
          static_cast<double>(age.count()),
          account_entropy(u.tweet_year_counts),
          avg(emojis),
          avg(retweets),
          avg(urls),
          avg(mentions),
          avg(words),
          avg(hashtags)};
}

Matrix raw_feature_matrix(const HetNet& g, std::chrono::year_month_day now) {
  const auto& users = g.labeled_users();
  Matrix out(users.size(), kFeatureCount);
  // Extraction is per-user and independent; errors are collected after the
  // loop since exceptions cannot leave an OpenMP region.
  std::vector<std::string> errors(users.size());
  const auto n = static_cast<std::ptrdiff_t>(users.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const auto f = extract_features(g, users[i], now);
      std::copy(f.begin(), f.end(), out.row(i).begin());
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw DataError(e);
  return out;
}

Standardizer Standardizer::fit(const Matrix& raw, std::span<const std::size_t> rows) {
  if (rows.empty()) throw ShapeError("Standardizer::fit: no rows");
  Standardizer s;
  s.mean.assign(raw.cols(), 0.0);
  s.scale.assign(raw.cols(), 1.0);
  const double n = static_cast<double>(rows.size());
  for (std::size_t c = 0; c < raw.cols(); ++c) {
    double sum = 0.0;
    for (auto r : rows) sum += raw(r, c);
    const double mean = sum / n;
    double ss = 0.0;
    for (auto r : rows) ss += (raw(r, c) - mean) * (raw(r, c) - mean);
    const double sd = std::sqrt(ss / n);
    s.mean[c] = mean;
    // Relative threshold so a column of large identical counts still counts
    // as constant.
    if (sd > 1e-12 * std::max(1.0, std::abs(mean))) {
      s.scale[c] = sd;
    } else {
      const char* name = c < kFeatureNames.size() ? kFeatureNames[c] : "?";
      spdlog::warn("feature column {} ({}) is constant on the training rows", c, name);
    }
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& raw) const {
  if (raw.cols() != mean.size()) throw ShapeError("Standardizer::apply: width mismatch");
  Matrix out(raw.rows(), raw.cols());
  for (std::size_t r = 0; r < raw.rows(); ++r)
    for (std::size_t c = 0; c < raw.cols(); ++c) out(r, c) = (raw(r, c) - mean[c]) / scale[c];
  return out;
}

FeatureMatrix build_feature_matrix(const HetNet& g, std::chrono::year_month_day now,
                                   std::span<const std::size_t> train_rows) {
  FeatureMatrix fm;
  fm.raw = raw_feature_matrix(g, now);
  fm.standardizer = Standardizer::fit(fm.raw, train_rows);
  fm.standardized = fm.standardizer.apply(fm.raw);
  return fm;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      std::span<const std::string> user_ids, std::span<const std::string> columns) {
  if (user_ids.size() != m.rows()) throw ShapeError("write_matrix_csv: id count mismatch");
  if (columns.size() != m.cols()) throw ShapeError("write_matrix_csv: column count mismatch");
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "user_id";
  for (const auto& c : columns) out << ',' << c;
  out << '\n';
  char buf[32];
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (user_ids[r].find_first_of(",\n\"") != std::string::npos)
      throw DataError("user id '" + user_ids[r] + "' cannot be written to CSV");
    out << user_ids[r];
    for (std::size_t c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

Matrix read_matrix_csv(const std::filesystem::path& path, std::vector<std::string>* user_ids,
                       std::vector<std::string>* columns) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  const std::size_t width = header.size();
  std::vector<double> values;
  std::vector<std::string> ids;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    ids.push_back(cell);
    std::size_t cols = 0;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": bad number");
      values.push_back(v);
      ++cols;
    }
    if (cols != width)
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": wrong column count");
  }
  Matrix out(ids.size(), width);
  std::copy(values.begin(), values.end(), out.flat().begin());
  if (user_ids) *user_ids = std::move(ids);
  if (columns) *columns = std::move(header);
  return out;
}

void write_feature_csv(const std::filesystem::path& path, const Matrix& raw,
                       std::span<const std::string> user_ids) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < raw.cols(); ++c)
    names.push_back(c < kFeatureNames.size() ? std::string(kFeatureNames[c]) : "f" + std::to_string(c));
  write_matrix_csv(path, raw, user_ids, names);
}

Matrix read_feature_csv(const std::filesystem::path& path, std::vector<std::string>* user_ids) {
  std::vector<std::string> columns;
  Matrix m = read_matrix_csv(path, user_ids, &columns);
  if (m.cols() != kFeatureCount) throw DataError(path.string() + ": expected " + std::to_string(kFeatureCount) + " feature columns");
  return m;
}

}  // namespace colludet
