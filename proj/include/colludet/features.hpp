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

#ifndef COLLUDET_FEATURES_HPP_
#define COLLUDET_FEATURES_HPP_

#include <array>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "colludet/hetnet.hpp"
#include "colludet/tensor.hpp"

namespace colludet {

inline constexpr std::size_t kFeatureCount = 18;

inline constexpr std::array<const char*, kFeatureCount> kFeatureNames = {
    "follower_count",   "friend_count",     "status_count",     "favorite_count",
    "description_presence", "description_length", "url",       "location",
    "profile_image",    "background_image", "account_age_days", "account_entropy",
    "emojis_avg",       "retweet_ratio",    "urls_avg",         "mentions_avg",
    "words_avg",        "hashtags_avg"};

using FeatureVector = std::array<double, kFeatureCount>;

// sum_i c_i ln(c_i) over the years with c_i > 0.
double account_entropy(const std::map<int, std::int64_t>& year_counts);

// Raw metadata features of one user. Users without tweets get zero for the
// per-tweet averages and the retweet ratio.
FeatureVector extract_features(const HetNet& g, std::uint32_t user,
                               std::chrono::year_month_day now);

// Rows follow HetNet::labeled_users().
Matrix raw_feature_matrix(const HetNet& g, std::chrono::year_month_day now);

// Column z-scoring. Population statistics (divide by n) over the fitted rows;
// constant columns keep scale 1 and are only centred.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Matrix& raw, std::span<const std::size_t> rows);
  Matrix apply(const Matrix& raw) const;
};

struct FeatureMatrix {
  Matrix raw;
  Standardizer standardizer;
  Matrix standardized;
};

// Statistics come from `train_rows` only and are applied to every row.
FeatureMatrix build_feature_matrix(const HetNet& g, std::chrono::year_month_day now,
                                   std::span<const std::size_t> train_rows);

// Row-labelled CSV: header "user_id,<columns>", values printed with 17
// significant digits so a read-back is exact.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      std::span<const std::string> user_ids, std::span<const std::string> columns);
Matrix read_matrix_csv(const std::filesystem::path& path, std::vector<std::string>* user_ids = nullptr,
                       std::vector<std::string>* columns = nullptr);

// CSV with a header row (user_id, then the feature names in order).
void write_feature_csv(const std::filesystem::path& path, const Matrix& raw,
                       std::span<const std::string> user_ids);
Matrix read_feature_csv(const std::filesystem::path& path,
                        std::vector<std::string>* user_ids = nullptr);

}  // namespace colludet

#endif  // COLLUDET_FEATURES_HPP_
