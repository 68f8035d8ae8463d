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

#include "colludet/metrics.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "colludet/error.hpp"

namespace colludet {

namespace {

void check_aligned(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw ShapeError(std::string(what) + ": scores and labels differ in length");
  if (a == 0) throw ShapeError(std::string(what) + ": empty input");
}

std::vector<std::size_t> order_by_score(std::span<const double> scores, bool descending) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return descending ? scores[a] > scores[b] : scores[a] < scores[b];
  });
  return idx;
}

}  // namespace

double auc_roc(std::span<const double> scores, std::span<const int> labels) {
  check_aligned(scores.size(), labels.size(), "auc_roc");
  const auto idx = order_by_score(scores, /*descending=*/false);
  std::int64_t neg_below = 0;
  std::int64_t twice_wins = 0;  // 2 * wins + ties, exact
  std::int64_t pos = 0;
  std::int64_t neg = 0;
  for (std::size_t g = 0; g < idx.size();) {
    std::size_t end = g;
    std::int64_t gp = 0, gn = 0;
    while (end < idx.size() && scores[idx[end]] == scores[idx[g]]) {
      (labels[idx[end]] == 1 ? gp : gn) += 1;
      ++end;
    }
    twice_wins += 2 * gp * neg_below + gp * gn;
    neg_below += gn;
    pos += gp;
    neg += gn;
    g = end;
  }
  if (pos == 0 || neg == 0) throw ShapeError("auc_roc: both classes must be present");
  return static_cast<double>(twice_wins) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

double auc_pr(std::span<const double> scores, std::span<const int> labels) {
  check_aligned(scores.size(), labels.size(), "auc_pr");
  const auto total_pos = std::count(labels.begin(), labels.end(), 1);
  if (total_pos == 0) throw ShapeError("auc_pr: no positive labels");
  const auto idx = order_by_score(scores, /*descending=*/true);
  double ap = 0.0;
  double prev_recall = 0.0;
  std::size_t tp = 0, seen = 0;
  for (std::size_t g = 0; g < idx.size();) {
    std::size_t end = g;
    while (end < idx.size() && scores[idx[end]] == scores[idx[g]]) {
      tp += labels[idx[end]] == 1;
      ++end;
    }
    seen = end;
    const double recall = static_cast<double>(tp) / static_cast<double>(total_pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(seen);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    g = end;
  }
  return ap;
}

Confusion confusion(std::span<const int> predicted, std::span<const int> truth, int positive) {
  check_aligned(predicted.size(), truth.size(), "confusion");
  Confusion c;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] == positive;
    const bool t = truth[i] == positive;
    if (p && t) ++c.tp;
    else if (p) ++c.fp;
    else if (t) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double f1_score(std::span<const int> predicted, std::span<const int> truth, int positive) {
  const Confusion c = confusion(predicted, truth, positive);
  if (c.tp == 0) return 0.0;
  const double precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  const double recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace colludet
