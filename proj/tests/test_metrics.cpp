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
#include "colludet/random.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace colludet;

namespace {

double brute_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double num = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (y[i] == 1 && y[j] == 0) {
        pairs += 1;
        num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
  return num / pairs;
}

}  // namespace

TEST_CASE("auc examples") {
  CHECK(auc_roc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, std::vector<int>{1, 1, 0, 0}) == 1.0);
  CHECK(auc_roc(std::vector<double>{0.5, 0.5, 0.5}, std::vector<int>{1, 0, 1}) == 0.5);
  CHECK(auc_roc(std::vector<double>{0.9, 0.8, 0.3}, std::vector<int>{1, 0, 1}) == 0.5);
}

TEST_CASE("auc equals the all-pairs count") {
  Rng rng(1);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 2 + rng.below(199);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = rep % 3 == 0 ? static_cast<double>(rng.below(5)) : rng.uniform();
      y[i] = rng.bernoulli(0.4) ? 1 : 0;
    }
    y[0] = 1;
    y[1] = 0;
    CHECK(auc_roc(s, y) == brute_auc(s, y));
  }
}

TEST_CASE("auc needs both classes") {
  CHECK_THROWS(auc_roc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}));
  CHECK_THROWS(auc_roc(std::vector<double>{0.1}, std::vector<int>{1, 0}));
}

TEST_CASE("average precision") {
  CHECK(auc_pr(std::vector<double>{4, 3, 2, 1}, std::vector<int>{1, 1, 0, 0}) == 1.0);
  for (std::size_t n : {2, 5, 10}) {
    std::vector<double> s(n);
    std::vector<int> y(n, 0);
    for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<double>(n - i);
    y[n - 1] = 1;
    CHECK(auc_pr(s, y) == doctest::Approx(1.0 / static_cast<double>(n)));
  }
  // Ranked list 1 0 1: precision 1 at the first hit, 2/3 at the second.
  CHECK(auc_pr(std::vector<double>{3, 2, 1}, std::vector<int>{1, 0, 1}) == doctest::Approx((1.0 + 2.0 / 3.0) / 2));
  // A tie between a positive and a negative is one step at precision 1/2.
  CHECK(auc_pr(std::vector<double>{1, 1}, std::vector<int>{1, 0}) == doctest::Approx(0.5));
}

TEST_CASE("average precision of random scores is near the prevalence") {
  Rng rng(2);
  double total = 0;
  const int seeds = 200;
  for (int rep = 0; rep < seeds; ++rep) {
    std::vector<double> s(200);
    std::vector<int> y(200);
    for (std::size_t i = 0; i < 200; ++i) {
      s[i] = rng.uniform();
      y[i] = static_cast<int>(i % 2);
    }
    total += auc_pr(s, y);
  }
  CHECK(total / seeds == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("f1") {
  const std::vector<int> truth{1, 0, 1, 0};
  CHECK(f1_score(truth, truth) == 1.0);
  CHECK(f1_score(std::vector<int>{1, 1, 1, 1}, truth) == doctest::Approx(2.0 / 3.0));
  CHECK(f1_score(std::vector<int>{0, 0, 0, 0}, truth) == 0.0);
  // With the other class as positive the same predictions score differently.
  const std::vector<int> pred{1, 1, 1, 0};
  CHECK(f1_score(pred, truth, 1) == doctest::Approx(0.8));
  CHECK(f1_score(pred, truth, 0) == doctest::Approx(2.0 / 3.0));
  const auto c = confusion(pred, truth, 1);
  CHECK(c.tp == 2);
  CHECK(c.fp == 1);
  CHECK(c.tn == 1);
  CHECK(c.fn == 0);
}
