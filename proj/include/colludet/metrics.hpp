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

#ifndef COLLUDET_METRICS_HPP_
#define COLLUDET_METRICS_HPP_

#include <cstddef>
#include <span>

namespace colludet {

// Mann-Whitney AUC: P(score_pos > score_neg) + P(equal) / 2. `labels` holds
// 1 for the positive class and 0 otherwise. Throws ShapeError unless both
// classes are present.
double auc_roc(std::span<const double> scores, std::span<const int> labels);

// Average precision: sum over distinct score thresholds (descending, ties
// grouped) of (R_k - R_{k-1}) P_k.
double auc_pr(std::span<const double> scores, std::span<const int> labels);

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
};

Confusion confusion(std::span<const int> predicted, std::span<const int> truth,
                    int positive = 1);

// F1 of the class `positive`; 0 when nothing is predicted positive.
double f1_score(std::span<const int> predicted, std::span<const int> truth, int positive = 1);

}  // namespace colludet

#endif  // COLLUDET_METRICS_HPP_
