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

#ifndef COLLUDET_EVALUATION_HPP_
#define COLLUDET_EVALUATION_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "colludet/decompose.hpp"
#include "colludet/detector.hpp"
#include "colludet/metrics.hpp"
#include "colludet/pipeline.hpp"

namespace colludet {

struct CvOptions {
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  std::vector<Relationship> relationships{kAllRelationships.begin(), kAllRelationships.end()};
  std::string variant = "full";
};

struct FoldMetrics {
  std::size_t fold = 0;
  std::size_t test_size = 0;
  double auc_roc = 0.0;       // collusive positive, score -(d^2 - r^2)
  double auc_pr = 0.0;        // collusive positive
  double f1 = 0.0;            // non-collusive positive (the reporting default)
  double f1_collusive = 0.0;  // collusive positive
  Confusion confusion;        // collusive positive
};

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single fold
};

struct EvalReport {
  std::string variant;
  std::vector<FoldMetrics> folds;
  MetricSummary auc_roc, auc_pr, f1, f1_collusive;
};

// Seeded shuffle of `rows`, dealt round-robin into `folds` groups.
std::vector<std::vector<std::size_t>> make_folds(std::span<const std::size_t> rows, std::size_t folds,
                                                 std::uint64_t seed);

// Each fold trains on the collusive users outside the fold and tests on the
// fold plus every non-collusive user. Features are standardised with the
// training rows of that fold.
EvalReport cross_validate(const Dataset& data, const TrainConfig& cfg, const CvOptions& options);

// One single-relationship variant per relationship, then the full model.
std::vector<EvalReport> ablation(const Dataset& data, const TrainConfig& cfg, CvOptions options);

struct LrSelection {
  double best = 0.0;
  std::vector<std::pair<double, double>> mean_auc;  // (learning rate, mean AUC-ROC)
};

// Picks the learning rate with the best mean cross-validated AUC-ROC on a
// tuning dataset (ties go to the earlier grid entry).
LrSelection select_learning_rate(const Dataset& tuning, TrainConfig cfg, std::span<const double> grid,
                                 const CvOptions& options);

// One-at-a-time sensitivity grid around the base configuration.
struct SweepGrid {
  std::vector<std::size_t> hidden{8, 16, 32, 64, 128};
  std::vector<std::size_t> attn_dim{32, 64, 128, 256};
  std::vector<std::size_t> heads{1, 2, 4, 6};
};

struct SweepRow {
  std::string parameter;  // "hidden", "attn_dim" or "heads"
  std::size_t value = 0;
  EvalReport report;
};

std::vector<SweepRow> sensitivity_sweep(const Dataset& data, const TrainConfig& base, const SweepGrid& grid,
                                        const CvOptions& options);

// {variant, fold, auc_roc, auc_pr, f1, f1_collusive} per fold.
void write_fold_records(const std::filesystem::path& path, std::span<const EvalReport> reports);
// {parameter, value, auc_roc_mean, auc_roc_std, auc_pr_mean, f1_mean, f1_collusive_mean}
void write_sweep(const std::filesystem::path& path, std::span<const SweepRow> rows);
std::string format_report_table(std::span<const EvalReport> reports);

}  // namespace colludet

#endif  // COLLUDET_EVALUATION_HPP_
