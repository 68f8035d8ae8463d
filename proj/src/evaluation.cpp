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

#include "colludet/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <spdlog/spdlog.h>

#include "colludet/error.hpp"
#include "colludet/features.hpp"
#include "colludet/jsonl.hpp"
#include "colludet/random.hpp"

namespace colludet {

namespace {

MetricSummary summarize(const std::vector<FoldMetrics>& folds, double FoldMetrics::*field) {
  MetricSummary s;
  if (folds.empty()) return s;
  for (const auto& f : folds) s.mean += f.*field;
  s.mean /= static_cast<double>(folds.size());
  if (folds.size() > 1) {
    double ss = 0.0;
    for (const auto& f : folds) ss += (f.*field - s.mean) * (f.*field - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(folds.size() - 1));
  }
  return s;
}

}  // namespace

std::vector<std::vector<std::size_t>> make_folds(std::span<const std::size_t> rows, std::size_t folds,
                                                 std::uint64_t seed) {
  if (folds == 0) throw ShapeError("make_folds: folds must be at least 1");
  if (folds > rows.size())
    throw ShapeError("make_folds: " + std::to_string(folds) + " folds for " + std::to_string(rows.size()) +
                     " collusive users");
  std::vector<std::size_t> order(rows.begin(), rows.end());
  Rng rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  std::vector<std::vector<std::size_t>> out(folds);
  for (std::size_t i = 0; i < order.size(); ++i) out[i % folds].push_back(order[i]);
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

EvalReport cross_validate(const Dataset& data, const TrainConfig& cfg, const CvOptions& options) {
  const auto collusive = data.rows_with(Label::kCollusive);
  const auto organic = data.rows_with(Label::kNonCollusive);
  if (organic.empty()) throw DataError("cross_validate: no non-collusive users to test against");
  const auto folds = make_folds(collusive, options.folds, options.seed);
  const auto ops = data.operators(options.relationships);

  EvalReport report;
  report.variant = options.variant;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<bool> held(data.size(), false);
    for (auto r : folds[f]) held[r] = true;
    std::vector<std::size_t> train_rows;
    for (auto r : collusive)
      if (!held[r]) train_rows.push_back(r);
    if (train_rows.empty()) throw DataError("cross_validate: a fold leaves no training users");

    const auto standardizer = Standardizer::fit(data.raw_features, train_rows);
    const Matrix x = standardizer.apply(data.raw_features);
    const auto trained = train(ops, x, train_rows, cfg);
    const auto scores = score(ops, x, trained.params, trained.sphere);

    std::vector<std::size_t> test_rows = folds[f];
    test_rows.insert(test_rows.end(), organic.begin(), organic.end());
    std::vector<double> s;
    std::vector<int> truth, predicted;
    for (auto r : test_rows) {
      s.push_back(-scores[r].margin);
      truth.push_back(data.labels[r] == Label::kCollusive ? 1 : 0);
      predicted.push_back(scores[r].collusive ? 1 : 0);
    }
    FoldMetrics m;
    m.fold = f;
    m.test_size = test_rows.size();
    m.auc_roc = auc_roc(s, truth);
    m.auc_pr = auc_pr(s, truth);
    m.f1 = f1_score(predicted, truth, 0);
    m.f1_collusive = f1_score(predicted, truth, 1);
    m.confusion = confusion(predicted, truth, 1);
    spdlog::info("{} fold {}/{}: auc_roc {:.4f} auc_pr {:.4f} f1 {:.4f}", options.variant, f + 1,
                 folds.size(), m.auc_roc, m.auc_pr, m.f1);
    report.folds.push_back(m);
  }
  report.auc_roc = summarize(report.folds, &FoldMetrics::auc_roc);
  report.auc_pr = summarize(report.folds, &FoldMetrics::auc_pr);
  report.f1 = summarize(report.folds, &FoldMetrics::f1);
  report.f1_collusive = summarize(report.folds, &FoldMetrics::f1_collusive);
  return report;
}

std::vector<EvalReport> ablation(const Dataset& data, const TrainConfig& cfg, CvOptions options) {
  std::vector<EvalReport> out;
  for (auto rel : kAllRelationships) {
    options.relationships = {rel};
    options.variant = relationship_name(rel);
    out.push_back(cross_validate(data, cfg, options));
  }
  options.relationships.assign(kAllRelationships.begin(), kAllRelationships.end());
  options.variant = "full";
  out.push_back(cross_validate(data, cfg, options));
  return out;
}

LrSelection select_learning_rate(const Dataset& tuning, TrainConfig cfg, std::span<const double> grid,
                                 const CvOptions& options) {
  if (grid.empty()) throw ShapeError("select_learning_rate: empty grid");
  LrSelection sel;
  double best_auc = -1.0;
  for (double lr : grid) {
    cfg.learning_rate = lr;
    CvOptions o = options;
    o.variant = "lr=" + std::to_string(lr);
    const double auc = cross_validate(tuning, cfg, o).auc_roc.mean;
    sel.mean_auc.emplace_back(lr, auc);
    if (auc > best_auc) {
      best_auc = auc;
      sel.best = lr;
    }
  }
  return sel;
}

std::vector<SweepRow> sensitivity_sweep(const Dataset& data, const TrainConfig& base, const SweepGrid& grid,
                                        const CvOptions& options) {
  std::vector<SweepRow> rows;
  const auto run = [&](const char* parameter, std::size_t value, TrainConfig cfg) {
    CvOptions o = options;
    o.variant = std::string(parameter) + "=" + std::to_string(value);
    rows.push_back({parameter, value, cross_validate(data, cfg, o)});
  };
  for (auto v : grid.hidden) {
    TrainConfig c = base;
    c.hidden = v;
    run("hidden", v, c);
  }
  for (auto v : grid.attn_dim) {
    TrainConfig c = base;
    c.attn_dim = v;
    run("attn_dim", v, c);
  }
  for (auto v : grid.heads) {
    TrainConfig c = base;
    c.heads = v;
    run("heads", v, c);
  }
  return rows;
}

void write_fold_records(const std::filesystem::path& path, std::span<const EvalReport> reports) {
  jsonl::Writer w(path);
  for (const auto& r : reports)
    for (const auto& f : r.folds)
      w.write({{"variant", r.variant},
               {"fold", f.fold},
               {"auc_roc", f.auc_roc},
               {"auc_pr", f.auc_pr},
               {"f1", f.f1},
               {"f1_collusive", f.f1_collusive},
               {"test_size", f.test_size},
               {"tp", f.confusion.tp},
               {"fp", f.confusion.fp},
               {"tn", f.confusion.tn},
               {"fn", f.confusion.fn}});
}

void write_sweep(const std::filesystem::path& path, std::span<const SweepRow> rows) {
  jsonl::Writer w(path);
  for (const auto& r : rows)
    w.write({{"parameter", r.parameter},
             {"value", r.value},
             {"folds", r.report.folds.size()},
             {"auc_roc_mean", r.report.auc_roc.mean},
             {"auc_roc_std", r.report.auc_roc.std},
             {"auc_pr_mean", r.report.auc_pr.mean},
             {"f1_mean", r.report.f1.mean},
             {"f1_collusive_mean", r.report.f1_collusive.mean}});
}

std::string format_report_table(std::span<const EvalReport> reports) {
  std::string out =
      "Method          AUC-ROC          AUC-PR           F1 (non-coll.)   F1 (collusive)\n";
  char line[200];
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-14s  %.3f +- %.3f  %.3f +- %.3f  %.3f +- %.3f  %.3f +- %.3f\n",
                  r.variant.c_str(), r.auc_roc.mean, r.auc_roc.std, r.auc_pr.mean, r.auc_pr.std, r.f1.mean,
                  r.f1.std, r.f1_collusive.mean, r.f1_collusive.std);
    out += line;
  }
  return out;
}

}  // namespace colludet
