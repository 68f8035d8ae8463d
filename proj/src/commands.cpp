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

#include "colludet/commands.hpp"

#include <fstream>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "colludet/checkpoint.hpp"
#include "colludet/error.hpp"
#include "colludet/evaluation.hpp"
#include "colludet/features.hpp"
#include "colludet/hetnet.hpp"
#include "colludet/pipeline.hpp"

namespace colludet {

namespace fs = std::filesystem;
using jsonl::Json;

namespace {

template <typename T>
void read_key(const Json& obj, const char* key, T& target) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    target = it->get<T>();
  } catch (const Json::exception&) {
    throw DataError(std::string("config: '") + key + "' has the wrong type");
  }
}

template <typename T>
void read_key(const Json& obj, const char* key, std::optional<T>& target) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (it->is_null()) {
    target.reset();
    return;
  }
  T value{};
  read_key(obj, key, value);
  target = value;
}

void read_path(const Json& obj, const char* key, std::optional<fs::path>& target) {
  std::optional<std::string> s;
  read_key(obj, key, s);
  if (s) target = *s;
}

void reject_unknown(const Json& obj, std::initializer_list<const char*> known, const std::string& where) {
  if (!obj.is_object()) throw DataError("config: " + where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw DataError("config: unknown key '" + where + key + "'");
  }
}

Json optional_json(const std::optional<fs::path>& p) { return p ? Json(p->string()) : Json(nullptr); }

void write_json(const fs::path& path, const Json& doc) {
  std::ofstream out(path);
  out << doc.dump(2) << '\n';
  if (!out) throw DataError("cannot write " + path.string());
}

void prepare_out(const RunConfig& cfg) {
  fs::create_directories(cfg.out);
  write_json(cfg.out / "config.json", cfg.to_json());
  spdlog::info("seed {}, output {}", cfg.seed, cfg.out.string());
}

Dataset load_dataset(const fs::path& dir) {
  if (!fs::exists(dir / "nodes.jsonl")) throw DataError("build artifacts not found in " + dir.string());
  return read_build(dir);
}

LrSelection maybe_tune(const RunConfig& cfg, TrainConfig& train_cfg, const CvOptions& options) {
  LrSelection sel;
  if (cfg.lr_grid.empty()) return sel;
  if (!cfg.tuning_input) throw std::invalid_argument("lr_grid requires tuning_input (a separate build directory)");
  Dataset tuning;
  in_stage("tuning", [&] { tuning = load_dataset(*cfg.tuning_input); });
  sel = select_learning_rate(tuning, train_cfg, cfg.lr_grid, options);
  train_cfg.learning_rate = sel.best;
  Json grid = Json::array();
  for (auto [lr, auc] : sel.mean_auc) grid.push_back({{"learning_rate", lr}, {"auc_roc_mean", auc}});
  write_json(cfg.out / "lr_selection.json", {{"best", sel.best}, {"grid", grid}});
  spdlog::info("selected learning rate {}", sel.best);
  return sel;
}

CvOptions cv_options(const RunConfig& cfg) {
  CvOptions o;
  o.folds = cfg.folds;
  o.seed = cfg.seed;
  o.relationships = cfg.relationships;
  o.variant = "full";
  if (cfg.relationships.size() == 1) o.variant = relationship_name(cfg.relationships.front());
  return o;
}

Json report_json(std::span<const EvalReport> reports) {
  Json doc = Json::array();
  for (const auto& r : reports) {
    const auto summary = [](const MetricSummary& s) { return Json{{"mean", s.mean}, {"std", s.std}}; };
    doc.push_back({{"variant", r.variant},
                   {"folds", r.folds.size()},
                   {"auc_roc", summary(r.auc_roc)},
                   {"auc_pr", summary(r.auc_pr)},
                   {"f1", summary(r.f1)},
                   {"f1_collusive", summary(r.f1_collusive)}});
  }
  return doc;
}

void write_reports(const fs::path& out, std::span<const EvalReport> reports) {
  write_fold_records(out / "folds.jsonl", reports);
  write_json(out / "report.json", report_json(reports));
  std::ofstream txt(out / "report.txt");
  txt << format_report_table(reports);
}

}  // namespace

RunConfig RunConfig::from_json(const Json& doc) { return from_json(doc, RunConfig{}); }
RunConfig RunConfig::load(const fs::path& path) { return load(path, RunConfig{}); }

RunConfig RunConfig::from_json(const Json& doc, const RunConfig& base) {
  reject_unknown(doc,
                 {"users", "follows", "tweets", "labels", "out", "input", "checkpoint", "now", "seed", "topics",
                  "kmeans_max_iter", "fallback_dim", "train", "relationships", "folds", "lr_grid",
                  "tuning_input", "sweep", "strict", "score_users", "synth"},
                 "");
  RunConfig c = base;
  read_path(doc, "users", c.users);
  read_path(doc, "follows", c.follows);
  read_path(doc, "tweets", c.tweets);
  read_path(doc, "labels", c.labels);
  std::optional<fs::path> out;
  read_path(doc, "out", out);
  if (out) c.out = *out;
  read_path(doc, "input", c.input);
  read_path(doc, "checkpoint", c.checkpoint);
  read_key(doc, "now", c.now);
  read_key(doc, "seed", c.seed);
  read_key(doc, "topics", c.topics);
  read_key(doc, "kmeans_max_iter", c.kmeans_max_iter);
  read_key(doc, "fallback_dim", c.fallback_dim);
  if (auto it = doc.find("train"); it != doc.end()) {
    const Json& t = *it;
    reject_unknown(t,
                   {"learning_rate", "weight_decay", "mu", "epochs", "hidden", "attn_dim", "heads",
                    "radius_every", "center_eps"},
                   "train.");
    read_key(t, "learning_rate", c.train.learning_rate);
    read_key(t, "weight_decay", c.train.weight_decay);
    read_key(t, "mu", c.train.mu);
    read_key(t, "epochs", c.train.epochs);
    read_key(t, "hidden", c.train.hidden);
    read_key(t, "attn_dim", c.train.attn_dim);
    read_key(t, "heads", c.train.heads);
    read_key(t, "radius_every", c.train.radius_every);
    read_key(t, "center_eps", c.train.center_eps);
  }
  if (auto it = doc.find("relationships"); it != doc.end()) {
    std::vector<std::string> names;
    read_key(doc, "relationships", names);
    if (names.empty()) throw DataError("config: relationships must not be empty");
    c.relationships.clear();
    for (const auto& n : names) c.relationships.push_back(relationship_from_name(n));
  }
  read_key(doc, "folds", c.folds);
  read_key(doc, "lr_grid", c.lr_grid);
  read_path(doc, "tuning_input", c.tuning_input);
  read_key(doc, "sweep", c.sweep);
  read_key(doc, "strict", c.strict);
  read_path(doc, "score_users", c.score_users);
  if (auto it = doc.find("synth"); it != doc.end()) {
    const Json& s = *it;
    reject_unknown(s,
                   {"n_collusive", "n_organic", "n_intermediaries", "credit_rate", "initial_credits",
                    "service_fraction", "follow_back_prob", "organic_follows", "topic_concentration",
                    "promo_topic_fraction", "promo_bias", "k_topics", "tweets_per_user", "embedding_dim",
                    "embedding_noise"},
                   "synth.");
    auto& y = c.synth;
    read_key(s, "n_collusive", y.n_collusive);
    read_key(s, "n_organic", y.n_organic);
    read_key(s, "n_intermediaries", y.n_intermediaries);
    read_key(s, "credit_rate", y.credit_rate);
    read_key(s, "initial_credits", y.initial_credits);
    read_key(s, "service_fraction", y.service_fraction);
    read_key(s, "follow_back_prob", y.follow_back_prob);
    read_key(s, "organic_follows", y.organic_follows);
    read_key(s, "topic_concentration", y.topic_concentration);
    read_key(s, "promo_topic_fraction", y.promo_topic_fraction);
    read_key(s, "promo_bias", y.promo_bias);
    read_key(s, "k_topics", y.k_topics);
    read_key(s, "tweets_per_user", y.tweets_per_user);
    read_key(s, "embedding_dim", y.embedding_dim);
    read_key(s, "embedding_noise", y.embedding_noise);
  }
  return c;
}

RunConfig RunConfig::load(const fs::path& path, const RunConfig& base) {
  std::ifstream in(path);
  if (!in) throw DataError("config: cannot open " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw DataError("config: " + path.string() + ": " + e.what());
  }
  RunConfig c = from_json(doc, base);
  // Relative paths inside a config file are taken from the file's directory.
  const fs::path root = path.parent_path();
  const auto anchor = [&](std::optional<fs::path>& p, const char* key) {
    if (p && p->is_relative() && doc.contains(key)) p = root / *p;
  };
  anchor(c.users, "users");
  anchor(c.follows, "follows");
  anchor(c.tweets, "tweets");
  anchor(c.labels, "labels");
  anchor(c.input, "input");
  anchor(c.checkpoint, "checkpoint");
  anchor(c.tuning_input, "tuning_input");
  anchor(c.score_users, "score_users");
  if (doc.contains("out") && c.out.is_relative()) c.out = root / c.out;
  return c;
}

Json RunConfig::to_json() const {
  Json rels = Json::array();
  for (auto r : relationships) rels.push_back(relationship_name(r));
  const auto& y = synth;
  return {{"users", optional_json(users)},
          {"follows", optional_json(follows)},
          {"tweets", optional_json(tweets)},
          {"labels", optional_json(labels)},
          {"out", out.string()},
          {"input", optional_json(input)},
          {"checkpoint", optional_json(checkpoint)},
          {"now", now ? Json(*now) : Json(nullptr)},
          {"seed", seed},
          {"topics", topics},
          {"kmeans_max_iter", kmeans_max_iter},
          {"fallback_dim", fallback_dim ? Json(*fallback_dim) : Json(nullptr)},
          {"train",
           {{"learning_rate", train.learning_rate},
            {"weight_decay", train.weight_decay},
            {"mu", train.mu},
            {"epochs", train.epochs},
            {"hidden", train.hidden},
            {"attn_dim", train.attn_dim},
            {"heads", train.heads},
            {"radius_every", train.radius_every},
            {"center_eps", train.center_eps}}},
          {"relationships", rels},
          {"folds", folds},
          {"lr_grid", lr_grid},
          {"tuning_input", optional_json(tuning_input)},
          {"sweep", sweep},
          {"strict", strict},
          {"score_users", optional_json(score_users)},
          {"synth",
           {{"n_collusive", y.n_collusive},
            {"n_organic", y.n_organic},
            {"n_intermediaries", y.n_intermediaries},
            {"credit_rate", y.credit_rate},
            {"initial_credits", y.initial_credits},
            {"service_fraction", y.service_fraction},
            {"follow_back_prob", y.follow_back_prob},
            {"organic_follows", y.organic_follows},
            {"topic_concentration", y.topic_concentration},
            {"promo_topic_fraction", y.promo_topic_fraction},
            {"promo_bias", y.promo_bias},
            {"k_topics", y.k_topics},
            {"tweets_per_user", y.tweets_per_user},
            {"embedding_dim", y.embedding_dim},
            {"embedding_noise", y.embedding_noise}}}};
}

TrainConfig RunConfig::effective_train() const {
  TrainConfig t = train;
  t.seed = seed;
  return t;
}

void cmd_build(const RunConfig& cfg) {
  if (!cfg.users || !cfg.follows || !cfg.tweets)
    throw std::invalid_argument("build needs users, follows and tweets paths");
  if (!cfg.now) throw std::invalid_argument("build needs a reference date (--now)");
  BuildOptions options;
  in_stage("config", [&] { options.now = parse_date(*cfg.now); });
  options.kmeans.k = cfg.topics;
  options.kmeans.seed = cfg.seed;
  options.kmeans.max_iter = cfg.kmeans_max_iter;
  options.fallback_dim = cfg.fallback_dim;

  for (const auto* p : {&*cfg.users, &*cfg.follows})
    if (!fs::exists(*p)) throw DataError("load: input not found: " + p->string());
  if (!fs::exists(*cfg.tweets)) throw DataError("topics: input not found: " + cfg.tweets->string());
  if (cfg.labels && !fs::exists(*cfg.labels))
    throw DataError("load: input not found: " + cfg.labels->string());

  prepare_out(cfg);
  HetNet g;
  in_stage("load", [&] { g = load_hetnet({*cfg.users, *cfg.follows, *cfg.tweets, cfg.labels}); });
  spdlog::info("loaded {} users, {} tweets", g.user_count(), g.tweet_count());
  const BuildResult b = run_build(g, options);
  write_build(cfg.out, g, b);
  spdlog::info("topics: {} iterations, objective {:.6f}", b.topics.iterations, b.topics.objective());
  std::fputs(format_stats_table(b.stats, b.data.size()).c_str(), stdout);
}

void cmd_train(const RunConfig& cfg) {
  const Dataset data = load_dataset(cfg.input_dir());
  const auto train_rows = data.rows_with(Label::kCollusive);
  if (train_rows.empty()) throw DataError("train: no collusive users to train on");
  prepare_out(cfg);

  Model model;
  model.config = cfg.effective_train();
  model.relationships = cfg.relationships;
  model.standardizer = Standardizer::fit(data.raw_features, train_rows);
  const Matrix x = model.standardizer.apply(data.raw_features);
  const auto ops = data.operators(model.relationships);
  TrainResult result;
  in_stage("train", [&] { result = train(ops, x, train_rows, model.config); });
  model.params = std::move(result.params);
  model.sphere = std::move(result.sphere);
  to_checkpoint(model).save(cfg.out / "model.json");

  jsonl::Writer log(cfg.out / "train_log.jsonl");
  for (const auto& e : result.log)
    log.write({{"epoch", e.epoch}, {"loss", e.loss}, {"radius2", e.radius2}, {"beta", e.beta}});
  spdlog::info("trained {} epochs on {} users, r^2 = {:.6g}", result.log.size(), train_rows.size(),
               *model.sphere.radius2);
}

void cmd_detect(const RunConfig& cfg) {
  const Dataset data = load_dataset(cfg.input_dir());
  Model model;
  in_stage("checkpoint", [&] { model = model_from_checkpoint(Checkpoint::load(cfg.checkpoint_path())); });

  std::vector<std::size_t> rows;
  std::vector<std::string> unknown;
  if (cfg.score_users) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < data.size(); ++i) index.emplace(data.user_ids[i], i);
    std::ifstream in(*cfg.score_users);
    if (!in) throw DataError("detect: cannot open " + cfg.score_users->string());
    std::string line;
    while (std::getline(in, line)) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      if (line.empty()) continue;
      auto it = index.find(line);
      if (it == index.end())
        unknown.push_back(line);
      else
        rows.push_back(it->second);
    }
  } else {
    for (std::size_t i = 0; i < data.size(); ++i) rows.push_back(i);
  }
  if (!unknown.empty()) {
    std::string list;
    for (const auto& u : unknown) list += (list.empty() ? "" : ", ") + u;
    if (cfg.strict) throw DataError("detect: unknown user ids: " + list);
    spdlog::warn("skipping {} unknown user ids: {}", unknown.size(), list);
  }
  prepare_out(cfg);

  const Matrix x = model.standardizer.apply(data.raw_features);
  const auto ops = data.operators(model.relationships);
  const auto scores = score(ops, x, model.params, model.sphere);
  std::size_t n_collusive = 0;
  jsonl::Writer w(cfg.out / "scores.jsonl");
  for (auto r : rows) {
    const auto& s = scores[r];
    n_collusive += s.collusive ? 1 : 0;
    w.write({{"user_id", data.user_ids[r]},
             {"distance2", s.dist2},
             {"r2", *model.sphere.radius2},
             {"label", s.collusive ? "collusive" : "non-collusive"}});
  }
  write_json(cfg.out / "summary.json", {{"scored", rows.size()},
                                        {"collusive", n_collusive},
                                        {"non_collusive", rows.size() - n_collusive},
                                        {"skipped", unknown}});
  spdlog::info("scored {} users, {} collusive", rows.size(), n_collusive);
}

void cmd_eval(const RunConfig& cfg) {
  const Dataset data = load_dataset(cfg.input_dir());
  prepare_out(cfg);
  TrainConfig train_cfg = cfg.effective_train();
  const CvOptions options = cv_options(cfg);
  maybe_tune(cfg, train_cfg, options);
  if (cfg.sweep) {
    const auto rows = sensitivity_sweep(data, train_cfg, SweepGrid{}, options);
    write_sweep(cfg.out / "sweep.jsonl", rows);
    std::vector<EvalReport> reports;
    for (const auto& r : rows) reports.push_back(r.report);
    write_reports(cfg.out, reports);
    std::fputs(format_report_table(reports).c_str(), stdout);
    return;
  }
  const EvalReport report = cross_validate(data, train_cfg, options);
  write_reports(cfg.out, std::span(&report, 1));
  std::fputs(format_report_table(std::span(&report, 1)).c_str(), stdout);
}

void cmd_ablate(const RunConfig& cfg) {
  const Dataset data = load_dataset(cfg.input_dir());
  prepare_out(cfg);
  TrainConfig train_cfg = cfg.effective_train();
  const CvOptions options = cv_options(cfg);
  maybe_tune(cfg, train_cfg, options);
  const auto reports = ablation(data, train_cfg, options);
  write_reports(cfg.out, reports);
  std::fputs(format_report_table(reports).c_str(), stdout);
}

void cmd_synth(const RunConfig& cfg) {
  SynthConfig s = cfg.synth;
  s.seed = cfg.seed;
  if (cfg.now) s.now = *cfg.now;
  s.validate();
  prepare_out(cfg);
  write_synthetic(s, cfg.out);
  // A ready-made build config for the generated files.
  write_json(cfg.out / "build_config.json", {{"users", "users.jsonl"},
                                             {"follows", "follows.jsonl"},
                                             {"tweets", "tweets.jsonl"},
                                             {"labels", "labels.jsonl"},
                                             {"now", s.now},
                                             {"topics", s.k_topics},
                                             {"seed", cfg.seed},
                                             {"out", "build"}});
  spdlog::info("wrote synthetic dataset to {}", cfg.out.string());
}

void cmd_export_embeddings(const RunConfig& cfg) {
  const Dataset data = load_dataset(cfg.input_dir());
  Model model;
  in_stage("checkpoint", [&] { model = model_from_checkpoint(Checkpoint::load(cfg.checkpoint_path())); });
  prepare_out(cfg);
  const Matrix x = model.standardizer.apply(data.raw_features);
  const auto ops = data.operators(model.relationships);
  const auto trace = hsa_forward(ops, x, model.params);
  const Matrix& z = trace.output();
  std::vector<std::string> columns;
  for (std::size_t c = 0; c < z.cols(); ++c) columns.push_back("z" + std::to_string(c));
  write_matrix_csv(cfg.out / "embeddings.csv", z, data.user_ids, columns);
  spdlog::info("exported {} x {} embeddings", z.rows(), z.cols());
}

}  // namespace colludet
