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

#include <cstdio>
#include <optional>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "colludet/commands.hpp"
#include "colludet/error.hpp"

namespace {

struct Flags {
  std::optional<std::string> config, out, now, input, checkpoint;
  std::optional<std::string> users, follows, tweets, labels, score_users, tuning_input;
  std::optional<std::uint64_t> seed;
  bool strict = false;
  bool sweep = false;
  bool verbose = false;
};

colludet::RunConfig resolve(const Flags& f) {
  colludet::RunConfig cfg;
  if (f.config) cfg = colludet::RunConfig::load(*f.config);
  if (f.out) cfg.out = *f.out;
  if (f.now) cfg.now = *f.now;
  if (f.seed) cfg.seed = *f.seed;
  if (f.input) cfg.input = *f.input;
  if (f.checkpoint) cfg.checkpoint = *f.checkpoint;
  if (f.users) cfg.users = *f.users;
  if (f.follows) cfg.follows = *f.follows;
  if (f.tweets) cfg.tweets = *f.tweets;
  if (f.labels) cfg.labels = *f.labels;
  if (f.score_users) cfg.score_users = *f.score_users;
  if (f.tuning_input) cfg.tuning_input = *f.tuning_input;
  if (f.strict) cfg.strict = true;
  if (f.sweep) cfg.sweep = true;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_st("colludet"));

  CLI::App app{"Collusive user detection on follower networks"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "JSON run config");
  app.add_option("--seed", f.seed, "Random seed (default 7)");
  app.add_option("--out", f.out, "Output directory (default ./out)");
  app.add_option("--now", f.now, "Reference date YYYY-MM-DD for account ages");
  app.add_flag("--strict", f.strict, "Fail on unknown user ids instead of skipping them");
  app.add_flag("-v,--verbose", f.verbose, "Debug logging");
  app.add_option("--input", f.input, "Build artifact directory (default: --out)");
  app.add_option("--checkpoint", f.checkpoint, "Model checkpoint (default: <input>/model.json)");

  auto* build = app.add_subcommand("build", "Load a dataset, cluster topics, decompose and extract features");
  build->add_option("--users", f.users, "users.jsonl");
  build->add_option("--follows", f.follows, "follows.jsonl");
  build->add_option("--tweets", f.tweets, "tweets.jsonl");
  build->add_option("--labels", f.labels, "labels.jsonl");
  auto* train = app.add_subcommand("train", "Train the detector on the collusive users of a build");
  auto* detect = app.add_subcommand("detect", "Score users with a trained checkpoint");
  detect->add_option("--users", f.score_users, "File of user ids to score, one per line");
  auto* eval = app.add_subcommand("eval", "Cross-validated evaluation");
  eval->add_flag("--sweep", f.sweep, "Run the hidden/attention/head sensitivity grid");
  eval->add_option("--tuning-input", f.tuning_input, "Build directory used to pick the learning rate");
  auto* ablate = app.add_subcommand("ablate", "Cross-validate each single-relationship variant and the full model");
  ablate->add_option("--tuning-input", f.tuning_input, "Build directory used to pick the learning rate");
  auto* synth = app.add_subcommand("synth", "Generate a synthetic blackmarket dataset");
  auto* exp = app.add_subcommand("export-embeddings", "Write the learned user embeddings as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (f.verbose) spdlog::set_level(spdlog::level::debug);

  try {
    const colludet::RunConfig cfg = resolve(f);
    if (*build) colludet::cmd_build(cfg);
    else if (*train) colludet::cmd_train(cfg);
    else if (*detect) colludet::cmd_detect(cfg);
    else if (*eval) colludet::cmd_eval(cfg);
    else if (*ablate) colludet::cmd_ablate(cfg);
    else if (*synth) colludet::cmd_synth(cfg);
    else if (*exp) colludet::cmd_export_embeddings(cfg);
  } catch (const colludet::NumericError& e) {
    spdlog::error("{}", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 0;
}
