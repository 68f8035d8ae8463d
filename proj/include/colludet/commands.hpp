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

#ifndef COLLUDET_COMMANDS_HPP_
#define COLLUDET_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "colludet/decompose.hpp"
#include "colludet/detector.hpp"
#include "colludet/jsonl.hpp"
#include "colludet/synth.hpp"

namespace colludet {

// Everything a subcommand needs. Values come from the documented defaults,
// then a JSON config file, then command-line flags.
struct RunConfig {
  std::optional<std::filesystem::path> users;
  std::optional<std::filesystem::path> follows;
  std::optional<std::filesystem::path> tweets;
  std::optional<std::filesystem::path> labels;
  std::filesystem::path out = "out";
  std::optional<std::filesystem::path> input;       // build artifacts, defaults to `out`
  std::optional<std::filesystem::path> checkpoint;  // defaults to <input>/model.json
  std::optional<std::string> now;                   // YYYY-MM-DD, required by build

  std::uint64_t seed = 7;
  std::size_t topics = 1000;
  std::size_t kmeans_max_iter = 100;
  std::optional<std::size_t> fallback_dim;

  TrainConfig train;
  std::vector<Relationship> relationships{kAllRelationships.begin(), kAllRelationships.end()};

  std::size_t folds = 10;
  std::vector<double> lr_grid;                      // empty: keep train.learning_rate
  std::optional<std::filesystem::path> tuning_input;
  bool sweep = false;

  bool strict = false;
  std::optional<std::filesystem::path> score_users;  // one user id per line

  SynthConfig synth;

  // Unknown keys are rejected so typos do not silently fall back to defaults.
  static RunConfig from_json(const jsonl::Json& doc);
  static RunConfig from_json(const jsonl::Json& doc, const RunConfig& base);
  static RunConfig load(const std::filesystem::path& path);
  static RunConfig load(const std::filesystem::path& path, const RunConfig& base);
  jsonl::Json to_json() const;

  std::filesystem::path input_dir() const { return input.value_or(out); }
  std::filesystem::path checkpoint_path() const { return checkpoint.value_or(input_dir() / "model.json"); }
  TrainConfig effective_train() const;  // train with the run seed applied
};

// Each command writes into cfg.out, echoing the effective config to
// <out>/config.json. Failures surface as DataError (bad inputs),
// NumericError (non-finite training state) or std::invalid_argument
// (inconsistent options).
void cmd_build(const RunConfig& cfg);
void cmd_train(const RunConfig& cfg);
void cmd_detect(const RunConfig& cfg);
void cmd_eval(const RunConfig& cfg);
void cmd_ablate(const RunConfig& cfg);
void cmd_synth(const RunConfig& cfg);
void cmd_export_embeddings(const RunConfig& cfg);

}  // namespace colludet

#endif  // COLLUDET_COMMANDS_HPP_
