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

#ifndef COLLUDET_CHECKPOINT_HPP_
#define COLLUDET_CHECKPOINT_HPP_

// Checkpoint container: a single JSON document
//
//   {"format": "colludet.checkpoint", "version": 1,
//    "meta": {...},
//    "tensors": [{"name": "...", "shape": [rows, cols], "data": [...]}, ...]}
//
// `data` is row-major. Numbers are written in shortest round-trip form, so
// save followed by load reproduces every double bit for bit.

#include <filesystem>
#include <string>
#include <vector>

#include "colludet/decompose.hpp"
#include "colludet/detector.hpp"
#include "colludet/features.hpp"
#include "colludet/hsa.hpp"
#include "colludet/jsonl.hpp"
#include "colludet/tensor.hpp"

namespace colludet {

struct NamedTensor {
  std::string name;
  Matrix value;
};

struct Checkpoint {
  jsonl::Json meta = jsonl::Json::object();
  std::vector<NamedTensor> tensors;

  void add(std::string name, Matrix value);
  const Matrix& at(const std::string& name) const;  // throws DataError
  jsonl::Json to_json() const;
  static Checkpoint from_json(const jsonl::Json& doc);
  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);
};

// Everything needed to score users: network, hypersphere and the feature
// standardisation fitted on the training rows.
struct Model {
  HsaParams params;
  Hypersphere sphere;
  Standardizer standardizer;
  std::vector<Relationship> relationships;
  TrainConfig config;
};

Checkpoint to_checkpoint(const Model& model);
Model model_from_checkpoint(const Checkpoint& ckpt);

}  // namespace colludet

#endif  // COLLUDET_CHECKPOINT_HPP_
