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

#include "colludet/checkpoint.hpp"

#include <fstream>

#include "colludet/error.hpp"

namespace colludet {

namespace {

constexpr const char* kFormat = "colludet.checkpoint";
constexpr int kVersion = 1;

Matrix row_vector(const std::vector<double>& v) {
  Matrix m(1, v.size());
  std::copy(v.begin(), v.end(), m.flat().begin());
  return m;
}

std::vector<double> to_vector(const Matrix& m) { return {m.flat().begin(), m.flat().end()}; }

}  // namespace

void Checkpoint::add(std::string name, Matrix value) {
  for (const auto& t : tensors)
    if (t.name == name) throw ShapeError("checkpoint: duplicate tensor '" + name + "'");
  tensors.push_back({std::move(name), std::move(value)});
}

const Matrix& Checkpoint::at(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return t.value;
  throw DataError("checkpoint: missing tensor '" + name + "'");
}

jsonl::Json Checkpoint::to_json() const {
  jsonl::Json doc = {{"format", kFormat}, {"version", kVersion}, {"meta", meta}};
  jsonl::Json list = jsonl::Json::array();
  for (const auto& t : tensors) {
    list.push_back({{"name", t.name},
                    {"shape", {t.value.rows(), t.value.cols()}},
                    {"data", std::vector<double>(t.value.flat().begin(), t.value.flat().end())}});
  }
  doc["tensors"] = std::move(list);
  return doc;
}

Checkpoint Checkpoint::from_json(const jsonl::Json& doc) {
  if (!doc.is_object() || doc.value("format", "") != kFormat)
    throw DataError("not a colludet checkpoint");
  if (doc.value("version", 0) != kVersion)
    throw DataError("unsupported checkpoint version " + doc.value("version", jsonl::Json()).dump());
  Checkpoint c;
  c.meta = doc.value("meta", jsonl::Json::object());
  for (const auto& t : jsonl::field<jsonl::Json>(doc, "tensors")) {
    const auto name = jsonl::field<std::string>(t, "name");
    const auto shape = jsonl::field<std::vector<std::size_t>>(t, "shape");
    const auto data = jsonl::field<std::vector<double>>(t, "data");
    if (shape.size() != 2 || shape[0] * shape[1] != data.size())
      throw DataError("checkpoint: tensor '" + name + "' has inconsistent shape");
    Matrix m(shape[0], shape[1]);
    std::copy(data.begin(), data.end(), m.flat().begin());
    c.add(name, std::move(m));
  }
  return c;
}

void Checkpoint::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << to_json().dump() << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  jsonl::Json doc;
  try {
    doc = jsonl::Json::parse(in);
  } catch (const jsonl::Json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return from_json(doc);
}

Checkpoint to_checkpoint(const Model& model) {
  Checkpoint c;
  const auto hc = model.params.config();
  std::vector<std::string> rels;
  for (auto r : model.relationships) rels.push_back(relationship_name(r));
  const TrainConfig& t = model.config;
  c.meta = {{"in_dim", hc.in_dim},
            {"hidden", hc.hidden},
            {"attn_dim", hc.attn_dim},
            {"heads", hc.heads},
            {"relationships", rels},
            {"mu", model.sphere.mu},
            {"learning_rate", t.learning_rate},
            {"weight_decay", t.weight_decay},
            {"epochs", t.epochs},
            {"seed", t.seed},
            {"radius_every", t.radius_every},
            {"center_eps", t.center_eps}};
  for (const auto& [name, m] : model.params.tensors()) c.add(name, *m);
  if (!model.sphere.radius2) throw ShapeError("to_checkpoint: hypersphere not fitted");
  c.add("sphere.center", row_vector(model.sphere.center));
  c.add("sphere.radius2", Matrix(1, 1, *model.sphere.radius2));
  c.add("features.mean", row_vector(model.standardizer.mean));
  c.add("features.scale", row_vector(model.standardizer.scale));
  return c;
}

Model model_from_checkpoint(const Checkpoint& c) {
  Model m;
  try {
    const auto& meta = c.meta;
    for (const auto& r : meta.at("relationships")) m.relationships.push_back(relationship_from_name(r));
    const HsaConfig hc{meta.at("in_dim").get<std::size_t>(), meta.at("hidden").get<std::size_t>(),
                       meta.at("attn_dim").get<std::size_t>(), meta.at("heads").get<std::size_t>(),
                       m.relationships.size()};
    TrainConfig& t = m.config;
    t.hidden = hc.hidden;
    t.attn_dim = hc.attn_dim;
    t.heads = hc.heads;
    t.mu = meta.at("mu").get<double>();
    t.learning_rate = meta.at("learning_rate").get<double>();
    t.weight_decay = meta.at("weight_decay").get<double>();
    t.epochs = meta.at("epochs").get<std::size_t>();
    t.seed = meta.at("seed").get<std::uint64_t>();
    t.radius_every = meta.at("radius_every").get<std::size_t>();
    t.center_eps = meta.at("center_eps").get<double>();
    m.params = HsaParams::zeros(hc);
    for (auto& [name, tensor] : m.params.tensors()) {
      const Matrix& src = c.at(name);
      if (!src.same_shape(*tensor)) throw DataError("checkpoint: tensor '" + name + "' has the wrong shape");
      *tensor = src;
    }
  } catch (const jsonl::Json::exception& e) {
    throw DataError(std::string("checkpoint metadata: ") + e.what());
  } catch (const ShapeError& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
  m.sphere.mu = m.config.mu;
  m.sphere.center = to_vector(c.at("sphere.center"));
  m.sphere.radius2 = c.at("sphere.radius2")(0, 0);
  m.standardizer.mean = to_vector(c.at("features.mean"));
  m.standardizer.scale = to_vector(c.at("features.scale"));
  return m;
}

}  // namespace colludet
