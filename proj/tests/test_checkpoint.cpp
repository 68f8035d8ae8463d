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

#include <fstream>

#include "colludet/checkpoint.hpp"
#include "colludet/error.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace colludet;

namespace {

Model random_model(std::uint64_t seed) {
  Rng rng(seed);
  Model m;
  m.params = testing::random_params(rng, {18, 5, 7, 2, 3});
  m.relationships = {Relationship::kCommonFollowee, Relationship::kTransition, Relationship::kCommonTopic};
  m.sphere.center = {0.1, 1.0 / 3.0, -2.5e-300, 7.0, 1e300};
  m.sphere.radius2 = 0.1 + 0.2;
  m.sphere.mu = 0.25;
  m.standardizer.mean.assign(18, 1.0 / 7.0);
  m.standardizer.scale.assign(18, 3.0);
  m.config.learning_rate = 0.006;
  m.config.seed = seed;
  m.config.mu = 0.25;
  m.config.epochs = 13;
  return m;
}

}  // namespace

TEST_CASE("model round trips exactly through a file") {
  const Model m = random_model(3);
  const auto dir = testing::scratch_dir("checkpoint");
  to_checkpoint(m).save(dir / "model.json");
  const Model back = model_from_checkpoint(Checkpoint::load(dir / "model.json"));
  const auto a = m.params.tensors();
  const auto b = back.params.tensors();
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].first == b[k].first);
    CHECK(*a[k].second == *b[k].second);
  }
  CHECK(back.sphere.center == m.sphere.center);
  CHECK(*back.sphere.radius2 == *m.sphere.radius2);
  CHECK(back.sphere.mu == 0.25);
  CHECK(back.standardizer.mean == m.standardizer.mean);
  CHECK(back.standardizer.scale == m.standardizer.scale);
  CHECK(back.relationships == m.relationships);
  CHECK(back.config.learning_rate == 0.006);
  CHECK(back.config.epochs == 13);
  CHECK(back.config.seed == 3);
}

TEST_CASE("saving twice gives identical bytes") {
  const auto dir = testing::scratch_dir("checkpoint_bytes");
  to_checkpoint(random_model(4)).save(dir / "a.json");
  to_checkpoint(random_model(4)).save(dir / "b.json");
  std::ifstream a(dir / "a.json"), b(dir / "b.json");
  const std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(sa == sb);
}

TEST_CASE("malformed checkpoints are data errors") {
  CHECK_THROWS_AS(Checkpoint::from_json({{"format", "other"}}), DataError);
  CHECK_THROWS_AS(Checkpoint::from_json({{"format", "colludet.checkpoint"}, {"version", 99}}), DataError);
  auto doc = to_checkpoint(random_model(5)).to_json();
  doc["tensors"][0]["shape"] = {1, 1};
  CHECK_THROWS_AS(Checkpoint::from_json(doc), DataError);
  Checkpoint c = to_checkpoint(random_model(5));
  c.tensors.erase(c.tensors.begin());
  CHECK_THROWS_AS(model_from_checkpoint(c), DataError);
  CHECK_THROWS_AS(c.at("nope"), DataError);
  const auto dir = testing::scratch_dir("checkpoint_bad");
  std::ofstream(dir / "x.json") << "{not json";
  CHECK_THROWS_AS(Checkpoint::load(dir / "x.json"), DataError);
}

TEST_CASE("unfitted spheres cannot be saved") {
  Model m = random_model(6);
  m.sphere.radius2.reset();
  CHECK_THROWS(to_checkpoint(m));
}
