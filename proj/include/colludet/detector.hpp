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

#ifndef COLLUDET_DETECTOR_HPP_
#define COLLUDET_DETECTOR_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "colludet/hsa.hpp"
#include "colludet/tensor.hpp"

namespace colludet {

// Soft-boundary hypersphere around the collusive class.
struct Hypersphere {
  std::vector<double> center;
  std::optional<double> radius2;  // unset until fitted
  double mu = 0.2;
};

// Mean of the rows of `z`, with components of magnitude below `eps` pushed
// out to +-eps (by sign, zero goes positive) so the centre cannot be hit by
// a collapsed network.
std::vector<double> init_center(const Matrix& z, double eps = 0.1);

struct SvddLoss {
  double loss = 0.0;
  std::vector<double> dist2;
};

// r^2 + 1/(mu n) sum_i max(0, |z_i - c|^2 - r^2) over the rows of `z`.
// `dz`, when given, receives dLoss/dz (the hinge at equality counts as
// inactive).
SvddLoss svdd_loss(const Matrix& z, const Hypersphere& sphere, Matrix* dz = nullptr);

// (1 - mu) quantile of `dist2` by lower nearest rank: the ceil((1 - mu) n)-th
// smallest value, so at most floor(mu n) points lie strictly outside.
double update_radius(std::span<const double> dist2, double mu);

struct AdamConfig {
  double learning_rate = 0.6;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 5e-4;  // decoupled: theta -= lr * wd * theta
};

struct AdamState {
  HsaParams first;
  HsaParams second;
  std::uint64_t step = 0;
};

class Adam {
 public:
  Adam(const HsaParams& like, AdamConfig cfg);
  void step(HsaParams& params, const HsaParams& grads);
  const AdamState& state() const { return state_; }

 private:
  AdamConfig cfg_;
  AdamState state_;
};

struct TrainConfig {
  double learning_rate = 0.6;
  double weight_decay = 5e-4;
  double mu = 0.2;
  std::size_t epochs = 60;
  std::uint64_t seed = 7;
  std::size_t hidden = 32;
  std::size_t attn_dim = 128;
  std::size_t heads = 2;
  std::size_t radius_every = 5;
  double center_eps = 0.1;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;
  double radius2 = 0.0;
  std::vector<std::vector<double>> beta;  // per head, per subgraph
  std::optional<double> val_loss;
  std::optional<double> val_recall;  // fraction of validation rows inside
};

struct TrainResult {
  HsaParams params;
  Hypersphere sphere;
  std::vector<EpochRecord> log;
};

// Full-batch training. The forward pass covers every node of the subgraphs;
// the objective uses only `train_rows`. Non-finite values abort with
// NumericError naming the epoch and tensor.
TrainResult train(std::span<const SubgraphOperator> ops, const Matrix& x,
                  std::span<const std::size_t> train_rows, const TrainConfig& cfg,
                  std::span<const std::size_t> val_rows = {});

struct Score {
  double dist2 = 0.0;
  double margin = 0.0;  // dist2 - r^2, negative on the collusive side
  bool collusive = false;
};

std::vector<Score> score_embeddings(const Matrix& z, const Hypersphere& sphere);
std::vector<Score> score(std::span<const SubgraphOperator> ops, const Matrix& x,
                         const HsaParams& params, const Hypersphere& sphere);

}  // namespace colludet

#endif  // COLLUDET_DETECTOR_HPP_
