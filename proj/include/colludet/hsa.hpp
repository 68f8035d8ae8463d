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

#ifndef COLLUDET_HSA_HPP_
#define COLLUDET_HSA_HPP_

// Hierarchical subgraph aggregation: per-relationship weighted graph
// convolution followed by attention fusion across relationships, stacked
// `heads` times (the output of one block is the input of the next).

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "colludet/csr.hpp"
#include "colludet/decompose.hpp"
#include "colludet/tensor.hpp"

namespace colludet {

// Subgraph with its symmetric normalisation e_ij / sqrt(|N_i||N_j|)
// precomputed; the propagation operator of one relationship.
struct SubgraphOperator {
  Relationship relationship = Relationship::kCommonFollowee;
  Csr adj;
  std::vector<double> coef;

  std::size_t n() const { return adj.n_rows; }
  static SubgraphOperator from(const Subgraph& s);
};

struct HsaConfig {
  std::size_t in_dim = 18;
  std::size_t hidden = 32;
  std::size_t attn_dim = 128;
  std::size_t heads = 2;
  std::size_t n_subgraphs = 4;
};

struct ConvParams {
  Matrix weight;  // in x hidden
  Matrix bias;    // 1 x hidden
};

struct AttnParams {
  Matrix w1;  // hidden x attn
  Matrix b1;  // 1 x attn
  Matrix w2;  // attn x 1
  Matrix b2;  // 1 x 1
};

struct HeadParams {
  std::vector<ConvParams> conv;  // one per subgraph
  AttnParams attn;
};

struct HsaParams {
  std::vector<HeadParams> heads;

  std::size_t in_dim() const { return heads.front().conv.front().weight.rows(); }
  std::size_t hidden() const { return heads.front().conv.front().weight.cols(); }
  std::size_t attn_dim() const { return heads.front().attn.w1.cols(); }
  std::size_t n_subgraphs() const { return heads.front().conv.size(); }
  HsaConfig config() const;

  // Glorot-uniform weights, zero biases, drawn in tensors() order.
  static HsaParams init(const HsaConfig& cfg, std::uint64_t seed);
  static HsaParams zeros(const HsaConfig& cfg);

  // Every tensor with a stable name ("head0.conv2.weight", "head1.attn.w1").
  std::vector<std::pair<std::string, Matrix*>> tensors();
  std::vector<std::pair<std::string, const Matrix*>> tensors() const;
  // Throws ShapeError if the dimension chain is inconsistent.
  void validate() const;
};

// H = relu(A_norm X W + b) for one relationship. `aggregated` and `pre`
// receive A_norm X and the pre-activation when non-null.
Matrix subgraph_conv(const SubgraphOperator& op, const Matrix& x, const ConvParams& p,
                     Matrix* aggregated = nullptr, Matrix* pre = nullptr);

struct AttentionResult {
  Matrix z;
  std::vector<double> beta;
  std::vector<double> importance;  // w^m before the softmax
  std::vector<Matrix> activated;   // tanh(H^m W1 + b1)
};

// w^m = mean_i tanh(H^m_i W1 + b1) W2 + b2, beta = softmax(w), Z = sum beta^m H^m.
AttentionResult subgraph_attention(std::span<const Matrix> hs, const AttnParams& p);

struct HeadTrace {
  Matrix input;
  std::vector<Matrix> aggregated;
  std::vector<Matrix> pre;
  std::vector<Matrix> hidden;
  std::vector<Matrix> activated;
  std::vector<double> importance;
  std::vector<double> beta;
  Matrix output;
};

struct ForwardTrace {
  std::vector<HeadTrace> heads;
  const Matrix& output() const& { return heads.back().output; }
  const Matrix& output() && = delete;
};

ForwardTrace hsa_forward(std::span<const SubgraphOperator> ops, const Matrix& x,
                         const HsaParams& params);

// Reverse-mode gradients of sum(dz .* Z) for every tensor in `params`; the
// gradient with respect to the input features goes to `d_input` if given.
HsaParams hsa_backward(std::span<const SubgraphOperator> ops, const ForwardTrace& trace,
                       const Matrix& dz, const HsaParams& params, Matrix* d_input = nullptr);

}  // namespace colludet

#endif  // COLLUDET_HSA_HPP_
