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

#include "colludet/hsa.hpp"

#include <algorithm>
#include <cmath>

#include "colludet/error.hpp"
#include "colludet/kernels.hpp"
#include "colludet/random.hpp"

namespace colludet {

namespace kp = kernels::parallel;

namespace {

void add_row_bias(Matrix& m, const Matrix& bias) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) += bias(0, j);
}

Matrix column_sums(const Matrix& m) {
  Matrix out(1, m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(0, j) += m(i, j);
  return out;
}

void accumulate(Matrix& dst, const Matrix& src) {
  auto d = dst.flat();
  auto s = src.flat();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

void glorot(Matrix& m, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  for (double& v : m.flat()) v = rng.uniform(-a, a);
}

}  // namespace

SubgraphOperator SubgraphOperator::from(const Subgraph& s) {
  return {s.relationship, s.adj, s.normalized_weights()};
}

HsaConfig HsaParams::config() const {
  return {in_dim(), hidden(), attn_dim(), heads.size(), n_subgraphs()};
}

HsaParams HsaParams::zeros(const HsaConfig& cfg) {
  if (cfg.heads == 0 || cfg.n_subgraphs == 0 || cfg.hidden == 0 || cfg.attn_dim == 0 ||
      cfg.in_dim == 0)
    throw ShapeError("HsaConfig: every dimension must be positive");
  HsaParams p;
  for (std::size_t h = 0; h < cfg.heads; ++h) {
    HeadParams head;
    const std::size_t in = h == 0 ? cfg.in_dim : cfg.hidden;
    for (std::size_t m = 0; m < cfg.n_subgraphs; ++m)
      head.conv.push_back({Matrix(in, cfg.hidden), Matrix(1, cfg.hidden)});
    head.attn = {Matrix(cfg.hidden, cfg.attn_dim), Matrix(1, cfg.attn_dim),
                 Matrix(cfg.attn_dim, 1), Matrix(1, 1)};
    p.heads.push_back(std::move(head));
  }
  return p;
}

HsaParams HsaParams::init(const HsaConfig& cfg, std::uint64_t seed) {
  HsaParams p = zeros(cfg);
  Rng rng(seed);
  for (auto& [name, t] : p.tensors())
    if (t->rows() > 1) glorot(*t, rng);  // weights; biases are 1 x k and stay zero
  return p;
}

std::vector<std::pair<std::string, Matrix*>> HsaParams::tensors() {
  std::vector<std::pair<std::string, Matrix*>> out;
  for (std::size_t h = 0; h < heads.size(); ++h) {
    const std::string head = "head" + std::to_string(h) + ".";
    for (std::size_t m = 0; m < heads[h].conv.size(); ++m) {
      const std::string conv = head + "conv" + std::to_string(m + 1) + ".";
      out.emplace_back(conv + "weight", &heads[h].conv[m].weight);
      out.emplace_back(conv + "bias", &heads[h].conv[m].bias);
    }
    out.emplace_back(head + "attn.w1", &heads[h].attn.w1);
    out.emplace_back(head + "attn.b1", &heads[h].attn.b1);
    out.emplace_back(head + "attn.w2", &heads[h].attn.w2);
    out.emplace_back(head + "attn.b2", &heads[h].attn.b2);
  }
  return out;
}

std::vector<std::pair<std::string, const Matrix*>> HsaParams::tensors() const {
  std::vector<std::pair<std::string, const Matrix*>> out;
  for (auto& [name, t] : const_cast<HsaParams*>(this)->tensors()) out.emplace_back(name, t);
  return out;
}

void HsaParams::validate() const {
  if (heads.empty()) throw ShapeError("HsaParams: no heads");
  const std::size_t hidden_dim = hidden();
  const std::size_t attn = attn_dim();
  const std::size_t m_count = n_subgraphs();
  for (std::size_t h = 0; h < heads.size(); ++h) {
    const auto& head = heads[h];
    const std::size_t in = h == 0 ? in_dim() : hidden_dim;
    const std::string tag = "head" + std::to_string(h);
    if (head.conv.size() != m_count) throw ShapeError(tag + ": subgraph count mismatch");
    for (const auto& c : head.conv) {
      require_shape(c.weight, in, hidden_dim, tag + " conv weight");
      require_shape(c.bias, 1, hidden_dim, tag + " conv bias");
    }
    require_shape(head.attn.w1, hidden_dim, attn, tag + " attn.w1");
    require_shape(head.attn.b1, 1, attn, tag + " attn.b1");
    require_shape(head.attn.w2, attn, 1, tag + " attn.w2");
    require_shape(head.attn.b2, 1, 1, tag + " attn.b2");
  }
}

Matrix subgraph_conv(const SubgraphOperator& op, const Matrix& x, const ConvParams& p,
                     Matrix* aggregated, Matrix* pre) {
  if (x.rows() != op.n())
    throw ShapeError("subgraph_conv: " + std::to_string(x.rows()) + " feature rows for " +
                     std::to_string(op.n()) + " nodes");
  require_shape(p.weight, x.cols(), p.weight.cols(), "subgraph_conv weight");
  require_shape(p.bias, 1, p.weight.cols(), "subgraph_conv bias");
  Matrix agg;
  kp::spmm(op.adj, op.coef, x, agg);
  Matrix s;
  kp::matmul(agg, p.weight, s);
  add_row_bias(s, p.bias);
  Matrix h = s;
  for (double& v : h.flat()) v = std::max(0.0, v);
  if (aggregated) *aggregated = std::move(agg);
  if (pre) *pre = std::move(s);
  return h;
}

AttentionResult subgraph_attention(std::span<const Matrix> hs, const AttnParams& p) {
  if (hs.empty()) throw ShapeError("subgraph_attention: no subgraph embeddings");
  const std::size_t n = hs.front().rows();
  const std::size_t hidden_dim = hs.front().cols();
  for (const auto& h : hs) require_shape(h, n, hidden_dim, "subgraph_attention input");
  require_shape(p.w1, hidden_dim, p.w1.cols(), "attn.w1");
  require_shape(p.b1, 1, p.w1.cols(), "attn.b1");
  require_shape(p.w2, p.w1.cols(), 1, "attn.w2");
  require_shape(p.b2, 1, 1, "attn.b2");
  if (n == 0) throw ShapeError("subgraph_attention: empty graph");

  AttentionResult r;
  for (const auto& h : hs) {
    Matrix t;
    kp::matmul(h, p.w1, t);
    add_row_bias(t, p.b1);
    for (double& v : t.flat()) v = std::tanh(v);
    Matrix s;
    kp::matmul(t, p.w2, s);
    double mean = 0.0;
    for (double v : s.flat()) mean += v;
    r.importance.push_back(mean / static_cast<double>(n) + p.b2(0, 0));
    r.activated.push_back(std::move(t));
  }
  const double top = *std::max_element(r.importance.begin(), r.importance.end());
  double total = 0.0;
  for (double w : r.importance) {
    r.beta.push_back(std::exp(w - top));
    total += r.beta.back();
  }
  for (double& b : r.beta) b /= total;

  r.z = Matrix(n, hidden_dim);
  for (std::size_t m = 0; m < hs.size(); ++m) {
    auto dst = r.z.flat();
    auto src = hs[m].flat();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += r.beta[m] * src[i];
  }
  return r;
}

ForwardTrace hsa_forward(std::span<const SubgraphOperator> ops, const Matrix& x,
                         const HsaParams& params) {
  params.validate();
  if (ops.size() != params.n_subgraphs())
    throw ShapeError("hsa_forward: " + std::to_string(ops.size()) + " subgraphs for a model of " +
                     std::to_string(params.n_subgraphs()));
  if (x.cols() != params.in_dim())
    throw ShapeError("hsa_forward: input width " + std::to_string(x.cols()) + ", model expects " +
                     std::to_string(params.in_dim()));
  for (const auto& op : ops)
    if (op.n() != x.rows()) throw ShapeError("hsa_forward: subgraph size mismatch");

  ForwardTrace trace;
  const Matrix* input = &x;
  for (const auto& head : params.heads) {
    HeadTrace ht;
    ht.input = *input;
    for (std::size_t m = 0; m < ops.size(); ++m) {
      Matrix agg, pre;
      ht.hidden.push_back(subgraph_conv(ops[m], ht.input, head.conv[m], &agg, &pre));
      ht.aggregated.push_back(std::move(agg));
      ht.pre.push_back(std::move(pre));
    }
    auto att = subgraph_attention(ht.hidden, head.attn);
    ht.activated = std::move(att.activated);
    ht.importance = std::move(att.importance);
    ht.beta = std::move(att.beta);
    ht.output = std::move(att.z);
    trace.heads.push_back(std::move(ht));
    input = &trace.heads.back().output;
  }
  return trace;
}

HsaParams hsa_backward(std::span<const SubgraphOperator> ops, const ForwardTrace& trace,
                       const Matrix& dz, const HsaParams& params, Matrix* d_input) {
  params.validate();
  if (trace.heads.size() != params.heads.size())
    throw ShapeError("hsa_backward: trace has " + std::to_string(trace.heads.size()) +
                     " heads, params " + std::to_string(params.heads.size()));
  if (ops.size() != params.n_subgraphs()) throw ShapeError("hsa_backward: subgraph count mismatch");
  require_shape(dz, trace.output().rows(), trace.output().cols(), "hsa_backward dZ");

  HsaParams grads = HsaParams::zeros(params.config());
  const std::size_t m_count = ops.size();
  Matrix upstream = dz;

  for (std::size_t h = params.heads.size(); h-- > 0;) {
    const HeadTrace& ht = trace.heads[h];
    const HeadParams& hp = params.heads[h];
    HeadParams& hg = grads.heads[h];
    const std::size_t n = ht.output.rows();
    const std::size_t attn = hp.attn.w1.cols();

    // Z = sum_m beta_m H^m
    std::vector<double> d_beta(m_count, 0.0);
    for (std::size_t m = 0; m < m_count; ++m) {
      auto hv = ht.hidden[m].flat();
      auto g = upstream.flat();
      double s = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) s += hv[i] * g[i];
      d_beta[m] = s;
    }
    // beta = softmax(w)
    double weighted = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) weighted += ht.beta[m] * d_beta[m];
    std::vector<double> d_importance(m_count);
    for (std::size_t m = 0; m < m_count; ++m)
      d_importance[m] = ht.beta[m] * (d_beta[m] - weighted);

    Matrix d_input_head(ht.input.rows(), ht.input.cols());
    for (std::size_t m = 0; m < m_count; ++m) {
      hg.attn.b2(0, 0) += d_importance[m];
      // w^m = mean_i U_i w2 + b2, U = tanh(T)
      const double ds = d_importance[m] / static_cast<double>(n);
      const Matrix& u = ht.activated[m];
      Matrix dt(n, attn);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < attn; ++a) {
          const double uia = u(i, a);
          hg.attn.w2(a, 0) += uia * ds;
          dt(i, a) = ds * hp.attn.w2(a, 0) * (1.0 - uia * uia);
        }
      }
      // T = H W1 + b1
      Matrix dw1;
      kp::matmul_at_b(ht.hidden[m], dt, dw1);
      accumulate(hg.attn.w1, dw1);
      accumulate(hg.attn.b1, column_sums(dt));
      Matrix dh;
      kp::matmul_a_bt(dt, hp.attn.w1, dh);
      {
        auto d = dh.flat();
        auto g = upstream.flat();
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += ht.beta[m] * g[i];
      }
      // H = relu(S), S = P W + b, P = A X
      auto pre = ht.pre[m].flat();
      auto d = dh.flat();
      for (std::size_t i = 0; i < d.size(); ++i)
        if (pre[i] <= 0.0) d[i] = 0.0;
      kp::matmul_at_b(ht.aggregated[m], dh, hg.conv[m].weight);
      hg.conv[m].bias = column_sums(dh);
      Matrix dp;
      kp::matmul_a_bt(dh, hp.conv[m].weight, dp);
      // The normalised operator is symmetric, so A^T dP = A dP.
      Matrix dx;
      kp::spmm(ops[m].adj, ops[m].coef, dp, dx);
      accumulate(d_input_head, dx);
    }
    upstream = std::move(d_input_head);
  }
  if (d_input) *d_input = std::move(upstream);
  return grads;
}

}  // namespace colludet
