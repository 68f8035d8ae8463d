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

#include "colludet/detector.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "colludet/error.hpp"

namespace colludet {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return s;
}

void check_finite(const Matrix& m, std::size_t epoch, const std::string& what) {
  if (!all_finite(m))
    throw NumericError("epoch " + std::to_string(epoch) + ": non-finite values in " + what);
}

}  // namespace

std::vector<double> init_center(const Matrix& z, double eps) {
  if (z.rows() == 0) throw ShapeError("init_center: empty training set");
  std::vector<double> c(z.cols(), 0.0);
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t j = 0; j < z.cols(); ++j) c[j] += z(i, j);
  for (double& v : c) {
    v /= static_cast<double>(z.rows());
    if (std::abs(v) < eps) v = v < 0.0 ? -eps : eps;
  }
  return c;
}

SvddLoss svdd_loss(const Matrix& z, const Hypersphere& sphere, Matrix* dz) {
  if (z.cols() != sphere.center.size())
    throw ShapeError("svdd_loss: embedding width " + std::to_string(z.cols()) +
                     " vs centre width " + std::to_string(sphere.center.size()));
  if (!sphere.radius2) throw ShapeError("svdd_loss: radius not set");
  if (z.rows() == 0) throw ShapeError("svdd_loss: no rows");
  const double r2 = *sphere.radius2;
  const double scale = 1.0 / (sphere.mu * static_cast<double>(z.rows()));
  SvddLoss out;
  out.dist2.resize(z.rows());
  double slack = 0.0;
  if (dz) *dz = Matrix(z.rows(), z.cols());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    out.dist2[i] = squared_distance(z.row(i), sphere.center);
    if (out.dist2[i] > r2) {
      slack += out.dist2[i] - r2;
      if (dz)
        for (std::size_t j = 0; j < z.cols(); ++j)
          (*dz)(i, j) = 2.0 * scale * (z(i, j) - sphere.center[j]);
    }
  }
  out.loss = r2 + scale * slack;
  return out;
}

double update_radius(std::span<const double> dist2, double mu) {
  if (dist2.empty()) throw ShapeError("update_radius: no distances");
  if (!(mu > 0.0 && mu <= 1.0)) throw ShapeError("update_radius: mu must be in (0, 1]");
  std::vector<double> sorted(dist2.begin(), dist2.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  // The small offset absorbs representation error in (1 - mu) * n.
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - mu) * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

Adam::Adam(const HsaParams& like, AdamConfig cfg)
    : cfg_(cfg), state_{HsaParams::zeros(like.config()), HsaParams::zeros(like.config()), 0} {
  if (!(cfg.learning_rate > 0.0)) throw ShapeError("Adam: learning rate must be positive");
}

void Adam::step(HsaParams& params, const HsaParams& grads) {
  ++state_.step;
  const double t = static_cast<double>(state_.step);
  const double bc1 = 1.0 - std::pow(cfg_.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg_.beta2, t);
  auto p = params.tensors();
  auto g = grads.tensors();
  auto m = state_.first.tensors();
  auto v = state_.second.tensors();
  for (std::size_t k = 0; k < p.size(); ++k) {
    auto pf = p[k].second->flat();
    auto gf = g[k].second->flat();
    auto mf = m[k].second->flat();
    auto vf = v[k].second->flat();
    if (gf.size() != pf.size()) throw ShapeError("Adam: gradient shape mismatch for " + p[k].first);
    for (std::size_t i = 0; i < pf.size(); ++i) {
      mf[i] = cfg_.beta1 * mf[i] + (1.0 - cfg_.beta1) * gf[i];
      vf[i] = cfg_.beta2 * vf[i] + (1.0 - cfg_.beta2) * gf[i] * gf[i];
      const double update = (mf[i] / bc1) / (std::sqrt(vf[i] / bc2) + cfg_.eps);
      pf[i] -= cfg_.learning_rate * (update + cfg_.weight_decay * pf[i]);
    }
  }
}

TrainResult train(std::span<const SubgraphOperator> ops, const Matrix& x,
                  std::span<const std::size_t> train_rows, const TrainConfig& cfg,
                  std::span<const std::size_t> val_rows) {
  if (train_rows.empty()) throw ShapeError("train: empty training set");
  if (cfg.epochs == 0) throw ShapeError("train: epochs must be at least 1");
  if (!(cfg.mu > 0.0 && cfg.mu <= 1.0)) throw ShapeError("train: mu must be in (0, 1]");
  if (cfg.radius_every == 0) throw ShapeError("train: radius_every must be at least 1");
  if (!all_finite(x)) throw NumericError("train: non-finite input features");

  const HsaConfig hc{x.cols(), cfg.hidden, cfg.attn_dim, cfg.heads, ops.size()};
  TrainResult result;
  result.params = HsaParams::init(hc, cfg.seed);
  Adam adam(result.params, {cfg.learning_rate, 0.9, 0.999, 1e-8, cfg.weight_decay});

  Hypersphere& sphere = result.sphere;
  sphere.mu = cfg.mu;
  {
    const auto trace = hsa_forward(ops, x, result.params);
    check_finite(trace.output(), 0, "initial embeddings");
    sphere.center = init_center(gather_rows(trace.output(), train_rows), cfg.center_eps);
    sphere.radius2 = 0.0;
  }

  const std::size_t n = x.rows();
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto trace = hsa_forward(ops, x, result.params);
    check_finite(trace.output(), epoch, "embeddings");
    Matrix dz_train;
    const auto loss = svdd_loss(gather_rows(trace.output(), train_rows), sphere, &dz_train);
    if (!std::isfinite(loss.loss))
      throw NumericError("epoch " + std::to_string(epoch) + ": non-finite loss");

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = loss.loss;
    rec.radius2 = *sphere.radius2;
    for (const auto& h : trace.heads) rec.beta.push_back(h.beta);
    if (!val_rows.empty()) {
      const auto val = svdd_loss(gather_rows(trace.output(), val_rows), sphere);
      rec.val_loss = val.loss;
      const auto inside = std::count_if(val.dist2.begin(), val.dist2.end(),
                                        [&](double d) { return d <= *sphere.radius2; });
      rec.val_recall = static_cast<double>(inside) / static_cast<double>(val_rows.size());
    }
    result.log.push_back(std::move(rec));

    Matrix dz(n, trace.output().cols());
    for (std::size_t r = 0; r < train_rows.size(); ++r)
      std::copy_n(dz_train.row(r).begin(), dz.cols(), dz.row(train_rows[r]).begin());
    auto grads = hsa_backward(ops, trace, dz, result.params);
    for (const auto& [name, g] : grads.tensors()) check_finite(*g, epoch, "gradient of " + name);
    adam.step(result.params, grads);
    for (const auto& [name, p] : result.params.tensors()) check_finite(*p, epoch, name);

    if (epoch % cfg.radius_every == 0) sphere.radius2 = update_radius(loss.dist2, cfg.mu);
  }

  // Final radius from the trained network.
  const auto trace = hsa_forward(ops, x, result.params);
  check_finite(trace.output(), cfg.epochs, "final embeddings");
  const auto final_loss = svdd_loss(gather_rows(trace.output(), train_rows), sphere);
  sphere.radius2 = update_radius(final_loss.dist2, cfg.mu);
  spdlog::debug("trained {} epochs, final r^2 = {}", cfg.epochs, *sphere.radius2);
  return result;
}

std::vector<Score> score_embeddings(const Matrix& z, const Hypersphere& sphere) {
  if (!sphere.radius2) throw ShapeError("score: hypersphere has not been fitted");
  if (z.cols() != sphere.center.size()) throw ShapeError("score: embedding width mismatch");
  std::vector<Score> out(z.rows());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    out[i].dist2 = squared_distance(z.row(i), sphere.center);
    out[i].margin = out[i].dist2 - *sphere.radius2;
    out[i].collusive = out[i].dist2 <= *sphere.radius2;
  }
  return out;
}

std::vector<Score> score(std::span<const SubgraphOperator> ops, const Matrix& x,
                         const HsaParams& params, const Hypersphere& sphere) {
  if (!sphere.radius2) throw ShapeError("score: hypersphere has not been fitted");
  const auto trace = hsa_forward(ops, x, params);
  return score_embeddings(trace.output(), sphere);
}

}  // namespace colludet
