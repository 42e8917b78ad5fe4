// Copyright 2026 The lttr Authors. All Rights Reserved.
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

#include "lttr/ltt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lttr/error.hpp"

namespace lttr {
namespace {

void check_input(const Eigen::MatrixXd& x, const LttLayerParams& params) {
  if (x.cols() != params.inputs()) {
    raise(ErrorCode::kInvalidInput, "input width " + std::to_string(x.cols()) +
                                        " does not match layer width " +
                                        std::to_string(params.inputs()));
  }
}

Eigen::MatrixXd indicator(const std::vector<std::vector<int>>& masks, int n) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(masks.size()));
  for (std::size_t j = 0; j < masks.size(); ++j) {
    for (int i : masks[j]) m(i, static_cast<Eigen::Index>(j)) = 1.0;
  }
  return m;
}

// z[b, j] = (sum over mask_j in ascending order of W_ltt[i, j] x[b, i]) + b_j.
// Rule extraction enumerates truth tables in the same order, so both agree
// on the sign of z bit for bit.
Eigen::MatrixXd hard_preactivations(const Eigen::MatrixXd& x, const LttLayerParams& params,
                                    const std::vector<std::vector<int>>& masks) {
  Eigen::MatrixXd z(x.rows(), params.nodes());
  for (int j = 0; j < params.nodes(); ++j) {
    const auto& mask = masks[static_cast<std::size_t>(j)];
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      double s = 0.0;
      for (int i : mask) s += params.w_ltt(i, j) * x(r, i);
      z(r, j) = s + params.bias(j);
    }
  }
  return z;
}

}  // namespace

void LttLayerParams::validate() const {
  const int n = inputs();
  const int m = nodes();
  if (w_ltt.rows() != n || w_ltt.cols() != m || bias.size() != m) {
    raise(ErrorCode::kInvalidInput, "layer parameter shapes disagree");
  }
  if (m > 0 && (k < 1 || k > std::min(n - 1, kMaxNodeInputs))) {
    raise(ErrorCode::kInvalidInput, "k must satisfy 1 <= k <= min(n - 1, 16), got k = " +
                                        std::to_string(k) + ", n = " + std::to_string(n));
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) raise(ErrorCode::kInvalidInput, "tau must be positive and finite");
  if (frozen_masks) {
    if (static_cast<int>(frozen_masks->size()) != m) {
      raise(ErrorCode::kInvalidInput, "frozen mask count does not match node count");
    }
    for (const auto& mask : *frozen_masks) {
      if (static_cast<int>(mask.size()) != k) raise(ErrorCode::kInvalidInput, "frozen mask must hold k indices");
      for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i] < 0 || mask[i] >= n) raise(ErrorCode::kInvalidInput, "frozen mask index out of range");
        if (i > 0 && mask[i] <= mask[i - 1]) {
          raise(ErrorCode::kInvalidInput, "frozen mask indices must be distinct and ascending");
        }
      }
    }
  }
}

LttLayerParams init_layer(int n, int nodes, int k, double tau, std::mt19937_64& rng) {
  LttLayerParams p;
  p.k = k;
  p.tau = tau;
  p.w_map.resize(n, nodes);
  p.w_ltt.resize(n, nodes);
  p.bias = Eigen::VectorXd::Zero(nodes);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(std::max(k, 1)));
  // Column-major fill order keeps initialization independent of Eigen internals.
  for (int j = 0; j < nodes; ++j) {
    for (int i = 0; i < n; ++i) p.w_map(i, j) = 0.1 * unit(rng);
    for (int i = 0; i < n; ++i) p.w_ltt(i, j) = scale * unit(rng);
  }
  p.validate();
  return p;
}

std::vector<int> hard_mask(std::span<const double> scores, int k) {
  const int n = static_cast<int>(scores.size());
  if (k < 0 || k > n) raise(ErrorCode::kInvalidInput, "hard_mask: k out of range");
  for (double s : scores) {
    if (!std::isfinite(s)) raise(ErrorCode::kInvalidInput, "hard_mask: scores must be finite");
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)]; });
  order.resize(static_cast<std::size_t>(k));
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<std::vector<int>> node_masks(const LttLayerParams& params) {
  if (params.frozen_masks) return *params.frozen_masks;
  std::vector<std::vector<int>> masks;
  masks.reserve(static_cast<std::size_t>(params.nodes()));
  for (int j = 0; j < params.nodes(); ++j) {
    const auto col = params.w_map.col(j);
    masks.push_back(hard_mask(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), params.k));
  }
  return masks;
}

LayerForwardCache layer_forward(const Eigen::MatrixXd& x, const LttLayerParams& params,
                                Relaxation relaxation, const BisectionOptions& bisection) {
  check_input(x, params);
  LayerForwardCache cache;
  cache.x = x;
  cache.relaxation = relaxation;
  cache.masks = node_masks(params);
  cache.hard = indicator(cache.masks, params.inputs());
  if (!params.frozen_masks && params.nodes() > 0) {
    std::vector<std::span<const double>> cols;
    for (int j = 0; j < params.nodes(); ++j) {
      cols.emplace_back(params.w_map.col(j).data(), static_cast<std::size_t>(params.inputs()));
    }
    cache.solutions = soft_topk_batch(cols, params.k, params.tau, bisection);
    cache.soft.resize(params.inputs(), params.nodes());
    for (int j = 0; j < params.nodes(); ++j) {
      cache.soft.col(j) = Eigen::Map<const Eigen::VectorXd>(cache.solutions[static_cast<std::size_t>(j)].y.data(),
                                                            params.inputs());
    }
  }
  const bool soft_forward = relaxation == Relaxation::kSoft && cache.soft.size() > 0;
  if (soft_forward) {
    cache.z = x * cache.soft.cwiseProduct(params.w_ltt);
    cache.z.rowwise() += params.bias.transpose();
  } else {
    cache.z = hard_preactivations(x, params, cache.masks);
  }
  if (relaxation == Relaxation::kSoft) {
    cache.out = cache.z;
  } else {
    cache.out = (cache.z.array() > 0.0).cast<double>();
  }
  cache.valid = true;
  return cache;
}

Eigen::MatrixXd layer_outputs(const Eigen::MatrixXd& x, const LttLayerParams& params) {
  check_input(x, params);
  const Eigen::MatrixXd z = hard_preactivations(x, params, node_masks(params));
  return (z.array() > 0.0).cast<double>();
}

LayerGradients layer_backward(const Eigen::MatrixXd& upstream, const LayerForwardCache& cache,
                              const LttLayerParams& params, MaskGradient mask_gradient) {
  if (!cache.valid) raise(ErrorCode::kInvalidState, "layer_backward called without a forward cache");
  if (upstream.rows() != cache.x.rows() || upstream.cols() != params.nodes()) {
    raise(ErrorCode::kInvalidInput, "upstream gradient shape does not match the forward batch");
  }
  const bool have_soft = cache.soft.size() > 0;
  const bool soft_forward = cache.relaxation == Relaxation::kSoft && have_soft;
  const Eigen::MatrixXd& forward_mask = soft_forward ? cache.soft : cache.hard;
  const Eigen::MatrixXd& grad_mask =
      (soft_forward || (mask_gradient == MaskGradient::kSoft && have_soft)) ? cache.soft : cache.hard;

  // XtU[i, j] = sum_b x[b, i] * upstream[b, j]; every weight gradient is a
  // per-entry rescaling of it.
  const Eigen::MatrixXd xtu = cache.x.transpose() * upstream;

  LayerGradients g;
  g.w_ltt = xtu.cwiseProduct(grad_mask);
  g.bias = upstream.colwise().sum().transpose();
  g.x = upstream * forward_mask.cwiseProduct(params.w_ltt).transpose();
  g.w_map = Eigen::MatrixXd::Zero(params.inputs(), params.nodes());
  if (have_soft) {
    for (int j = 0; j < params.nodes(); ++j) {
      const Eigen::VectorXd gj = xtu.col(j).cwiseProduct(params.w_ltt.col(j));
      const auto v = vjp_x(cache.solutions[static_cast<std::size_t>(j)], params.tau,
                           std::span<const double>(gj.data(), static_cast<std::size_t>(gj.size())));
      g.w_map.col(j) = Eigen::Map<const Eigen::VectorXd>(v.data(), params.inputs());
    }
  }
  return g;
}

}  // namespace lttr
