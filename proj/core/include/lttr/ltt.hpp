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

#pragma once

// A layer of Learnable Truth Table nodes.
//
// Node j reads the k inputs with the largest connection scores W_map[:, j]
// and fires iff sum_{i in mask} W_ltt[i, j] x_i + b_j > 0. The forward pass
// uses the hard TopK mask and a hard threshold; the backward pass routes the
// mask gradient through the soft TopK Jacobian and treats the threshold as
// the identity (straight-through).

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "lttr/softtopk.hpp"

namespace lttr {

inline constexpr int kMaxNodeInputs = 16;

/// Which mask multiplies x in the W_ltt gradient.
enum class MaskGradient { kHard, kSoft };

/// kStraightThrough is the trained network. kSoft replaces the hard mask by
/// the soft TopK selection and drops the output threshold, giving a smooth
/// surrogate whose gradients the backward pass computes exactly.
enum class Relaxation { kStraightThrough, kSoft };

struct LttLayerParams {
  Eigen::MatrixXd w_map;  // n x M
  Eigen::MatrixXd w_ltt;  // n x M
  Eigen::VectorXd bias;   // M
  int k = 1;
  double tau = 0.01;
  /// Per-node selected inputs (sorted ascending) once phase one is over.
  std::optional<std::vector<std::vector<int>>> frozen_masks;

  int inputs() const { return static_cast<int>(w_map.rows()); }
  int nodes() const { return static_cast<int>(w_map.cols()); }
  void validate() const;
};

/// W_map ~ U(-0.1, 0.1), W_ltt ~ U(-1, 1) / sqrt(k), b = 0.
LttLayerParams init_layer(int n, int nodes, int k, double tau, std::mt19937_64& rng);

/// Indices of the k largest scores, ascending. Ties go to the lower index.
std::vector<int> hard_mask(std::span<const double> scores, int k);

/// Current per-node input sets: the frozen masks if present, else hard_mask
/// of each W_map column.
std::vector<std::vector<int>> node_masks(const LttLayerParams& params);

struct LayerForwardCache {
  Eigen::MatrixXd x;                       // B x n
  std::vector<std::vector<int>> masks;     // per node, ascending
  Eigen::MatrixXd hard;                    // n x M indicator of masks
  Eigen::MatrixXd soft;                    // n x M soft selection, empty when frozen
  std::vector<SoftTopKSolution> solutions;  // per node, empty when frozen
  Eigen::MatrixXd z;                       // B x M pre-activations
  Eigen::MatrixXd out;                     // B x M outputs
  Relaxation relaxation = Relaxation::kStraightThrough;
  bool valid = false;
};

/// `bisection` controls the soft TopK solves; gradient checks tighten it.
LayerForwardCache layer_forward(const Eigen::MatrixXd& x, const LttLayerParams& params,
                                Relaxation relaxation = Relaxation::kStraightThrough,
                                const BisectionOptions& bisection = {});

/// Outputs only, skipping the soft TopK solves. Matches layer_forward(...).out.
Eigen::MatrixXd layer_outputs(const Eigen::MatrixXd& x, const LttLayerParams& params);

struct LayerGradients {
  Eigen::MatrixXd w_map;
  Eigen::MatrixXd w_ltt;
  Eigen::VectorXd bias;
  Eigen::MatrixXd x;  // B x n
};

/// upstream is dL/d(out), B x M. Gradients are summed over the batch.
LayerGradients layer_backward(const Eigen::MatrixXd& upstream, const LayerForwardCache& cache,
                              const LttLayerParams& params,
                              MaskGradient mask_gradient = MaskGradient::kHard);

}  // namespace lttr
