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

// The full predictor: an LTT layer whose outputs are concatenated with the
// raw input bits, h = [x || z], and fed to a linear head with a task
// activation (logistic, normalized exponential, or identity).

#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lttr/encode.hpp"
#include "lttr/ltt.hpp"

namespace lttr {

struct ModelShape {
  int nodes = 8;
  int k = 4;
  double tau = 0.05;
  /// W_cls ~ U(-a, a) with a = 1/sqrt(n + M).
  /// Without skip-concatenation the head keeps width n + M but the x block
  /// is held at zero.
  bool use_skip = true;
};

struct Model {
  LttLayerParams ltt;
  Eigen::MatrixXd w_cls;  // C x (n + M)
  Eigen::VectorXd b_cls;  // C
  Task task = Task::kBinary;
  std::shared_ptr<const EncodingSchema> schema;
  /// n x M, 1 where a W_ltt entry is still trainable, 0 where pruned.
  Eigen::MatrixXd ltt_keep;
  /// C x (n + M), 1 where a classifier weight is trainable.
  Eigen::MatrixXd cls_keep;
  bool use_skip = true;

  int inputs() const { return ltt.inputs(); }
  int nodes() const { return ltt.nodes(); }
  int outputs() const { return static_cast<int>(w_cls.rows()); }
  void validate() const;
};

Model init_model(std::shared_ptr<const EncodingSchema> schema, const ModelShape& shape,
                 std::mt19937_64& rng);

struct ModelCache {
  LayerForwardCache ltt;
  Eigen::MatrixXd h;       // B x (n + M)
  Eigen::MatrixXd logits;  // B x C
};

ModelCache model_forward(const Model& model, const Eigen::MatrixXd& bits,
                         Relaxation relaxation = Relaxation::kStraightThrough,
                         const BisectionOptions& bisection = {});

/// Head logits without building backward caches.
Eigen::MatrixXd model_logits(const Model& model, const Eigen::MatrixXd& bits);

/// Task activation applied row-wise: B x 1 probabilities (binary), B x C
/// probabilities (multiclass), B x 1 standardized values (regression).
Eigen::MatrixXd activate(Task task, const Eigen::MatrixXd& logits);

/// Predictions in user units: probabilities, or de-standardized values.
Eigen::MatrixXd predict_bits(const Model& model, const Eigen::MatrixXd& bits);

/// Prediction for one raw CSV row laid out as `header`.
std::vector<double> predict(const Model& model, const std::vector<std::string>& header,
                            const std::vector<std::string>& row);

struct LossGradient {
  double loss = 0.0;
  Eigen::MatrixXd d_logits;  // B x C, already divided by B
};

/// Mean batch loss and its gradient with respect to the logits. labels is
/// used for classification, values (standardized) for regression.
LossGradient loss_and_grad(Task task, const Eigen::MatrixXd& logits, std::span<const int> labels,
                           std::span<const double> values);

struct ModelGradients {
  LayerGradients ltt;
  Eigen::MatrixXd w_cls;
  Eigen::VectorXd b_cls;
};

ModelGradients model_backward(const Model& model, const ModelCache& cache,
                              const Eigen::MatrixXd& d_logits,
                              MaskGradient mask_gradient = MaskGradient::kHard);

}  // namespace lttr
