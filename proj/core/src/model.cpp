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

#include "lttr/model.hpp"

#include <cmath>

#include "lttr/error.hpp"

namespace lttr {
namespace {

double softplus(double v) { return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v)); }

double sigmoid(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

Eigen::MatrixXd concat(const Eigen::MatrixXd& x, const Eigen::MatrixXd& z) {
  Eigen::MatrixXd h(x.rows(), x.cols() + z.cols());
  h << x, z;
  return h;
}

}  // namespace

void Model::validate() const {
  ltt.validate();
  const Eigen::Index width = inputs() + nodes();
  if (w_cls.cols() != width || b_cls.size() != w_cls.rows()) {
    raise(ErrorCode::kInvalidInput, "classifier shape does not match n + M");
  }
  const int expected = task == Task::kMulticlass && schema ? schema->target.outputs() : 1;
  if (task != Task::kMulticlass ? w_cls.rows() != 1 : w_cls.rows() != expected) {
    raise(ErrorCode::kInvalidInput, "classifier output count does not match the task");
  }
  if (ltt_keep.rows() != ltt.w_ltt.rows() || ltt_keep.cols() != ltt.w_ltt.cols() ||
      cls_keep.rows() != w_cls.rows() || cls_keep.cols() != w_cls.cols()) {
    raise(ErrorCode::kInvalidInput, "keep masks do not match parameter shapes");
  }
}

Model init_model(std::shared_ptr<const EncodingSchema> schema, const ModelShape& shape,
                 std::mt19937_64& rng) {
  if (!schema) raise(ErrorCode::kInvalidInput, "model needs an encoding schema");
  if (shape.nodes < 0) raise(ErrorCode::kInvalidConfig, "node count must be non-negative");
  Model model;
  const int n = schema->n_bits;
  model.task = schema->target.task;
  model.ltt = init_layer(n, shape.nodes, shape.k, shape.tau, rng);
  const int c = schema->target.outputs();
  model.w_cls.resize(c, n + shape.nodes);
  // A zero head would block all gradient to the nodes on symmetric data.
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max(1, n + shape.nodes)));
  for (int r = 0; r < c; ++r) {
    for (int col = 0; col < n + shape.nodes; ++col) model.w_cls(r, col) = bound * unit(rng);
  }
  model.b_cls = Eigen::VectorXd::Zero(c);
  model.ltt_keep = Eigen::MatrixXd::Ones(n, shape.nodes);
  model.cls_keep = Eigen::MatrixXd::Ones(c, n + shape.nodes);
  model.use_skip = shape.use_skip;
  if (!shape.use_skip) {
    model.cls_keep.leftCols(n).setZero();
    model.w_cls.leftCols(n).setZero();
  }
  model.schema = std::move(schema);
  model.validate();
  return model;
}

ModelCache model_forward(const Model& model, const Eigen::MatrixXd& bits, Relaxation relaxation,
                         const BisectionOptions& bisection) {
  if (bits.cols() != model.inputs()) {
    raise(ErrorCode::kInvalidInput, "row width " + std::to_string(bits.cols()) +
                                        " does not match model width " + std::to_string(model.inputs()));
  }
  ModelCache cache;
  cache.ltt = layer_forward(bits, model.ltt, relaxation, bisection);
  cache.h = concat(bits, cache.ltt.out);
  cache.logits = cache.h * model.w_cls.transpose();
  cache.logits.rowwise() += model.b_cls.transpose();
  return cache;
}

Eigen::MatrixXd model_logits(const Model& model, const Eigen::MatrixXd& bits) {
  if (bits.cols() != model.inputs()) {
    raise(ErrorCode::kInvalidInput, "row width " + std::to_string(bits.cols()) +
                                        " does not match model width " + std::to_string(model.inputs()));
  }
  const Eigen::MatrixXd h = concat(bits, layer_outputs(bits, model.ltt));
  Eigen::MatrixXd logits = h * model.w_cls.transpose();
  logits.rowwise() += model.b_cls.transpose();
  return logits;
}

Eigen::MatrixXd activate(Task task, const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  switch (task) {
    case Task::kBinary:
      for (Eigen::Index r = 0; r < logits.rows(); ++r) out(r, 0) = sigmoid(logits(r, 0));
      break;
    case Task::kMulticlass:
      for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const double mx = logits.row(r).maxCoeff();
        double sum = 0.0;
        for (Eigen::Index c = 0; c < logits.cols(); ++c) sum += out(r, c) = std::exp(logits(r, c) - mx);
        out.row(r) /= sum;
      }
      break;
    case Task::kRegression:
      out = logits;
      break;
  }
  return out;
}

Eigen::MatrixXd predict_bits(const Model& model, const Eigen::MatrixXd& bits) {
  Eigen::MatrixXd out = activate(model.task, model_logits(model, bits));
  if (model.task == Task::kRegression && model.schema) {
    out = (out.array() * model.schema->target.scale + model.schema->target.mean).matrix();
  }
  return out;
}

std::vector<double> predict(const Model& model, const std::vector<std::string>& header,
                            const std::vector<std::string>& row) {
  if (!model.schema) raise(ErrorCode::kInvalidState, "model has no encoding schema");
  const RowEncoder encoder(*model.schema, header);
  Eigen::MatrixXd bits(1, model.inputs());
  encoder.bits(row, std::span<double>(bits.data(), static_cast<std::size_t>(bits.size())));
  const Eigen::MatrixXd p = predict_bits(model, bits);
  return {p.data(), p.data() + p.size()};
}

LossGradient loss_and_grad(Task task, const Eigen::MatrixXd& logits, std::span<const int> labels,
                           std::span<const double> values) {
  const Eigen::Index b = logits.rows();
  if (b == 0) raise(ErrorCode::kInvalidInput, "loss of an empty batch");
  LossGradient out;
  out.d_logits.resize(b, logits.cols());
  const double inv = 1.0 / static_cast<double>(b);
  if (task == Task::kRegression) {
    if (static_cast<Eigen::Index>(values.size()) != b) raise(ErrorCode::kInvalidInput, "target count mismatch");
    for (Eigen::Index r = 0; r < b; ++r) {
      const double d = logits(r, 0) - values[static_cast<std::size_t>(r)];
      out.loss += d * d;
      out.d_logits(r, 0) = 2.0 * d * inv;
    }
    out.loss *= inv;
    return out;
  }
  if (static_cast<Eigen::Index>(labels.size()) != b) raise(ErrorCode::kInvalidInput, "label count mismatch");
  const int classes = task == Task::kBinary ? 2 : static_cast<int>(logits.cols());
  for (Eigen::Index r = 0; r < b; ++r) {
    const int y = labels[static_cast<std::size_t>(r)];
    if (y < 0 || y >= classes) raise(ErrorCode::kInvalidInput, "invalid class label " + std::to_string(y));
  }
  if (task == Task::kBinary) {
    for (Eigen::Index r = 0; r < b; ++r) {
      const double l = logits(r, 0);
      const double y = labels[static_cast<std::size_t>(r)];
      out.loss += softplus(l) - y * l;
      out.d_logits(r, 0) = (sigmoid(l) - y) * inv;
    }
  } else {
    const Eigen::MatrixXd p = activate(task, logits);
    for (Eigen::Index r = 0; r < b; ++r) {
      const int y = labels[static_cast<std::size_t>(r)];
      const double mx = logits.row(r).maxCoeff();
      const double lse = mx + std::log((logits.row(r).array() - mx).exp().sum());
      out.loss += lse - logits(r, y);
      out.d_logits.row(r) = p.row(r) * inv;
      out.d_logits(r, y) -= inv;
    }
  }
  out.loss *= inv;
  return out;
}

ModelGradients model_backward(const Model& model, const ModelCache& cache,
                              const Eigen::MatrixXd& d_logits, MaskGradient mask_gradient) {
  if (d_logits.rows() != cache.h.rows() || d_logits.cols() != model.outputs()) {
    raise(ErrorCode::kInvalidInput, "logit gradient shape does not match the forward batch");
  }
  ModelGradients g;
  g.w_cls = d_logits.transpose() * cache.h;
  g.b_cls = d_logits.colwise().sum().transpose();
  const Eigen::MatrixXd d_out = d_logits * model.w_cls.rightCols(model.nodes());
  g.ltt = layer_backward(d_out, cache.ltt, model.ltt, mask_gradient);
  return g;
}

}  // namespace lttr
