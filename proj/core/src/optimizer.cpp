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

#include "lttr/optimizer.hpp"

#include <cmath>

#include "lttr/error.hpp"

namespace lttr {

Adam::Adam(const AdamConfig& config, std::size_t slots) : config_(config), moments_(slots) {
  if (!(config.learning_rate > 0.0)) raise(ErrorCode::kInvalidConfig, "learning rate must be positive");
  if (!(config.beta1 >= 0.0 && config.beta1 < 1.0 && config.beta2 >= 0.0 && config.beta2 < 1.0)) {
    raise(ErrorCode::kInvalidConfig, "adam betas must lie in [0, 1)");
  }
}

void Adam::begin_step() { ++step_; }

void Adam::reset(std::size_t slot) {
  if (slot < moments_.size()) moments_[slot] = {};
}

void Adam::update(std::size_t slot, Eigen::Ref<Eigen::MatrixXd> param,
                  const Eigen::Ref<const Eigen::MatrixXd>& grad, double l1,
                  const Eigen::MatrixXd* keep) {
  if (step_ == 0) raise(ErrorCode::kInvalidState, "Adam::update before begin_step");
  if (slot >= moments_.size()) moments_.resize(slot + 1);
  if (grad.rows() != param.rows() || grad.cols() != param.cols()) {
    raise(ErrorCode::kInvalidInput, "gradient shape does not match parameter");
  }
  Moments& mo = moments_[slot];
  if (mo.m.rows() != param.rows() || mo.m.cols() != param.cols()) {
    mo.m = Eigen::MatrixXd::Zero(param.rows(), param.cols());
    mo.v = Eigen::MatrixXd::Zero(param.rows(), param.cols());
  }
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  const double lr = config_.learning_rate;
  for (Eigen::Index j = 0; j < param.cols(); ++j) {
    for (Eigen::Index i = 0; i < param.rows(); ++i) {
      if (keep && (*keep)(i, j) == 0.0) {
        param(i, j) = 0.0;
        mo.m(i, j) = 0.0;
        mo.v(i, j) = 0.0;
        continue;
      }
      const double g = grad(i, j);
      mo.m(i, j) = b1 * mo.m(i, j) + (1.0 - b1) * g;
      mo.v(i, j) = b2 * mo.v(i, j) + (1.0 - b2) * g * g;
      const double denom = std::sqrt(mo.v(i, j) / c2) + config_.epsilon;
      double w = param(i, j) - lr * (mo.m(i, j) / c1) / denom;
      if (l1 > 0.0) {
        const double shrink = lr * l1 / denom;
        w = w > shrink ? w - shrink : (w < -shrink ? w + shrink : 0.0);
      }
      param(i, j) = w;
    }
  }
}

}  // namespace lttr
