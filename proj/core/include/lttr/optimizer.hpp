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

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace lttr {

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adaptive-moment optimizer over a fixed list of parameter tensors,
/// addressed by slot index.
///
/// An optional L1 weight adds a proximal soft-threshold after the moment
/// step, scaled by the same per-entry step size, so entries can land on
/// exactly zero. An optional keep mask pins entries (and their moments) at
/// zero wherever it is 0.
class Adam {
 public:
  explicit Adam(const AdamConfig& config = {}, std::size_t slots = 0);

  /// Advances the shared step counter. Call once per mini-batch.
  void begin_step();

  void update(std::size_t slot, Eigen::Ref<Eigen::MatrixXd> param,
              const Eigen::Ref<const Eigen::MatrixXd>& grad, double l1 = 0.0,
              const Eigen::MatrixXd* keep = nullptr);

  /// Zeroes both moments of one slot, e.g. when a phase changes.
  void reset(std::size_t slot);

  long steps() const { return step_; }
  const AdamConfig& config() const { return config_; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }

 private:
  struct Moments {
    Eigen::MatrixXd m;
    Eigen::MatrixXd v;
  };

  AdamConfig config_;
  std::vector<Moments> moments_;
  long step_ = 0;
};

}  // namespace lttr
