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
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lttr/encode.hpp"

namespace lttr {

struct EvalResult {
  std::string metric;  // "roc_auc", "macro_ovr_auc" or "r2"
  double value = 0.0;
  /// Per-class AUC for multiclass; NaN for classes absent from the labels.
  std::vector<double> per_class;
  std::size_t samples = 0;
  std::vector<std::string> warnings;
};

/// Mann-Whitney AUC with midranks for ties: P(pos > neg) + P(tie) / 2.
/// labels hold 0/1. Throws undefined-metric unless both classes occur.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Unweighted mean of one-vs-rest AUCs over the classes present in labels.
/// probs is rows x C.
EvalResult macro_ovr_auc(const Eigen::MatrixXd& probs, std::span<const int> labels);

/// 1 - SS_res / SS_tot. Throws undefined-metric for fewer than two samples
/// or constant targets.
double r2(std::span<const double> predictions, std::span<const double> targets);

/// Task metric for predictions in user units (see predict_bits). Regression
/// is scored against the raw targets.
EvalResult evaluate_predictions(Task task, const Eigen::MatrixXd& predictions,
                                const Targets& targets);

}  // namespace lttr
