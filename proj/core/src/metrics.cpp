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

#include "lttr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lttr/error.hpp"

namespace lttr {

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) raise(ErrorCode::kInvalidInput, "roc_auc: length mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos_rank_sum = 0.0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]] == 1) {
        pos_rank_sum += midrank;
        ++pos;
      } else if (labels[order[t]] != 0) {
        raise(ErrorCode::kInvalidInput, "roc_auc: labels must be 0 or 1");
      }
    }
    i = j;
  }
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) raise(ErrorCode::kUndefinedMetric, "roc_auc needs both classes present");
  const double np = static_cast<double>(pos);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(neg));
}

EvalResult macro_ovr_auc(const Eigen::MatrixXd& probs, std::span<const int> labels) {
  if (static_cast<std::size_t>(probs.rows()) != labels.size()) {
    raise(ErrorCode::kInvalidInput, "macro_ovr_auc: row count mismatch");
  }
  EvalResult result;
  result.metric = "macro_ovr_auc";
  result.samples = labels.size();
  const auto classes = static_cast<int>(probs.cols());
  std::vector<int> counts(static_cast<std::size_t>(classes), 0);
  for (int y : labels) {
    if (y < 0 || y >= classes) raise(ErrorCode::kInvalidInput, "macro_ovr_auc: label out of range");
    ++counts[static_cast<std::size_t>(y)];
  }
  const auto present = std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; });
  if (present < 2) raise(ErrorCode::kUndefinedMetric, "macro_ovr_auc needs at least two classes present");

  std::vector<double> column(labels.size());
  std::vector<int> binary(labels.size());
  double sum = 0.0;
  for (int c = 0; c < classes; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0) {
      result.per_class.push_back(std::numeric_limits<double>::quiet_NaN());
      result.warnings.push_back("class " + std::to_string(c) + " absent from labels; skipped");
      continue;
    }
    for (std::size_t r = 0; r < labels.size(); ++r) {
      column[r] = probs(static_cast<Eigen::Index>(r), c);
      binary[r] = labels[r] == c ? 1 : 0;
    }
    const double auc = roc_auc(column, binary);
    result.per_class.push_back(auc);
    sum += auc;
  }
  result.value = sum / static_cast<double>(present);
  return result;
}

double r2(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.size() != targets.size()) raise(ErrorCode::kInvalidInput, "r2: length mismatch");
  if (targets.size() < 2) raise(ErrorCode::kUndefinedMetric, "r2 needs at least two samples");
  const double mean = std::accumulate(targets.begin(), targets.end(), 0.0) / static_cast<double>(targets.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    ss_res += (targets[i] - predictions[i]) * (targets[i] - predictions[i]);
    ss_tot += (targets[i] - mean) * (targets[i] - mean);
  }
  if (ss_tot == 0.0) raise(ErrorCode::kUndefinedMetric, "r2 undefined for constant targets");
  return 1.0 - ss_res / ss_tot;
}

EvalResult evaluate_predictions(Task task, const Eigen::MatrixXd& predictions, const Targets& targets) {
  EvalResult result;
  switch (task) {
    case Task::kBinary: {
      result.metric = "roc_auc";
      result.samples = targets.labels.size();
      const Eigen::VectorXd col = predictions.col(0);
      result.value = roc_auc(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())),
                             targets.labels);
      break;
    }
    case Task::kMulticlass:
      result = macro_ovr_auc(predictions, targets.labels);
      break;
    case Task::kRegression: {
      result.metric = "r2";
      result.samples = targets.raw.size();
      const Eigen::VectorXd col = predictions.col(0);
      result.value = r2(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), targets.raw);
      break;
    }
  }
  return result;
}

}  // namespace lttr
