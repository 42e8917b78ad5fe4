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

#include "lttr/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <tuple>

#include "lttr/error.hpp"
#include "lttr/metrics.hpp"
#include "lttr/optimizer.hpp"
#include "lttr/rules.hpp"

namespace lttr {
namespace {

enum Slot : std::size_t { kWMap, kWLtt, kBias, kWCls, kBCls, kSlots };

std::vector<std::size_t> shuffled(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng() % i]);
  return p;
}

std::string metric_name(Task task) {
  switch (task) {
    case Task::kBinary: return "roc_auc";
    case Task::kMulticlass: return "macro_ovr_auc";
    case Task::kRegression: return "r2";
  }
  return "";
}

struct Batch {
  Eigen::MatrixXd bits;
  std::vector<int> labels;
  std::vector<double> values;
};

Batch gather(const BitDataset& data, std::span<const std::size_t> rows) {
  Batch b;
  b.bits.resize(static_cast<Eigen::Index>(rows.size()), data.bits.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    b.bits.row(static_cast<Eigen::Index>(i)) = data.bits.row(static_cast<Eigen::Index>(rows[i]));
    if (!data.targets.labels.empty()) b.labels.push_back(data.targets.labels[rows[i]]);
    if (!data.targets.values.empty()) b.values.push_back(data.targets.values[rows[i]]);
  }
  return b;
}

// Which parameters an epoch updates.
enum class Scope { kAll, kFrozenMasks, kHeadOnly };

// One pass over the data. Returns the row-weighted mean loss.
double run_epoch(Model& model, const BitDataset& data, const TrainConfig& config, Adam& opt,
                 std::mt19937_64& rng, Scope scope, const Eigen::MatrixXd& cls_keep, int epoch) {
  const auto order = shuffled(data.rows(), rng);
  const auto bs = static_cast<std::size_t>(config.batch_size);
  double total = 0.0;
  for (std::size_t start = 0; start < order.size(); start += bs) {
    const std::size_t end = std::min(order.size(), start + bs);
    const Batch b = gather(data, std::span<const std::size_t>(order).subspan(start, end - start));
    const ModelCache cache = model_forward(model, b.bits);
    const LossGradient lg = loss_and_grad(model.task, cache.logits, b.labels, b.values);
    if (!std::isfinite(lg.loss)) {
      raise(ErrorCode::kTrainingFailure, "non-finite loss at epoch " + std::to_string(epoch));
    }
    total += lg.loss * static_cast<double>(end - start);
    const ModelGradients g = model_backward(model, cache, lg.d_logits, config.mask_gradient);
    opt.begin_step();
    if (scope == Scope::kAll) opt.update(kWMap, model.ltt.w_map, g.ltt.w_map);
    if (scope != Scope::kHeadOnly) {
      opt.update(kWLtt, model.ltt.w_ltt, g.ltt.w_ltt, 0.0, &model.ltt_keep);
      opt.update(kBias, model.ltt.bias, g.ltt.bias);
    }
    opt.update(kWCls, model.w_cls, g.w_cls, config.l1, &cls_keep);
    opt.update(kBCls, model.b_cls, g.b_cls);
  }
  const double mean = total / static_cast<double>(order.size());
  if (!std::isfinite(mean) || !model.ltt.w_ltt.allFinite() || !model.w_cls.allFinite()) {
    raise(ErrorCode::kTrainingFailure, "parameters diverged at epoch " + std::to_string(epoch));
  }
  return mean;
}

const BitDataset& metric_rows(const BitDataset& train_data, const BitDataset& val_data) {
  return val_data.rows() > 0 ? val_data : train_data;
}

int rule_complexity(const Model& model, const Eigen::MatrixXd& bits, bool use_xor) {
  ExtractOptions opts;
  opts.use_xor = use_xor;
  return extract_rules(model, bits, opts).complexity;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 0 || finetune_epochs < 0 || prune_rounds < 0) {
    raise(ErrorCode::kInvalidConfig, "epoch and round counts must be non-negative");
  }
  if (!(prune_fraction > 0.0 && prune_fraction < 1.0)) {
    raise(ErrorCode::kInvalidConfig, "prune_fraction must lie in (0, 1)");
  }
  if (!(learning_rate > 0.0) || !(finetune_learning_rate > 0.0)) {
    raise(ErrorCode::kInvalidConfig, "learning rates must be positive");
  }
  if (batch_size < 1) raise(ErrorCode::kInvalidConfig, "batch_size must be >= 1");
  if (l1 < 0.0 || complexity_weight < 0.0) raise(ErrorCode::kInvalidConfig, "penalties must be non-negative");
}

double validation_metric(const Model& model, const BitDataset& data) {
  try {
    return evaluate_predictions(model.task, predict_bits(model, data.bits), data.targets).value;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kUndefinedMetric) return std::numeric_limits<double>::quiet_NaN();
    throw;
  }
}

void freeze_masks(Model& model) {
  if (!model.ltt.frozen_masks) model.ltt.frozen_masks = node_masks(model.ltt);
}

int active_connections(const Model& model) {
  const auto masks = node_masks(model.ltt);
  int active = 0;
  for (std::size_t j = 0; j < masks.size(); ++j) {
    for (int i : masks[j]) active += model.ltt_keep(i, static_cast<Eigen::Index>(j)) != 0.0 ? 1 : 0;
  }
  return active;
}

void train(Model& model, const BitDataset& train_data, const BitDataset& val_data,
           const TrainConfig& config, TrainLog& log) {
  config.validate();
  model.validate();
  if (train_data.rows() == 0) raise(ErrorCode::kInvalidInput, "training set is empty");
  if (train_data.n_bits() != model.inputs()) raise(ErrorCode::kInvalidInput, "dataset width does not match the model");
  log.metric = metric_name(model.task);
  std::mt19937_64 rng(config.seed);
  Adam opt(AdamConfig{config.learning_rate}, kSlots);
  const Scope scope = model.ltt.frozen_masks ? Scope::kFrozenMasks : Scope::kAll;
  const BitDataset& eval = metric_rows(train_data, val_data);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const double loss = run_epoch(model, train_data, config, opt, rng, scope, model.cls_keep, epoch);
    log.epochs.push_back({epoch, loss, validation_metric(model, eval)});
  }
  freeze_masks(model);
}

void prune_smallest(Model& model, int count) {
  if (!model.ltt.frozen_masks) raise(ErrorCode::kInvalidState, "pruning needs frozen masks");
  std::vector<std::tuple<double, int, int>> entries;
  const auto& masks = *model.ltt.frozen_masks;
  for (std::size_t j = 0; j < masks.size(); ++j) {
    const auto node = static_cast<int>(j);
    for (int i : masks[j]) {
      if (model.ltt_keep(i, node) != 0.0) entries.emplace_back(std::abs(model.ltt.w_ltt(i, node)), node, i);
    }
  }
  if (count > static_cast<int>(entries.size())) raise(ErrorCode::kInvalidConfig, "cannot prune more connections than are active");
  std::sort(entries.begin(), entries.end());
  for (int e = 0; e < count; ++e) {
    const auto& [mag, node, i] = entries[static_cast<std::size_t>(e)];
    model.ltt_keep(i, node) = 0.0;
    model.ltt.w_ltt(i, node) = 0.0;
  }
}

void prune_finetune(Model& model, const BitDataset& train_data, const BitDataset& val_data,
                    const TrainConfig& config, TrainLog& log) {
  config.validate();
  if (!model.ltt.frozen_masks) raise(ErrorCode::kInvalidState, "prune_finetune needs frozen masks");
  if (train_data.rows() == 0) raise(ErrorCode::kInvalidInput, "training set is empty");
  log.metric = metric_name(model.task);
  log.rounds.clear();

  Eigen::MatrixXd dev(train_data.bits.rows() + val_data.bits.rows(), train_data.bits.cols());
  dev << train_data.bits, val_data.bits;
  const BitDataset& eval = metric_rows(train_data, val_data);

  auto record = [&](int round, int complexity, bool head_only) {
    RoundRecord r;
    r.round = round;
    r.active_connections = active_connections(model);
    r.val_metric = validation_metric(model, eval);
    r.complexity = complexity;
    r.score = r.val_metric - config.complexity_weight * r.complexity;
    r.head_only = head_only;
    log.rounds.push_back(r);
  };
  auto finetune = [&](Scope scope, const Eigen::MatrixXd& cls_keep, std::mt19937_64& rng) {
    Adam opt(AdamConfig{config.finetune_learning_rate}, kSlots);
    for (int epoch = 1; epoch <= config.finetune_epochs; ++epoch) {
      const double loss = run_epoch(model, train_data, config, opt, rng, scope, cls_keep, epoch);
      log.finetune_epochs.push_back({epoch, loss, std::numeric_limits<double>::quiet_NaN()});
    }
    if (!log.finetune_epochs.empty()) log.finetune_epochs.back().val_metric = validation_metric(model, eval);
  };

  std::vector<Model> snapshots{model};
  int previous = rule_complexity(model, dev, config.use_xor);
  record(0, previous, false);
  std::mt19937_64 rng(config.seed + 1);
  for (int round = 1; round <= config.prune_rounds; ++round) {
    const int active = active_connections(model);
    const int count = std::max(1, static_cast<int>(std::floor(config.prune_fraction * active)));
    if (count >= active) {
      if (round == 1) {
        raise(ErrorCode::kInvalidConfig, "prune_fraction would remove all " + std::to_string(active) +
                                             " active connections in one round");
      }
      break;
    }
    prune_smallest(model, count);
    const Model pruned = model;
    // Classifier weights that are already zero stay zero while fine-tuning.
    const Eigen::MatrixXd cls_keep =
        model.cls_keep.cwiseProduct((model.w_cls.array() != 0.0).cast<double>().matrix());
    finetune(Scope::kFrozenMasks, cls_keep, rng);
    int complexity = rule_complexity(model, dev, config.use_xor);
    bool head_only = false;
    if (complexity > previous) {
      // Fine-tuning rewrote some node's logic into a longer formula. Keep the
      // pruned nodes as they are and refit only the head.
      model = pruned;
      finetune(Scope::kHeadOnly, cls_keep, rng);
      complexity = rule_complexity(model, dev, config.use_xor);
      head_only = true;
    }
    snapshots.push_back(model);
    record(round, complexity, head_only);
    previous = complexity;
  }

  // Later rounds win ties: equal score with fewer connections.
  int best = 0;
  for (std::size_t r = 1; r < log.rounds.size(); ++r) {
    const double s = log.rounds[r].score;
    const double b = log.rounds[static_cast<std::size_t>(best)].score;
    if (std::isnan(b) || s >= b) best = static_cast<int>(r);
  }
  log.selected_round = best;
  model = snapshots[static_cast<std::size_t>(best)];
}

}  // namespace lttr
