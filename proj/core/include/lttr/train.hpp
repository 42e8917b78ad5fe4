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

// Two-phase training. Phase one fits all parameters with mini-batch Adam,
// recomputing every node's mask from W_map at each step, then freezes the
// masks. Phase two repeatedly prunes the smallest-magnitude logic weights
// and fine-tunes the rest, and keeps the round with the best trade-off
// between validation metric and rule complexity.

#include <cstdint>
#include <string>
#include <vector>

#include "lttr/encode.hpp"
#include "lttr/ltt.hpp"
#include "lttr/model.hpp"

namespace lttr {

struct TrainConfig {
  int epochs = 300;
  int finetune_epochs = 50;
  int prune_rounds = 5;
  double prune_fraction = 0.2;
  double learning_rate = 0.01;
  double finetune_learning_rate = 0.01;
  int batch_size = 64;
  std::uint64_t seed = 0;
  /// L1 weight on the classifier matrix.
  double l1 = 1e-4;
  /// lambda_c in the round score: metric - lambda_c * complexity.
  double complexity_weight = 1e-3;
  MaskGradient mask_gradient = MaskGradient::kHard;
  /// Minimizer setting used to score complexity during pruning.
  bool use_xor = true;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  double val_metric = 0.0;
};

struct RoundRecord {
  int round = 0;
  int active_connections = 0;
  double val_metric = 0.0;
  int complexity = 0;
  double score = 0.0;
  /// Full fine-tuning would have raised the complexity, so only the head
  /// was refit after pruning.
  bool head_only = false;
};

struct TrainLog {
  std::string metric;
  std::vector<EpochRecord> epochs;
  std::vector<EpochRecord> finetune_epochs;
  std::vector<RoundRecord> rounds;
  int selected_round = -1;
};

/// Task metric of the network on a dataset, NaN when undefined there
/// (e.g. a single class).
double validation_metric(const Model& model, const BitDataset& data);

/// Replaces recomputed masks by the current hard masks.
void freeze_masks(Model& model);

/// Number of frozen-mask connections that are not pruned.
int active_connections(const Model& model);

/// Phase one. An empty validation set falls back to the training rows for
/// the logged metric. Masks are frozen on return.
void train(Model& model, const BitDataset& train_data, const BitDataset& val_data,
           const TrainConfig& config, TrainLog& log);

/// Zeroes the `count` active W_ltt connections of smallest magnitude
/// (ties: lower node, then lower input).
void prune_smallest(Model& model, int count);

/// Phase two. Round 0 is the unpruned model. Complexity is measured on rules
/// extracted with don't-cares from the union of both datasets.
void prune_finetune(Model& model, const BitDataset& train_data, const BitDataset& val_data,
                    const TrainConfig& config, TrainLog& log);

}  // namespace lttr
