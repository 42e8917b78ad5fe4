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

// End-to-end runs: configuration, seeded hold-out splits, training,
// pruning, extraction and evaluation.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lttr/csv.hpp"
#include "lttr/encode.hpp"
#include "lttr/metrics.hpp"
#include "lttr/model.hpp"
#include "lttr/rules.hpp"
#include "lttr/serialize.hpp"
#include "lttr/train.hpp"

namespace lttr {

struct RunConfig {
  std::string name = "run";
  std::filesystem::path dataset;
  std::vector<ColumnSpec> columns;
  /// When set, must match the task implied by the target column.
  std::optional<Task> task;
  std::uint64_t seed = 0;
  int bits = 6;
  ModelShape shape;
  TrainConfig train;
  double test_fraction = 0.2;
  double validation_fraction = 0.2;
  std::filesystem::path output_dir = "runs/run";
  RuleFormat format = RuleFormat::kDnf;
  bool use_xor = true;

  void validate() const;
};

/// Flat JSON object; relative dataset paths resolve against base_dir.
RunConfig run_config_from_json(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
std::string run_config_to_json(const RunConfig& config);

/// Applies one "key=value" override. The value is read as JSON when it
/// parses, else as a plain string.
void apply_override(RunConfig& config, std::string_view assignment);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Seeded permutation of the rows. The last test_fraction of it is the test
/// set, and the last validation_fraction of the remaining rows is the
/// validation set.
Split split_rows(std::size_t rows, std::uint64_t seed, double test_fraction, double validation_fraction);
Split split_rows(const SplitSpec& spec);

/// Share of rows on which the rules reproduce the network: same decision
/// and predictions within 1e-10.
double fidelity(const Model& model, const RuleSet& rules, const Eigen::MatrixXd& bits);

struct RunResult {
  ModelDocument document;
  RuleSet rules;
  Split split;
  BitDataset data;  // the whole table, encoded
  std::optional<EvalResult> test_network;
  std::optional<EvalResult> test_rules;
  double train_fidelity = 0.0;
  double seconds = 0.0;
};

struct RunOptions {
  bool prune = true;
  /// Called with a progress line per phase; may be empty.
  std::function<void(const std::string&)> progress;
};

RunResult run_pipeline(const RunConfig& config, const Table& table, const RunOptions& options = {});

/// Rules extracted over every row of `bits`, with masks frozen first when
/// the model was never frozen.
RuleSet extract_for(const Model& model, const Eigen::MatrixXd& bits, RuleFormat format, bool use_xor);

/// Reproducibility record: config, seed, dataset digest and tool versions.
std::string manifest_json(const RunConfig& config, std::string_view dataset_bytes,
                          std::string_view command);

std::string_view library_version();

}  // namespace lttr
