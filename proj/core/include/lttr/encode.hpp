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

// Binarization of raw tabular columns into Boolean literals.
//
// Continuous columns use thermometer bits (bit j is 1 iff value >= t_j) over
// quantile thresholds; categorical columns are one-hot over the categories
// seen at fit time. Every bit can be rendered back as a readable condition.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lttr/csv.hpp"

namespace lttr {

enum class ColumnKind { kContinuous, kCategorical };
enum class ColumnRole { kFeature, kTarget };
enum class Task { kBinary, kMulticlass, kRegression };
enum class Polarity { kPositive, kNegative };

std::string_view to_string(ColumnKind kind);
std::string_view to_string(Task task);
ColumnKind column_kind_from_string(std::string_view text);
Task task_from_string(std::string_view text);

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kContinuous;
  ColumnRole role = ColumnRole::kFeature;
};

struct FeatureEncoding {
  std::string name;
  ColumnKind kind = ColumnKind::kContinuous;
  std::vector<double> thresholds;       // strictly increasing
  std::vector<std::string> categories;  // observation order
  int first_bit = 0;

  int width() const {
    return static_cast<int>(kind == ColumnKind::kContinuous ? thresholds.size() : categories.size());
  }
};

struct TargetEncoding {
  std::string name;
  Task task = Task::kBinary;
  std::vector<std::string> classes;
  // Regression targets are trained as (value - mean) / scale.
  double mean = 0.0;
  double scale = 1.0;

  /// Width of the model head: 1 for binary and regression, C for multiclass.
  int outputs() const { return task == Task::kMulticlass ? static_cast<int>(classes.size()) : 1; }
};

struct BitSource {
  int feature = 0;
  int offset = 0;
};

struct EncodingSchema {
  std::vector<FeatureEncoding> features;
  TargetEncoding target;
  int n_bits = 0;
  /// Non-fatal conditions met while fitting (e.g. constant columns).
  std::vector<std::string> warnings;

  BitSource source(int bit) const;
};

struct Targets {
  std::vector<int> labels;     // classification: index into TargetEncoding::classes
  std::vector<double> values;  // regression: standardized
  std::vector<double> raw;     // regression: original units
};

struct BitDataset {
  Eigen::MatrixXd bits;  // rows x n_bits, entries exactly 0.0 or 1.0
  Targets targets;
  std::shared_ptr<const EncodingSchema> schema;

  std::size_t rows() const { return static_cast<std::size_t>(bits.rows()); }
  int n_bits() const { return static_cast<int>(bits.cols()); }
  BitDataset subset(std::span<const std::size_t> indices) const;
};

/// Fits thresholds on `rows` of the table (all rows when empty). The j-th
/// threshold of a continuous feature is the j/(bits+1) quantile with linear
/// interpolation; duplicates and thresholds at the column minimum are dropped.
EncodingSchema fit_schema(const Table& table, std::span<const ColumnSpec> columns, int bits,
                          std::span<const std::size_t> rows = {});

/// Encodes rows against a fixed header layout.
class RowEncoder {
 public:
  RowEncoder(const EncodingSchema& schema, const std::vector<std::string>& header);

  void bits(const std::vector<std::string>& row, std::span<double> out) const;
  std::vector<std::uint8_t> bits(const std::vector<std::string>& row) const;
  int label(const std::vector<std::string>& row) const;
  double value(const std::vector<std::string>& row) const;
  bool has_target() const { return target_column_ >= 0; }

 private:
  const EncodingSchema* schema_;
  std::vector<int> feature_columns_;
  int target_column_ = -1;
};

std::vector<std::uint8_t> transform(const EncodingSchema& schema,
                                    const std::vector<std::string>& header,
                                    const std::vector<std::string>& row);

/// Encodes a whole table. Without targets, Targets stays empty and the
/// target column may be absent.
BitDataset encode(std::shared_ptr<const EncodingSchema> schema, const Table& table,
                  bool with_targets = true);

/// Human readable condition for one bit, e.g. "Cholesterol < 167.63".
std::string literal(const EncodingSchema& schema, int bit, Polarity polarity);

/// Threshold text as used in rendered rules (6 significant digits).
std::string format_threshold(double value);

double parse_number(std::string_view cell, std::string_view column);

}  // namespace lttr
