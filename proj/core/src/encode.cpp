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

#include "lttr/encode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <set>

#include "lttr/error.hpp"

namespace lttr {
namespace {

bool is_missing(std::string_view cell) {
  return cell.empty() || cell == "NA" || cell == "?" || cell == "nan" || cell == "NaN";
}

bool try_parse(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  std::string text(cell);
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size() && std::isfinite(out);
}

std::vector<std::size_t> all_rows(const Table& table, std::span<const std::size_t> rows) {
  if (!rows.empty()) return {rows.begin(), rows.end()};
  std::vector<std::size_t> out(table.size());
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

std::size_t require_column(const Table& table, const std::string& name) {
  auto idx = table.column(name);
  if (!idx) raise(ErrorCode::kSchemaMismatch, "column '" + name + "' not present in table");
  return *idx;
}

double quantile(const std::vector<double>& sorted, double p) {
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

FeatureEncoding fit_continuous(const Table& table, std::size_t col, const std::string& name,
                               const std::vector<std::size_t>& rows, int bits,
                               std::vector<std::string>& warnings) {
  std::vector<double> values;
  values.reserve(rows.size());
  for (std::size_t r : rows) values.push_back(parse_number(table.rows[r][col], name));
  std::sort(values.begin(), values.end());

  FeatureEncoding enc;
  enc.name = name;
  enc.kind = ColumnKind::kContinuous;
  if (values.front() == values.back()) {
    warnings.push_back("constant column '" + name + "' contributes no bits");
    return enc;
  }
  for (int j = 1; j <= bits; ++j) {
    const double t = quantile(values, static_cast<double>(j) / static_cast<double>(bits + 1));
    if (t <= values.front()) continue;
    if (!enc.thresholds.empty() && t <= enc.thresholds.back()) continue;
    enc.thresholds.push_back(t);
  }
  if (static_cast<int>(enc.thresholds.size()) < bits) {
    warnings.push_back("column '" + name + "' keeps " + std::to_string(enc.thresholds.size()) +
                       " of " + std::to_string(bits) + " thresholds after collapsing duplicates");
  }
  return enc;
}

FeatureEncoding fit_categorical(const Table& table, std::size_t col, const std::string& name,
                                const std::vector<std::size_t>& rows) {
  FeatureEncoding enc;
  enc.name = name;
  enc.kind = ColumnKind::kCategorical;
  for (std::size_t r : rows) {
    const std::string& cell = table.rows[r][col];
    if (is_missing(cell)) raise(ErrorCode::kInvalidInput, "missing value in column '" + name + "'");
    if (std::find(enc.categories.begin(), enc.categories.end(), cell) == enc.categories.end()) {
      enc.categories.push_back(cell);
    }
  }
  return enc;
}

std::vector<std::string> sorted_classes(const Table& table, std::size_t col,
                                        const std::string& name,
                                        const std::vector<std::size_t>& rows) {
  std::set<std::string> seen;
  for (std::size_t r : rows) {
    const std::string& cell = table.rows[r][col];
    if (is_missing(cell)) raise(ErrorCode::kInvalidInput, "missing value in column '" + name + "'");
    seen.insert(cell);
  }
  std::vector<std::string> classes(seen.begin(), seen.end());
  const bool numeric = std::all_of(classes.begin(), classes.end(), [](const std::string& c) {
    double v;
    return try_parse(c, v);
  });
  if (numeric) {
    std::stable_sort(classes.begin(), classes.end(), [](const std::string& a, const std::string& b) {
      return std::strtod(a.c_str(), nullptr) < std::strtod(b.c_str(), nullptr);
    });
  }
  return classes;
}

}  // namespace

std::string_view to_string(ColumnKind kind) {
  return kind == ColumnKind::kContinuous ? "continuous" : "categorical";
}

std::string_view to_string(Task task) {
  switch (task) {
    case Task::kBinary: return "binary";
    case Task::kMulticlass: return "multiclass";
    case Task::kRegression: return "regression";
  }
  return "binary";
}

ColumnKind column_kind_from_string(std::string_view text) {
  if (text == "continuous") return ColumnKind::kContinuous;
  if (text == "categorical") return ColumnKind::kCategorical;
  raise(ErrorCode::kInvalidInput, "unknown column kind '" + std::string(text) + "'");
}

Task task_from_string(std::string_view text) {
  if (text == "binary") return Task::kBinary;
  if (text == "multiclass") return Task::kMulticlass;
  if (text == "regression") return Task::kRegression;
  raise(ErrorCode::kInvalidInput, "unknown task '" + std::string(text) + "'");
}

double parse_number(std::string_view cell, std::string_view column) {
  if (is_missing(cell)) {
    raise(ErrorCode::kInvalidInput, "missing value in column '" + std::string(column) + "'");
  }
  double v = 0.0;
  if (!try_parse(cell, v)) {
    raise(ErrorCode::kInvalidInput, "column '" + std::string(column) +
                                        "' declared continuous but holds '" + std::string(cell) + "'");
  }
  return v;
}

BitSource EncodingSchema::source(int bit) const {
  if (bit < 0 || bit >= n_bits) {
    raise(ErrorCode::kInvalidInput, "bit index " + std::to_string(bit) + " out of range [0, " +
                                        std::to_string(n_bits) + ")");
  }
  for (std::size_t f = 0; f < features.size(); ++f) {
    const auto& fe = features[f];
    if (bit >= fe.first_bit && bit < fe.first_bit + fe.width()) {
      return {static_cast<int>(f), bit - fe.first_bit};
    }
  }
  raise(ErrorCode::kInvalidState, "schema bit map is inconsistent");
}

BitDataset BitDataset::subset(std::span<const std::size_t> indices) const {
  BitDataset out;
  out.schema = schema;
  out.bits.resize(static_cast<Eigen::Index>(indices.size()), bits.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out.bits.row(static_cast<Eigen::Index>(i)) = bits.row(static_cast<Eigen::Index>(indices[i]));
    if (!targets.labels.empty()) out.targets.labels.push_back(targets.labels[indices[i]]);
    if (!targets.values.empty()) out.targets.values.push_back(targets.values[indices[i]]);
    if (!targets.raw.empty()) out.targets.raw.push_back(targets.raw[indices[i]]);
  }
  return out;
}

EncodingSchema fit_schema(const Table& table, std::span<const ColumnSpec> columns, int bits,
                          std::span<const std::size_t> rows) {
  if (bits < 1) raise(ErrorCode::kInvalidInput, "bits must be >= 1");
  if (table.size() == 0) raise(ErrorCode::kInvalidInput, "cannot fit a schema on an empty table");
  const std::vector<std::size_t> use = all_rows(table, rows);

  std::set<std::string> names;
  int targets = 0;
  for (const auto& c : columns) {
    if (!names.insert(c.name).second) {
      raise(ErrorCode::kInvalidInput, "duplicate column name '" + c.name + "'");
    }
    if (c.role == ColumnRole::kTarget) ++targets;
  }
  if (targets != 1) raise(ErrorCode::kInvalidInput, "exactly one target column is required");

  EncodingSchema schema;
  int next_bit = 0;
  for (const auto& c : columns) {
    const std::size_t col = require_column(table, c.name);
    if (c.role == ColumnRole::kTarget) {
      schema.target.name = c.name;
      if (c.kind == ColumnKind::kContinuous) {
        schema.target.task = Task::kRegression;
        double sum = 0.0;
        std::vector<double> v;
        for (std::size_t r : use) v.push_back(parse_number(table.rows[r][col], c.name));
        for (double x : v) sum += x;
        const double mean = sum / static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double sd = std::sqrt(ss / static_cast<double>(v.size()));
        schema.target.mean = mean;
        schema.target.scale = sd > 0.0 ? sd : 1.0;
        if (!(sd > 0.0)) schema.warnings.push_back("regression target has zero variance");
      } else {
        schema.target.classes = sorted_classes(table, col, c.name, use);
        if (schema.target.classes.size() < 2) {
          raise(ErrorCode::kInvalidInput, "classification target needs at least two classes");
        }
        schema.target.task =
            schema.target.classes.size() == 2 ? Task::kBinary : Task::kMulticlass;
      }
      continue;
    }
    FeatureEncoding fe = c.kind == ColumnKind::kContinuous
                             ? fit_continuous(table, col, c.name, use, bits, schema.warnings)
                             : fit_categorical(table, col, c.name, use);
    fe.first_bit = next_bit;
    next_bit += fe.width();
    schema.features.push_back(std::move(fe));
  }
  schema.n_bits = next_bit;
  return schema;
}

RowEncoder::RowEncoder(const EncodingSchema& schema, const std::vector<std::string>& header)
    : schema_(&schema) {
  auto find = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  };
  for (const auto& fe : schema.features) {
    const int col = find(fe.name);
    if (col < 0) raise(ErrorCode::kSchemaMismatch, "column '" + fe.name + "' not present in table");
    feature_columns_.push_back(col);
  }
  target_column_ = find(schema.target.name);
}

void RowEncoder::bits(const std::vector<std::string>& row, std::span<double> out) const {
  if (static_cast<int>(out.size()) != schema_->n_bits) {
    raise(ErrorCode::kInvalidInput, "bit buffer width does not match schema");
  }
  for (std::size_t f = 0; f < schema_->features.size(); ++f) {
    const auto& fe = schema_->features[f];
    const std::string& cell = row.at(static_cast<std::size_t>(feature_columns_[f]));
    double* block = out.data() + fe.first_bit;
    if (fe.kind == ColumnKind::kContinuous) {
      const double v = parse_number(cell, fe.name);
      for (std::size_t j = 0; j < fe.thresholds.size(); ++j) block[j] = v >= fe.thresholds[j] ? 1.0 : 0.0;
    } else {
      if (is_missing(cell)) raise(ErrorCode::kInvalidInput, "missing value in column '" + fe.name + "'");
      for (std::size_t j = 0; j < fe.categories.size(); ++j) block[j] = cell == fe.categories[j] ? 1.0 : 0.0;
    }
  }
}

std::vector<std::uint8_t> RowEncoder::bits(const std::vector<std::string>& row) const {
  std::vector<double> buf(static_cast<std::size_t>(schema_->n_bits));
  bits(row, buf);
  return {buf.begin(), buf.end()};
}

int RowEncoder::label(const std::vector<std::string>& row) const {
  if (target_column_ < 0) {
    raise(ErrorCode::kSchemaMismatch, "target column '" + schema_->target.name + "' not present");
  }
  const std::string& cell = row.at(static_cast<std::size_t>(target_column_));
  const auto& classes = schema_->target.classes;
  const auto it = std::find(classes.begin(), classes.end(), cell);
  if (it == classes.end()) raise(ErrorCode::kInvalidInput, "invalid class label '" + cell + "'");
  return static_cast<int>(it - classes.begin());
}

double RowEncoder::value(const std::vector<std::string>& row) const {
  if (target_column_ < 0) {
    raise(ErrorCode::kSchemaMismatch, "target column '" + schema_->target.name + "' not present");
  }
  return parse_number(row.at(static_cast<std::size_t>(target_column_)), schema_->target.name);
}

std::vector<std::uint8_t> transform(const EncodingSchema& schema,
                                    const std::vector<std::string>& header,
                                    const std::vector<std::string>& row) {
  return RowEncoder(schema, header).bits(row);
}

BitDataset encode(std::shared_ptr<const EncodingSchema> schema, const Table& table,
                  bool with_targets) {
  const RowEncoder encoder(*schema, table.header);
  BitDataset ds;
  ds.bits.resize(static_cast<Eigen::Index>(table.size()), schema->n_bits);
  std::vector<double> buf(static_cast<std::size_t>(schema->n_bits));
  const bool regression = schema->target.task == Task::kRegression;
  for (std::size_t r = 0; r < table.size(); ++r) {
    encoder.bits(table.rows[r], buf);
    for (int b = 0; b < schema->n_bits; ++b) ds.bits(static_cast<Eigen::Index>(r), b) = buf[static_cast<std::size_t>(b)];
    if (!with_targets) continue;
    if (regression) {
      const double v = encoder.value(table.rows[r]);
      ds.targets.raw.push_back(v);
      ds.targets.values.push_back((v - schema->target.mean) / schema->target.scale);
    } else {
      ds.targets.labels.push_back(encoder.label(table.rows[r]));
    }
  }
  ds.schema = std::move(schema);
  return ds;
}

std::string format_threshold(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string literal(const EncodingSchema& schema, int bit, Polarity polarity) {
  const BitSource src = schema.source(bit);
  const FeatureEncoding& fe = schema.features[static_cast<std::size_t>(src.feature)];
  const bool pos = polarity == Polarity::kPositive;
  if (fe.kind == ColumnKind::kContinuous) {
    return fe.name + (pos ? " ≥ " : " < ") +
           format_threshold(fe.thresholds[static_cast<std::size_t>(src.offset)]);
  }
  return fe.name + (pos ? " = '" : " ≠ '") + fe.categories[static_cast<std::size_t>(src.offset)] +
         "'";
}

}  // namespace lttr
