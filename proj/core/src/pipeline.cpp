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

#include "lttr/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include <Eigen/Core>

#include "json.hpp"
#include "lttr/error.hpp"

namespace lttr {
namespace {

using nlohmann::json;

[[noreturn]] void bad_config(const std::string& what) { raise(ErrorCode::kInvalidConfig, what); }

template <typename T>
T as(const json& v, std::string_view key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    bad_config("config field '" + std::string(key) + "' has the wrong type");
  }
}

void set_field(RunConfig& c, std::string_view key, const json& v, const std::filesystem::path& base) {
  auto& t = c.train;
  if (key == "name") c.name = as<std::string>(v, key);
  else if (key == "dataset") {
    std::filesystem::path p = as<std::string>(v, key);
    c.dataset = p.is_relative() && !base.empty() ? base / p : p;
  } else if (key == "columns") {
    c.columns.clear();
    if (!v.is_array()) bad_config("config field 'columns' must be an array");
    for (const auto& col : v) {
      ColumnSpec s;
      s.name = as<std::string>(col.value("name", json()), "columns.name");
      try {
        s.kind = column_kind_from_string(col.value("kind", std::string("continuous")));
      } catch (const Error& e) {
        bad_config(e.what());
      }
      const std::string role = col.value("role", std::string("feature"));
      if (role != "feature" && role != "target") bad_config("column role must be 'feature' or 'target'");
      s.role = role == "target" ? ColumnRole::kTarget : ColumnRole::kFeature;
      c.columns.push_back(std::move(s));
    }
  } else if (key == "task") {
    try {
      c.task = task_from_string(as<std::string>(v, key));
    } catch (const Error& e) {
      bad_config(e.what());
    }
  } else if (key == "seed") c.seed = as<std::uint64_t>(v, key);
  else if (key == "bits") c.bits = as<int>(v, key);
  else if (key == "nodes") c.shape.nodes = as<int>(v, key);
  else if (key == "k") c.shape.k = as<int>(v, key);
  else if (key == "tau") c.shape.tau = as<double>(v, key);
  else if (key == "use_skip") c.shape.use_skip = as<bool>(v, key);
  else if (key == "epochs") t.epochs = as<int>(v, key);
  else if (key == "finetune_epochs") t.finetune_epochs = as<int>(v, key);
  else if (key == "prune_rounds") t.prune_rounds = as<int>(v, key);
  else if (key == "prune_fraction") t.prune_fraction = as<double>(v, key);
  else if (key == "learning_rate") t.learning_rate = as<double>(v, key);
  else if (key == "finetune_learning_rate") t.finetune_learning_rate = as<double>(v, key);
  else if (key == "batch_size") t.batch_size = as<int>(v, key);
  else if (key == "l1") t.l1 = as<double>(v, key);
  else if (key == "complexity_weight") t.complexity_weight = as<double>(v, key);
  else if (key == "mask_gradient") {
    const auto s = as<std::string>(v, key);
    if (s != "hard" && s != "soft") bad_config("mask_gradient must be 'hard' or 'soft'");
    t.mask_gradient = s == "hard" ? MaskGradient::kHard : MaskGradient::kSoft;
  } else if (key == "test_fraction") c.test_fraction = as<double>(v, key);
  else if (key == "validation_fraction") c.validation_fraction = as<double>(v, key);
  else if (key == "output_dir") c.output_dir = as<std::string>(v, key);
  else if (key == "rule_format") {
    try {
      c.format = rule_format_from_string(as<std::string>(v, key));
    } catch (const Error& e) {
      bad_config(e.what());
    }
  } else if (key == "use_xor") c.use_xor = as<bool>(v, key);
  else bad_config("unknown config field '" + std::string(key) + "'");
  t.seed = c.seed;
  t.use_xor = c.use_xor;
}

std::string hex_digest(std::string_view bytes) {
  // 64-bit FNV-1a; identifies the dataset, not a security measure.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool same_decision(Task task, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Eigen::Index r) {
  switch (task) {
    case Task::kBinary: return (a(r, 0) > 0.5) == (b(r, 0) > 0.5);
    case Task::kMulticlass: {
      Eigen::Index ia = 0;
      Eigen::Index ib = 0;
      a.row(r).maxCoeff(&ia);
      b.row(r).maxCoeff(&ib);
      return ia == ib;
    }
    case Task::kRegression: return true;
  }
  return false;
}

}  // namespace

std::string_view library_version() { return LTTR_VERSION; }

void RunConfig::validate() const {
  if (columns.empty()) bad_config("config lists no columns");
  if (dataset.empty()) bad_config("config names no dataset");
  if (bits < 1) bad_config("bits must be >= 1");
  if (shape.nodes < 0) bad_config("nodes must be >= 0");
  if (shape.k < 1 || shape.k > kMaxNodeInputs) bad_config("k must lie in [1, 16]");
  if (!(shape.tau > 0.0)) bad_config("tau must be positive");
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) bad_config("test_fraction must lie in [0, 1)");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    bad_config("validation_fraction must lie in [0, 1)");
  }
  train.validate();
}

RunConfig run_config_from_json(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    bad_config(std::string("malformed config: ") + e.what());
  }
  if (!j.is_object()) bad_config("config must be a JSON object");
  RunConfig c;
  for (const auto& [key, value] : j.items()) set_field(c, key, value, base_dir);
  if (!j.contains("output_dir")) c.output_dir = std::filesystem::path("runs") / c.name;
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const Error&) {
    raise(ErrorCode::kDataNotFound, "config not found: " + path.string());
  }
  return run_config_from_json(text, path.parent_path());
}

std::string run_config_to_json(const RunConfig& c) {
  json cols = json::array();
  for (const auto& s : c.columns) {
    cols.push_back({{"name", s.name},
                    {"kind", std::string(to_string(s.kind))},
                    {"role", s.role == ColumnRole::kTarget ? "target" : "feature"}});
  }
  json j = {{"name", c.name},
            {"dataset", c.dataset.string()},
            {"columns", cols},
            {"seed", c.seed},
            {"bits", c.bits},
            {"nodes", c.shape.nodes},
            {"k", c.shape.k},
            {"tau", c.shape.tau},
            {"use_skip", c.shape.use_skip},
            {"epochs", c.train.epochs},
            {"finetune_epochs", c.train.finetune_epochs},
            {"prune_rounds", c.train.prune_rounds},
            {"prune_fraction", c.train.prune_fraction},
            {"learning_rate", c.train.learning_rate},
            {"finetune_learning_rate", c.train.finetune_learning_rate},
            {"batch_size", c.train.batch_size},
            {"l1", c.train.l1},
            {"complexity_weight", c.train.complexity_weight},
            {"mask_gradient", c.train.mask_gradient == MaskGradient::kHard ? "hard" : "soft"},
            {"test_fraction", c.test_fraction},
            {"validation_fraction", c.validation_fraction},
            {"output_dir", c.output_dir.string()},
            {"rule_format", std::string(to_string(c.format))},
            {"use_xor", c.use_xor}};
  if (c.task) j["task"] = std::string(to_string(*c.task));
  return j.dump(2) + "\n";
}

void apply_override(RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    bad_config("override must look like key=value, got '" + std::string(assignment) + "'");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  set_field(config, key, value, {});
}

Split split_rows(std::size_t rows, std::uint64_t seed, double test_fraction, double validation_fraction) {
  std::vector<std::size_t> perm(rows);
  for (std::size_t i = 0; i < rows; ++i) perm[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = rows; i > 1; --i) std::swap(perm[i - 1], perm[rng() % i]);
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(rows)));
  const std::size_t n_dev = rows - n_test;
  const auto n_val = static_cast<std::size_t>(std::llround(validation_fraction * static_cast<double>(n_dev)));
  Split s;
  s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_dev - n_val));
  s.validation.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_dev - n_val), perm.begin() + static_cast<std::ptrdiff_t>(n_dev));
  s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_dev), perm.end());
  return s;
}

Split split_rows(const SplitSpec& spec) {
  return split_rows(spec.rows, spec.seed, spec.test_fraction, spec.validation_fraction);
}

double fidelity(const Model& model, const RuleSet& rules, const Eigen::MatrixXd& bits) {
  if (bits.rows() == 0) return 1.0;
  const Eigen::MatrixXd a = predict_bits(model, bits);
  const Eigen::MatrixXd b = rule_predict_bits(rules, bits);
  Eigen::Index match = 0;
  for (Eigen::Index r = 0; r < bits.rows(); ++r) {
    const double scale = model.task == Task::kRegression ? std::max(1.0, a.row(r).cwiseAbs().maxCoeff()) : 1.0;
    const bool close = (a.row(r) - b.row(r)).cwiseAbs().maxCoeff() <= 1e-10 * scale;
    if (close && same_decision(model.task, a, b, r)) ++match;
  }
  return static_cast<double>(match) / static_cast<double>(bits.rows());
}

RuleSet extract_for(const Model& model, const Eigen::MatrixXd& bits, RuleFormat format, bool use_xor) {
  ExtractOptions opts;
  opts.format = format;
  opts.use_xor = use_xor;
  if (model.ltt.frozen_masks) return extract_rules(model, bits, opts);
  Model frozen = model;
  freeze_masks(frozen);
  return extract_rules(frozen, bits, opts);
}

RunResult run_pipeline(const RunConfig& config, const Table& table, const RunOptions& options) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  auto say = [&](const std::string& line) {
    if (options.progress) options.progress(line);
  };
  RunResult result;
  result.split = split_rows(table.size(), config.seed, config.test_fraction, config.validation_fraction);
  if (result.split.train.empty()) raise(ErrorCode::kInvalidInput, "training split is empty");

  auto schema = std::make_shared<const EncodingSchema>(
      fit_schema(table, config.columns, config.bits, result.split.train));
  if (config.task && *config.task != schema->target.task) {
    raise(ErrorCode::kSchemaMismatch, "config task '" + std::string(to_string(*config.task)) +
                                          "' does not match target column (" +
                                          std::string(to_string(schema->target.task)) + ")");
  }
  for (const auto& w : schema->warnings) say("warning: " + w);
  result.data = encode(schema, table);
  const BitDataset train_data = result.data.subset(result.split.train);
  const BitDataset val_data = result.data.subset(result.split.validation);
  const BitDataset test_data = result.data.subset(result.split.test);

  ModelShape shape = config.shape;
  if (shape.nodes > 0 && shape.k > schema->n_bits - 1) {
    raise(ErrorCode::kInvalidConfig, "k = " + std::to_string(shape.k) + " needs more than " +
                                         std::to_string(schema->n_bits) + " encoded bits");
  }
  std::mt19937_64 init_rng(config.seed);
  Model model = init_model(schema, shape, init_rng);
  TrainLog& log = result.document.log;
  say("training " + std::to_string(train_data.rows()) + " rows, " + std::to_string(schema->n_bits) + " bits");
  train(model, train_data, val_data, config.train, log);
  // Without nodes there are no connections to prune.
  if (options.prune && config.train.prune_rounds > 0 && model.nodes() > 0) {
    say("pruning");
    prune_finetune(model, train_data, val_data, config.train, log);
  }
  result.document.model = model;
  result.document.split = SplitSpec{config.seed, config.test_fraction, config.validation_fraction, table.size()};

  result.rules = extract_for(model, result.data.bits, config.format, config.use_xor);
  result.train_fidelity = fidelity(model, result.rules, train_data.bits);
  if (test_data.rows() > 0) {
    try {
      result.test_network = evaluate_predictions(model.task, predict_bits(model, test_data.bits), test_data.targets);
      result.test_rules =
          evaluate_predictions(model.task, rule_predict_bits(result.rules, test_data.bits), test_data.targets);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUndefinedMetric) throw;
      say(std::string("warning: test metric skipped: ") + e.what());
    }
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string manifest_json(const RunConfig& config, std::string_view dataset_bytes, std::string_view command) {
  const json j = {{"tool", "lttr"},
                  {"version", std::string(library_version())},
                  {"command", std::string(command)},
                  {"seed", config.seed},
                  {"config", json::parse(run_config_to_json(config))},
                  {"dataset", {{"path", config.dataset.string()}, {"bytes", dataset_bytes.size()}, {"fnv1a64", hex_digest(dataset_bytes)}}},
                  {"versions",
                   {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                  std::to_string(EIGEN_MINOR_VERSION)},
                    {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                          std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                          std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                    {"compiler", __VERSION__}}}};
  return j.dump(2) + "\n";
}

}  // namespace lttr
