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

#include "lttr/serialize.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "lttr/error.hpp"

namespace lttr {
namespace {

using nlohmann::json;

constexpr int kVersion = 1;

[[noreturn]] void bad(const std::string& what) { raise(ErrorCode::kSchemaMismatch, what); }

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
}

template <typename T>
T get(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(std::string("field '") + key + "' has the wrong type");
  }
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!j.is_number()) bad("expected a number");
  return j.get<double>();
}

json matrix(const Eigen::MatrixXd& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd matrix_from(const json& j, const char* name) {
  if (!j.is_object()) bad(std::string("matrix '") + name + "' missing");
  const auto rows = get<Eigen::Index>(j, "rows");
  const auto cols = get<Eigen::Index>(j, "cols");
  const auto data = get<std::vector<double>>(j, "data");
  if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size()) {
    bad(std::string("matrix '") + name + "' has inconsistent shape");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r * cols + c)];
  }
  return m;
}

json schema_json(const EncodingSchema& s) {
  json features = json::array();
  for (const auto& f : s.features) {
    features.push_back({{"name", f.name},
                        {"kind", std::string(to_string(f.kind))},
                        {"thresholds", f.thresholds},
                        {"categories", f.categories},
                        {"first_bit", f.first_bit}});
  }
  return {{"features", features},
          {"target",
           {{"name", s.target.name},
            {"task", std::string(to_string(s.target.task))},
            {"classes", s.target.classes},
            {"mean", s.target.mean},
            {"scale", s.target.scale}}},
          {"n_bits", s.n_bits},
          {"warnings", s.warnings}};
}

EncodingSchema schema_from(const json& j) {
  EncodingSchema s;
  int next = 0;
  for (const auto& f : get<json>(j, "features")) {
    FeatureEncoding fe;
    fe.name = get<std::string>(f, "name");
    fe.kind = column_kind_from_string(get<std::string>(f, "kind"));
    fe.thresholds = get<std::vector<double>>(f, "thresholds");
    fe.categories = get<std::vector<std::string>>(f, "categories");
    fe.first_bit = get<int>(f, "first_bit");
    if (fe.first_bit != next) bad("schema bit layout is not contiguous");
    next += fe.width();
    s.features.push_back(std::move(fe));
  }
  const json t = get<json>(j, "target");
  s.target.name = get<std::string>(t, "name");
  s.target.task = task_from_string(get<std::string>(t, "task"));
  s.target.classes = get<std::vector<std::string>>(t, "classes");
  s.target.mean = get<double>(t, "mean");
  s.target.scale = get<double>(t, "scale");
  s.n_bits = get<int>(j, "n_bits");
  s.warnings = get<std::vector<std::string>>(j, "warnings");
  if (s.n_bits != next) bad("schema n_bits does not match its features");
  return s;
}

json split_json(const std::optional<SplitSpec>& split) {
  if (!split) return nullptr;
  return {{"seed", split->seed},
          {"test_fraction", split->test_fraction},
          {"validation_fraction", split->validation_fraction},
          {"rows", split->rows}};
}

std::optional<SplitSpec> split_from(const json& j) {
  if (!j.contains("split") || j.at("split").is_null()) return std::nullopt;
  const json& s = j.at("split");
  return SplitSpec{get<std::uint64_t>(s, "seed"), get<double>(s, "test_fraction"),
                   get<double>(s, "validation_fraction"), get<std::size_t>(s, "rows")};
}

json epochs_json(const std::vector<EpochRecord>& records) {
  json a = json::array();
  for (const auto& e : records) a.push_back({{"epoch", e.epoch}, {"loss", number(e.loss)}, {"val_metric", number(e.val_metric)}});
  return a;
}

std::vector<EpochRecord> epochs_from(const json& a) {
  std::vector<EpochRecord> out;
  for (const auto& e : a) {
    out.push_back({get<int>(e, "epoch"), number_from(e.at("loss")), number_from(e.at("val_metric"))});
  }
  return out;
}

json log_json(const TrainLog& log) {
  json rounds = json::array();
  for (const auto& r : log.rounds) {
    rounds.push_back({{"round", r.round},
                      {"active_connections", r.active_connections},
                      {"val_metric", number(r.val_metric)},
                      {"complexity", r.complexity},
                      {"score", number(r.score)},
                      {"head_only", r.head_only}});
  }
  return {{"metric", log.metric},
          {"epochs", epochs_json(log.epochs)},
          {"finetune_epochs", epochs_json(log.finetune_epochs)},
          {"rounds", rounds},
          {"selected_round", log.selected_round}};
}

TrainLog log_from(const json& j) {
  TrainLog log;
  log.metric = get<std::string>(j, "metric");
  log.epochs = epochs_from(get<json>(j, "epochs"));
  log.finetune_epochs = epochs_from(get<json>(j, "finetune_epochs"));
  for (const auto& r : get<json>(j, "rounds")) {
    log.rounds.push_back({get<int>(r, "round"), get<int>(r, "active_connections"), number_from(r.at("val_metric")),
                          get<int>(r, "complexity"), number_from(r.at("score")), r.value("head_only", false)});
  }
  log.selected_round = get<int>(j, "selected_round");
  return log;
}

void check_header(const json& j, const char* format) {
  if (!j.is_object() || get<std::string>(j, "format") != format) {
    bad(std::string("not a ") + format + " document");
  }
  if (get<int>(j, "version") != kVersion) bad("unsupported document version");
}

}  // namespace

std::string schema_to_json(const EncodingSchema& schema) { return schema_json(schema).dump(2) + "\n"; }

EncodingSchema schema_from_json(std::string_view text) { return schema_from(parse(text)); }

std::string to_json(const ModelDocument& doc) {
  const Model& m = doc.model;
  if (!m.schema) raise(ErrorCode::kInvalidState, "model has no encoding schema");
  json masks = nullptr;
  if (m.ltt.frozen_masks) masks = *m.ltt.frozen_masks;
  const json j = {{"format", "lttr-model"},
                  {"version", kVersion},
                  {"task", std::string(to_string(m.task))},
                  {"schema", schema_json(*m.schema)},
                  {"k", m.ltt.k},
                  {"tau", m.ltt.tau},
                  {"use_skip", m.use_skip},
                  {"w_map", matrix(m.ltt.w_map)},
                  {"w_ltt", matrix(m.ltt.w_ltt)},
                  {"bias", matrix(m.ltt.bias)},
                  {"w_cls", matrix(m.w_cls)},
                  {"b_cls", matrix(m.b_cls)},
                  {"ltt_keep", matrix(m.ltt_keep)},
                  {"cls_keep", matrix(m.cls_keep)},
                  {"frozen_masks", masks},
                  {"training", log_json(doc.log)},
                  {"split", split_json(doc.split)}};
  return j.dump(1) + "\n";
}

ModelDocument model_from_json(std::string_view text) {
  const json j = parse(text);
  check_header(j, "lttr-model");
  ModelDocument doc;
  Model& m = doc.model;
  m.task = task_from_string(get<std::string>(j, "task"));
  m.schema = std::make_shared<const EncodingSchema>(schema_from(get<json>(j, "schema")));
  m.ltt.k = get<int>(j, "k");
  m.ltt.tau = get<double>(j, "tau");
  m.use_skip = get<bool>(j, "use_skip");
  m.ltt.w_map = matrix_from(get<json>(j, "w_map"), "w_map");
  m.ltt.w_ltt = matrix_from(get<json>(j, "w_ltt"), "w_ltt");
  m.ltt.bias = matrix_from(get<json>(j, "bias"), "bias");
  m.w_cls = matrix_from(get<json>(j, "w_cls"), "w_cls");
  m.b_cls = matrix_from(get<json>(j, "b_cls"), "b_cls");
  m.ltt_keep = matrix_from(get<json>(j, "ltt_keep"), "ltt_keep");
  m.cls_keep = matrix_from(get<json>(j, "cls_keep"), "cls_keep");
  if (!j.at("frozen_masks").is_null()) {
    m.ltt.frozen_masks = get<std::vector<std::vector<int>>>(j, "frozen_masks");
  }
  if (m.task != m.schema->target.task) bad("model task disagrees with its schema");
  try {
    m.validate();
  } catch (const Error& e) {
    bad(std::string("inconsistent model: ") + e.what());
  }
  if (m.inputs() != m.schema->n_bits) bad("model width disagrees with its schema");
  doc.log = log_from(get<json>(j, "training"));
  doc.split = split_from(j);
  return doc;
}

std::string to_json(const RulesDocument& doc) {
  const RuleSet& r = doc.rules;
  if (!r.schema) raise(ErrorCode::kInvalidState, "rule set has no encoding schema");
  json preds = json::array();
  for (const auto& p : r.predictors) {
    json e = {{"weights", p.weights}};
    if (p.kind == PredictorKind::kLiteral) {
      e["kind"] = "literal";
      e["bit"] = p.bit;
      e["text"] = literal(*r.schema, p.bit, Polarity::kPositive);
    } else {
      const int k = static_cast<int>(p.formula.inputs.size());
      std::vector<std::string> terms;
      for (const auto& t : p.formula.terms) terms.push_back(t.symbols(k));
      e["kind"] = "node";
      e["node"] = p.node;
      e["inputs"] = p.formula.inputs;
      e["terms"] = terms;
      e["operators"] = p.formula.operators();
      e["text"] = render_formula(*r.schema, p.formula);
    }
    preds.push_back(std::move(e));
  }
  const json j = {{"format", "lttr-rules"},
                  {"version", kVersion},
                  {"task", std::string(to_string(r.task))},
                  {"rule_format", std::string(to_string(r.format))},
                  {"use_xor", r.use_xor},
                  {"schema", schema_json(*r.schema)},
                  {"intercepts", r.intercepts},
                  {"complexity", r.complexity},
                  {"predictors", preds},
                  {"split", split_json(doc.split)}};
  return j.dump(1) + "\n";
}

RulesDocument rules_from_json(std::string_view text) {
  const json j = parse(text);
  check_header(j, "lttr-rules");
  RulesDocument doc;
  RuleSet& r = doc.rules;
  r.task = task_from_string(get<std::string>(j, "task"));
  r.format = rule_format_from_string(get<std::string>(j, "rule_format"));
  r.use_xor = get<bool>(j, "use_xor");
  r.schema = std::make_shared<const EncodingSchema>(schema_from(get<json>(j, "schema")));
  r.intercepts = get<std::vector<double>>(j, "intercepts");
  const auto outputs = static_cast<std::size_t>(r.schema->target.outputs());
  if (r.intercepts.size() != outputs) bad("intercept count disagrees with the task");
  for (const auto& e : get<json>(j, "predictors")) {
    Predictor p;
    p.weights = get<std::vector<double>>(e, "weights");
    if (p.weights.size() != outputs) bad("predictor weight count disagrees with the task");
    const auto kind = get<std::string>(e, "kind");
    if (kind == "literal") {
      p.kind = PredictorKind::kLiteral;
      p.bit = get<int>(e, "bit");
      if (p.bit < 0 || p.bit >= r.schema->n_bits) bad("literal bit out of range");
    } else if (kind == "node") {
      p.kind = PredictorKind::kNode;
      p.node = get<int>(e, "node");
      p.formula.format = r.format;
      p.formula.inputs = get<std::vector<int>>(e, "inputs");
      for (int i : p.formula.inputs) {
        if (i < 0 || i >= r.schema->n_bits) bad("node input out of range");
      }
      for (const auto& s : get<std::vector<std::string>>(e, "terms")) {
        p.formula.terms.push_back(Implicant::from_symbols(s));
      }
    } else {
      bad("unknown predictor kind '" + kind + "'");
    }
    r.predictors.push_back(std::move(p));
  }
  r.complexity = get<int>(j, "complexity");
  doc.split = split_from(j);
  return doc;
}

ArtifactKind detect_artifact(std::string_view text) {
  const json j = parse(text);
  const auto format = j.is_object() && j.contains("format") && j.at("format").is_string()
                          ? j.at("format").get<std::string>()
                          : std::string();
  if (format == "lttr-model") return ArtifactKind::kModel;
  if (format == "lttr-rules") return ArtifactKind::kRules;
  bad("document is neither a model nor a rule set");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::kDataNotFound, "file not found: " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::kInvalidInput, "cannot write " + path.string());
  out << text;
}

}  // namespace lttr
