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

#include "lttr/rules.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "lttr/error.hpp"

namespace lttr {
namespace {

std::uint32_t project(std::span<const double> bits, std::span<const int> inputs) {
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (bits[static_cast<std::size_t>(inputs[i])] != 0.0) v |= 1u << i;
  }
  return v;
}

double max_abs(const std::vector<double>& w) {
  double m = 0.0;
  for (double x : w) m = std::max(m, std::abs(x));
  return m;
}

bool any_nonzero(const std::vector<double>& w) {
  return std::any_of(w.begin(), w.end(), [](double x) { return x != 0.0; });
}

std::string parity_group(const std::vector<std::string>& lits, bool odd) {
  std::string body;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i) body += odd || lits.size() > 2 ? " ⊕ " : " ⊙ ";
    body += lits[i];
  }
  if (odd || lits.size() == 2) return "(" + body + ")";
  return "¬(" + body + ")";
}

// Literal parts of one implicant. negate renders the parts of its negation
// (the clause of a CNF).
std::vector<std::string> term_parts(const EncodingSchema& schema, const std::vector<int>& inputs,
                                    const Implicant& t, bool negate) {
  std::vector<std::string> parts;
  std::vector<std::string> group;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const std::uint32_t bit = 1u << i;
    if (t.care & bit) {
      const bool positive = ((t.value & bit) != 0) != negate;
      parts.push_back(literal(schema, inputs[i], positive ? Polarity::kPositive : Polarity::kNegative));
    } else if (t.parity_mask & bit) {
      group.push_back(literal(schema, inputs[i], Polarity::kPositive));
    }
  }
  if (!group.empty()) parts.push_back(parity_group(group, t.parity != negate));
  return parts;
}

std::string format_weight(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.4f", w);
  return buf;
}

}  // namespace

std::string_view to_string(RuleFormat format) { return format == RuleFormat::kDnf ? "dnf" : "cnf"; }

RuleFormat rule_format_from_string(std::string_view text) {
  if (text == "dnf") return RuleFormat::kDnf;
  if (text == "cnf") return RuleFormat::kCnf;
  raise(ErrorCode::kInvalidInput, "unknown rule format '" + std::string(text) + "'");
}

bool Formula::eval_local(std::uint32_t v) const {
  const bool hit = std::any_of(terms.begin(), terms.end(), [v](const Implicant& t) { return t.covers(v); });
  return format == RuleFormat::kDnf ? hit : !hit;
}

bool Formula::eval(std::span<const double> bits) const { return eval_local(project(bits, inputs)); }

bool Formula::is_constant() const {
  return terms.empty() || (terms.size() == 1 && terms.front().is_constant_true());
}

bool Formula::constant_value() const {
  const bool any = !terms.empty();
  return format == RuleFormat::kDnf ? any : !any;
}

int Formula::operators() const { return is_constant() ? 0 : formula_operators(terms); }

std::vector<int> active_inputs(const Model& model, int node) {
  if (!model.ltt.frozen_masks) raise(ErrorCode::kInvalidState, "node masks are not frozen");
  if (node < 0 || node >= model.nodes()) raise(ErrorCode::kInvalidInput, "node index out of range");
  std::vector<int> out;
  for (int i : (*model.ltt.frozen_masks)[static_cast<std::size_t>(node)]) {
    if (model.ltt_keep(i, node) != 0.0 && model.ltt.w_ltt(i, node) != 0.0) out.push_back(i);
  }
  return out;
}

TruthTable enumerate_truth_table(const Model& model, int node) {
  TruthTable table;
  table.inputs = active_inputs(model, node);
  table.k = static_cast<int>(table.inputs.size());
  if (table.k > kMaxTruthTableInputs) raise(ErrorCode::kInvalidState, "node has more than 16 active inputs");
  // Same summation order as the network: ascending mask order, bias last.
  // Skipped entries contribute exactly zero there as well.
  const auto& mask = (*model.ltt.frozen_masks)[static_cast<std::size_t>(node)];
  for (std::uint32_t v = 0; v < (1u << table.k); ++v) {
    double s = 0.0;
    std::size_t pos = 0;
    for (int i : mask) {
      double x = 0.0;
      if (pos < table.inputs.size() && table.inputs[pos] == i) {
        x = (v >> pos & 1) ? 1.0 : 0.0;
        ++pos;
      }
      s += model.ltt.w_ltt(i, node) * x;
    }
    if (s + model.ltt.bias(node) > 0.0) table.minterms.push_back(v);
  }
  return table;
}

std::vector<std::uint32_t> observed_patterns(const Eigen::MatrixXd& bits, std::span<const int> inputs) {
  if (inputs.size() > static_cast<std::size_t>(kMaxTruthTableInputs)) {
    raise(ErrorCode::kInvalidInput, "at most 16 inputs can be projected");
  }
  for (int i : inputs) {
    if (i < 0 || i >= bits.cols()) raise(ErrorCode::kInvalidInput, "input index out of range");
  }
  std::set<std::uint32_t> seen;
  for (Eigen::Index r = 0; r < bits.rows(); ++r) {
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (bits(r, inputs[i]) != 0.0) v |= 1u << i;
    }
    seen.insert(v);
  }
  return {seen.begin(), seen.end()};
}

void assign_dont_cares(TruthTable& table, std::span<const std::uint32_t> observed) {
  std::vector<char> seen(std::size_t{1} << table.k, 0);
  for (auto v : observed) seen.at(v) = 1;
  std::erase_if(table.minterms, [&](std::uint32_t v) { return !seen[v]; });
  table.dont_cares.clear();
  for (std::uint32_t v = 0; v < (1u << table.k); ++v) {
    if (!seen[v]) table.dont_cares.push_back(v);
  }
}

Formula node_formula(const TruthTable& table, RuleFormat format, const MinimizeOptions& options) {
  table.validate();
  Formula f;
  f.format = format;
  f.inputs = table.inputs;
  if (format == RuleFormat::kDnf) {
    f.terms = minimize(table.minterms, table.dont_cares, table.k, options);
    return f;
  }
  std::vector<std::uint32_t> offset;
  for (std::uint32_t v = 0; v < (1u << table.k); ++v) {
    if (!std::binary_search(table.minterms.begin(), table.minterms.end(), v) &&
        !std::binary_search(table.dont_cares.begin(), table.dont_cares.end(), v)) {
      offset.push_back(v);
    }
  }
  f.terms = minimize(offset, table.dont_cares, table.k, options);
  return f;
}

RuleSet extract_rules(const Model& model, const Eigen::MatrixXd& bits, const ExtractOptions& options) {
  model.validate();
  if (!model.schema) raise(ErrorCode::kInvalidState, "model has no encoding schema");
  if (bits.cols() != model.inputs()) raise(ErrorCode::kInvalidInput, "dataset width does not match the model");
  RuleSet rules;
  rules.task = model.task;
  rules.format = options.format;
  rules.use_xor = options.use_xor;
  rules.schema = model.schema;
  rules.intercepts.assign(model.b_cls.data(), model.b_cls.data() + model.b_cls.size());

  const int n = model.inputs();
  auto column = [&](int c) {
    std::vector<double> w(static_cast<std::size_t>(model.outputs()));
    for (int o = 0; o < model.outputs(); ++o) w[static_cast<std::size_t>(o)] = model.w_cls(o, c);
    return w;
  };
  for (int i = 0; i < n; ++i) {
    Predictor p;
    p.kind = PredictorKind::kLiteral;
    p.bit = i;
    p.weights = column(i);
    if (any_nonzero(p.weights)) rules.predictors.push_back(std::move(p));
  }
  MinimizeOptions mo = options.minimize;
  mo.use_xor = options.use_xor;
  for (int j = 0; j < model.nodes(); ++j) {
    Predictor p;
    p.kind = PredictorKind::kNode;
    p.node = j;
    p.weights = column(n + j);
    if (!any_nonzero(p.weights)) continue;
    TruthTable table = enumerate_truth_table(model, j);
    assign_dont_cares(table, observed_patterns(bits, table.inputs));
    p.formula = node_formula(table, options.format, mo);
    if (p.formula.is_constant()) {
      if (p.formula.constant_value()) {
        for (std::size_t o = 0; o < p.weights.size(); ++o) rules.intercepts[o] += p.weights[o];
      }
      continue;
    }
    rules.predictors.push_back(std::move(p));
  }
  std::stable_sort(rules.predictors.begin(), rules.predictors.end(),
                   [](const Predictor& a, const Predictor& b) { return max_abs(a.weights) > max_abs(b.weights); });
  rules.complexity = complexity(rules);
  return rules;
}

Eigen::MatrixXd rule_scores(const RuleSet& rules, const Eigen::MatrixXd& bits) {
  if (rules.schema && bits.cols() != rules.schema->n_bits) {
    raise(ErrorCode::kInvalidInput, "dataset width does not match the rule schema");
  }
  const auto outputs = static_cast<Eigen::Index>(rules.intercepts.size());
  Eigen::MatrixXd out(bits.rows(), outputs);
  std::vector<double> row(static_cast<std::size_t>(bits.cols()));
  for (Eigen::Index r = 0; r < bits.rows(); ++r) {
    for (Eigen::Index c = 0; c < bits.cols(); ++c) row[static_cast<std::size_t>(c)] = bits(r, c);
    for (Eigen::Index o = 0; o < outputs; ++o) out(r, o) = rules.intercepts[static_cast<std::size_t>(o)];
    for (const auto& p : rules.predictors) {
      const bool on = p.kind == PredictorKind::kLiteral ? row[static_cast<std::size_t>(p.bit)] != 0.0 : p.formula.eval(row);
      if (!on) continue;
      for (Eigen::Index o = 0; o < outputs; ++o) out(r, o) += p.weights[static_cast<std::size_t>(o)];
    }
  }
  return out;
}

Eigen::MatrixXd rule_predict_bits(const RuleSet& rules, const Eigen::MatrixXd& bits) {
  Eigen::MatrixXd out = activate(rules.task, rule_scores(rules, bits));
  if (rules.task == Task::kRegression && rules.schema) {
    out = (out.array() * rules.schema->target.scale + rules.schema->target.mean).matrix();
  }
  return out;
}

std::vector<double> rule_eval(const RuleSet& rules, const std::vector<std::string>& header,
                              const std::vector<std::string>& row) {
  if (!rules.schema) raise(ErrorCode::kInvalidState, "rule set has no encoding schema");
  const RowEncoder encoder(*rules.schema, header);
  Eigen::MatrixXd bits(1, rules.schema->n_bits);
  encoder.bits(row, std::span<double>(bits.data(), static_cast<std::size_t>(bits.size())));
  const Eigen::MatrixXd p = rule_predict_bits(rules, bits);
  return {p.data(), p.data() + p.size()};
}

int complexity(const RuleSet& rules) {
  int total = 0;
  for (const auto& p : rules.predictors) {
    if (!any_nonzero(p.weights)) continue;
    total += 1;
    if (p.kind == PredictorKind::kNode) total += p.formula.operators();
  }
  return total;
}

Formula decision_formula(const RuleSet& rules, const Eigen::MatrixXd& bits, bool use_xor) {
  if (rules.task != Task::kBinary) raise(ErrorCode::kInvalidInput, "decision formula needs a binary task");
  std::set<int> support;
  for (const auto& p : rules.predictors) {
    if (p.kind == PredictorKind::kLiteral) {
      support.insert(p.bit);
    } else {
      support.insert(p.formula.inputs.begin(), p.formula.inputs.end());
    }
  }
  TruthTable table;
  table.inputs.assign(support.begin(), support.end());
  table.k = static_cast<int>(table.inputs.size());
  if (table.k > kMaxTruthTableInputs) raise(ErrorCode::kInvalidInput, "decision formula limited to 16 inputs");
  Eigen::MatrixXd grid = Eigen::MatrixXd::Zero(std::int64_t{1} << table.k, bits.cols());
  for (std::uint32_t v = 0; v < (1u << table.k); ++v) {
    for (int i = 0; i < table.k; ++i) grid(v, table.inputs[static_cast<std::size_t>(i)]) = (v >> i & 1) ? 1.0 : 0.0;
  }
  const Eigen::MatrixXd scores = rule_scores(rules, grid);
  for (std::uint32_t v = 0; v < (1u << table.k); ++v) {
    if (scores(v, 0) > 0.0) table.minterms.push_back(v);
  }
  assign_dont_cares(table, observed_patterns(bits, table.inputs));
  MinimizeOptions mo;
  mo.use_xor = use_xor;
  return node_formula(table, RuleFormat::kDnf, mo);
}

std::string render_formula(const EncodingSchema& schema, const Formula& formula) {
  if (formula.is_constant()) return formula.constant_value() ? "true" : "false";
  const bool cnf = formula.format == RuleFormat::kCnf;
  std::string out;
  for (std::size_t t = 0; t < formula.terms.size(); ++t) {
    const auto parts = term_parts(schema, formula.inputs, formula.terms[t], cnf);
    std::string body;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) body += cnf ? " ∨ " : " ∧ ";
      body += parts[i];
    }
    if (parts.size() > 1 && formula.terms.size() > 1) body = "(" + body + ")";
    if (t) out += cnf ? " ∧ " : " ∨ ";
    out += body;
  }
  return out;
}

std::string render_text(const RuleSet& rules) {
  if (!rules.schema) raise(ErrorCode::kInvalidState, "rule set has no encoding schema");
  const auto& schema = *rules.schema;
  std::ostringstream os;
  os << "task: " << to_string(rules.task) << " (target '" << schema.target.name << "'";
  if (rules.task == Task::kBinary) os << ", positive class '" << schema.target.classes.at(1) << "'";
  if (rules.task == Task::kMulticlass) {
    os << ", classes";
    for (const auto& c : schema.target.classes) os << " '" << c << "'";
  }
  os << ")\n";
  os << "format: " << to_string(rules.format) << "\n";
  os << "complexity: " << rules.complexity << "\n";
  auto weights = [&](const std::vector<double>& w) {
    if (w.size() == 1) return format_weight(w.front());
    std::string s = "[";
    for (std::size_t i = 0; i < w.size(); ++i) s += (i ? ", " : "") + format_weight(w[i]);
    return s + "]";
  };
  switch (rules.task) {
    case Task::kBinary: os << "P(y = 1 | x) = sigmoid(intercept + sum of active rule weights)\n"; break;
    case Task::kMulticlass: os << "P(y | x) = softmax(intercepts + sum of active rule weights)\n"; break;
    case Task::kRegression: {
      char buf[96];
      std::snprintf(buf, sizeof buf, "prediction = %.6g + %.6g * (intercept + sum of active rule weights)\n",
                    schema.target.mean, schema.target.scale);
      os << buf;
      break;
    }
  }
  os << "intercept: " << weights(rules.intercepts) << "\n";
  for (const auto& p : rules.predictors) {
    os << weights(p.weights) << " -- ";
    if (p.kind == PredictorKind::kLiteral) {
      os << literal(schema, p.bit, Polarity::kPositive);
    } else {
      os << "node " << p.node << ": " << render_formula(schema, p.formula);
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace lttr
