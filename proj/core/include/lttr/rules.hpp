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

// Symbolic extraction of a trained model into weighted Boolean rules.
//
// Every surviving LTT node becomes a minimized DNF (or CNF) over its active
// inputs, every skip feature with a nonzero classifier weight becomes a
// single-literal rule, and the classifier weights are carried over. The
// resulting rule set reproduces the network exactly on every row whose node
// input patterns were observed during extraction.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lttr/encode.hpp"
#include "lttr/model.hpp"
#include "lttr/qmc.hpp"

namespace lttr {

enum class RuleFormat { kDnf, kCnf };

std::string_view to_string(RuleFormat format);
RuleFormat rule_format_from_string(std::string_view text);

/// A Boolean function over global bit indices. In DNF it is the OR of the
/// terms; in CNF the terms are implicants of the complement and the formula
/// is the AND of their negations.
struct Formula {
  RuleFormat format = RuleFormat::kDnf;
  std::vector<int> inputs;  // global bit per implicant position, ascending
  std::vector<Implicant> terms;

  bool eval(std::span<const double> bits) const;
  bool eval_local(std::uint32_t v) const;
  bool is_constant() const;
  bool constant_value() const;
  int operators() const;
};

enum class PredictorKind { kLiteral, kNode };

struct Predictor {
  PredictorKind kind = PredictorKind::kLiteral;
  int bit = -1;   // literal rules
  int node = -1;  // node rules
  Formula formula;
  std::vector<double> weights;  // one per model output
};

struct RuleSet {
  Task task = Task::kBinary;
  RuleFormat format = RuleFormat::kDnf;
  bool use_xor = true;
  std::shared_ptr<const EncodingSchema> schema;
  /// Ordered by descending max |weight|, then kind, then index.
  std::vector<Predictor> predictors;
  std::vector<double> intercepts;
  int complexity = 0;
};

/// Active inputs of a node: frozen mask entries that are neither pruned nor
/// exactly zero, ascending.
std::vector<int> active_inputs(const Model& model, int node);

/// Minterms of node j over its active inputs. Requires frozen masks.
TruthTable enumerate_truth_table(const Model& model, int node);

/// Distinct projections of the rows onto `inputs` (bit i = inputs[i]), ascending.
std::vector<std::uint32_t> observed_patterns(const Eigen::MatrixXd& bits, std::span<const int> inputs);

/// Fills dont_cares with every pattern absent from `observed`.
void assign_dont_cares(TruthTable& table, std::span<const std::uint32_t> observed);

struct ExtractOptions {
  RuleFormat format = RuleFormat::kDnf;
  bool use_xor = true;
  MinimizeOptions minimize;
};

/// Don't-cares are the node input patterns absent from `bits`; the rules are
/// exact on every row of `bits`.
RuleSet extract_rules(const Model& model, const Eigen::MatrixXd& bits, const ExtractOptions& options = {});

/// Formula of one node rule with the given don't-cares. Constant results
/// come back as a single constant-true term or an empty term list.
Formula node_formula(const TruthTable& table, RuleFormat format, const MinimizeOptions& options);

/// Weighted rule sums plus intercepts, rows x outputs.
Eigen::MatrixXd rule_scores(const RuleSet& rules, const Eigen::MatrixXd& bits);
/// Predictions in user units, same layout as predict_bits.
Eigen::MatrixXd rule_predict_bits(const RuleSet& rules, const Eigen::MatrixXd& bits);
std::vector<double> rule_eval(const RuleSet& rules, const std::vector<std::string>& header,
                              const std::vector<std::string>& row);

/// Predictors with a nonzero weight for any output plus all node-rule
/// operators. Shared multiclass rules count once.
int complexity(const RuleSet& rules);

/// Single formula for the binary decision (probability > 1/2) of the whole
/// rule set over the union of its inputs, with unobserved patterns of
/// `bits` as don't-cares. Requires a binary task and at most 16 inputs.
Formula decision_formula(const RuleSet& rules, const Eigen::MatrixXd& bits, bool use_xor);

std::string render_formula(const EncodingSchema& schema, const Formula& formula);
std::string render_text(const RuleSet& rules);

}  // namespace lttr
