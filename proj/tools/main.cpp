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

// lttr: train, prune, extract, evaluate and predict with LTT rule models.
//
// Exit codes: 0 ok, 1 usage, 2 data, 3 schema, 4 training failure.
// Every failure prints one line "error: <code>: <message>" to stderr.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lttr/csv.hpp"
#include "lttr/error.hpp"
#include "lttr/metrics.hpp"
#include "lttr/pipeline.hpp"
#include "lttr/rules.hpp"
#include "lttr/serialize.hpp"
#include "lttr/softtopk.hpp"

namespace fs = std::filesystem;
using namespace lttr;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kSchema = 3, kTraining = 4 };

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig: return kUsage;
    case ErrorCode::kSchemaMismatch: return kSchema;
    case ErrorCode::kTrainingFailure: return kTraining;
    default: return kData;
  }
}

std::string fmt(double v, const char* spec = "%.4f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string join_command(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
  return s;
}

struct Artifact {
  std::optional<ModelDocument> model;
  std::optional<RulesDocument> rules;

  std::shared_ptr<const EncodingSchema> schema() const {
    return model ? model->model.schema : rules->rules.schema;
  }
  std::optional<SplitSpec> split() const { return model ? model->split : rules->split; }
};

Artifact load_artifacts(const std::string& model_path, const std::string& rules_path) {
  Artifact a;
  auto load = [&](const std::string& path) {
    const std::string text = read_text(path);
    if (detect_artifact(text) == ArtifactKind::kModel) {
      a.model = model_from_json(text);
    } else {
      a.rules = rules_from_json(text);
    }
  };
  if (!model_path.empty()) load(model_path);
  if (!rules_path.empty()) load(rules_path);
  if (!a.model && !a.rules) raise(ErrorCode::kInvalidConfig, "give --model and/or --rules");
  if (a.model && a.rules && schema_to_json(*a.model->model.schema) != schema_to_json(*a.rules->rules.schema)) {
    raise(ErrorCode::kSchemaMismatch, "model and rules were built on different schemas");
  }
  return a;
}

BitDataset encode_against(const std::shared_ptr<const EncodingSchema>& schema, const Table& table, bool targets) {
  try {
    return encode(schema, table, targets);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidInput || e.code() == ErrorCode::kSchemaMismatch) {
      raise(ErrorCode::kSchemaMismatch, std::string("dataset does not fit the artifact schema (") + e.what() + ")");
    }
    throw;
  }
}

std::vector<std::size_t> select_rows(const std::optional<SplitSpec>& split, std::size_t rows,
                                     const std::string& which) {
  std::vector<std::size_t> all(rows);
  for (std::size_t i = 0; i < rows; ++i) all[i] = i;
  if (which == "all") return all;
  if (!split || split->rows != rows) {
    std::cerr << "warning: no matching split recorded for this dataset; using all rows\n";
    return all;
  }
  const Split s = split_rows(*split);
  if (which == "train") return s.train;
  if (which == "validation") return s.validation;
  return s.test;
}

void print_result(const std::string& label, const EvalResult& r) {
  std::cout << label << " " << r.metric << ": " << fmt(r.value, "%.6f") << " (n = " << r.samples << ")\n";
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
}

void print_rounds(const TrainLog& log) {
  for (const auto& rr : log.rounds) {
    std::cout << "round " << rr.round << ": active " << rr.active_connections << ", val " << fmt(rr.val_metric, "%.6f")
              << ", complexity " << rr.complexity << (rr.head_only ? " (head only)" : "")
              << (rr.round == log.selected_round ? "  [selected]" : "") << "\n";
  }
}

// ---- train ---------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::string out;
  bool no_prune = false;
};

int cmd_train(const TrainArgs& args, const std::string& command) {
  RunConfig config = load_run_config(args.config);
  for (const auto& o : args.overrides) apply_override(config, o);
  if (args.seed) apply_override(config, "seed=" + std::to_string(*args.seed));
  if (args.epochs) apply_override(config, "epochs=" + std::to_string(*args.epochs));
  if (!args.out.empty()) config.output_dir = args.out;
  config.validate();
  const std::string bytes = [&] {
    try {
      return read_text(config.dataset);
    } catch (const Error&) {
      raise(ErrorCode::kDataNotFound, "dataset not found: " + config.dataset.string());
    }
  }();
  const Table table = parse_csv(bytes);

  RunOptions opts;
  opts.prune = !args.no_prune;
  opts.progress = [](const std::string& line) { std::cerr << line << "\n"; };
  const RunResult r = run_pipeline(config, table, opts);

  const fs::path out = config.output_dir;
  write_text(out / "model.json", to_json(r.document));
  write_text(out / "schema.json", schema_to_json(*r.document.model.schema));
  {
    std::ostringstream log;
    const auto& tl = r.document.log;
    log << "phase,epoch,loss,val_" << tl.metric << "\n";
    for (const auto& e : tl.epochs) log << "train," << e.epoch << "," << fmt(e.loss, "%.10g") << "," << fmt(e.val_metric, "%.10g") << "\n";
    for (const auto& e : tl.finetune_epochs) log << "finetune," << e.epoch << "," << fmt(e.loss, "%.10g") << "," << fmt(e.val_metric, "%.10g") << "\n";
    write_text(out / "train_log.csv", log.str());
    std::ostringstream rounds;
    rounds << "round,active_connections,val_" << tl.metric << ",complexity,score,head_only,selected\n";
    for (const auto& rr : tl.rounds) {
      rounds << rr.round << "," << rr.active_connections << "," << fmt(rr.val_metric, "%.10g") << "," << rr.complexity
             << "," << fmt(rr.score, "%.10g") << "," << (rr.head_only ? 1 : 0) << ","
             << (rr.round == tl.selected_round ? 1 : 0) << "\n";
    }
    write_text(out / "prune_rounds.csv", rounds.str());
  }
  write_text(out / "manifest.json", manifest_json(config, bytes, command));

  const auto& tl = r.document.log;
  if (!tl.epochs.empty()) {
    std::cout << "final train loss: " << fmt(tl.epochs.back().loss, "%.6f") << "\n";
    std::cout << "validation " << tl.metric << ": " << fmt(tl.epochs.back().val_metric, "%.6f") << "\n";
  }
  print_rounds(tl);
  if (r.test_network) print_result("test network", *r.test_network);
  std::cout << "model: " << (out / "model.json").string() << "\n";
  return kOk;
}

// ---- prune ---------------------------------------------------------------

int cmd_prune(const std::string& model_path, const TrainArgs& args, const std::string& command) {
  ModelDocument doc = model_from_json(read_text(model_path));
  RunConfig config = load_run_config(args.config);
  for (const auto& o : args.overrides) apply_override(config, o);
  if (args.seed) apply_override(config, "seed=" + std::to_string(*args.seed));
  if (!args.out.empty()) config.output_dir = args.out;
  config.validate();
  const std::string bytes = read_text(config.dataset);
  const Table table = parse_csv(bytes);
  const BitDataset data = encode_against(doc.model.schema, table, true);
  const Split split = doc.split && doc.split->rows == table.size()
                          ? split_rows(*doc.split)
                          : split_rows(table.size(), config.seed, config.test_fraction, config.validation_fraction);
  if (!doc.model.ltt.frozen_masks) freeze_masks(doc.model);
  prune_finetune(doc.model, data.subset(split.train), data.subset(split.validation), config.train, doc.log);
  const fs::path out = config.output_dir;
  write_text(out / "model.json", to_json(doc));
  write_text(out / "manifest.json", manifest_json(config, bytes, command));
  print_rounds(doc.log);
  std::cout << "model: " << (out / "model.json").string() << "\n";
  return kOk;
}

// ---- extract -------------------------------------------------------------

struct ExtractArgs {
  std::string model;
  std::string data;
  std::string format = "dnf";
  bool no_xor = false;
  std::string out;
  std::string pla;
};

int cmd_extract(const ExtractArgs& args) {
  const ModelDocument doc = model_from_json(read_text(args.model));
  const Table table = read_csv(args.data);
  const BitDataset data = encode_against(doc.model.schema, table, true);
  if (doc.log.rounds.empty() && doc.model.nodes() > 0) {
    std::cerr << "warning: model was not pruned; extracting on its current masks\n";
  }

  const bool use_xor = !args.no_xor;
  const RuleSet rules = extract_for(doc.model, data.bits, rule_format_from_string(args.format), use_xor);
  std::cout << render_text(rules);
  if (rules.task == Task::kBinary) {
    try {
      std::cout << "decision: " << render_formula(*rules.schema, decision_formula(rules, data.bits, use_xor)) << "\n";
    } catch (const Error&) {
      // More than 16 inputs in play; the weighted rules above are the model.
    }
  }

  const auto train_rows = select_rows(doc.split, table.size(), "train");
  const double match = fidelity(doc.model, rules, data.subset(train_rows).bits);
  std::cout << "exact-match: " << fmt(match) << "\n";

  if (!args.out.empty()) {
    const fs::path out = args.out;
    write_text(out / "rules.txt", render_text(rules));
    write_text(out / "rules.json", to_json(RulesDocument{rules, doc.split}));
  }
  if (!args.pla.empty()) {
    Model frozen = doc.model;
    freeze_masks(frozen);
    for (int j = 0; j < frozen.nodes(); ++j) {
      TruthTable t = enumerate_truth_table(frozen, j);
      assign_dont_cares(t, observed_patterns(data.bits, t.inputs));
      write_text(fs::path(args.pla) / ("node_" + std::to_string(j) + ".pla"), t.to_pla());
    }
  }
  return kOk;
}

// ---- evaluate ------------------------------------------------------------

int cmd_evaluate(const std::string& model_path, const std::string& rules_path, const std::string& data_path,
                 const std::string& split) {
  const Artifact a = load_artifacts(model_path, rules_path);
  const Table table = read_csv(data_path);
  const BitDataset data = encode_against(a.schema(), table, true);
  const BitDataset part = data.subset(select_rows(a.split(), table.size(), split));
  const Task task = a.schema()->target.task;
  std::optional<EvalResult> net;
  std::optional<EvalResult> rul;
  if (a.model) {
    net = evaluate_predictions(task, predict_bits(a.model->model, part.bits), part.targets);
    print_result("network", *net);
  }
  if (a.rules) {
    rul = evaluate_predictions(task, rule_predict_bits(a.rules->rules, part.bits), part.targets);
    print_result("rules", *rul);
  }
  if (net && rul) {
    const double diff = std::abs(net->value - rul->value);
    std::cout << "agreement: " << (diff <= 1e-10 ? "yes" : "no") << " (|difference| = " << fmt(diff, "%.3g") << ")\n";
    if (diff > 1e-10) raise(ErrorCode::kSchemaMismatch, "rules do not reproduce the network on this data");
  }
  return kOk;
}

// ---- predict -------------------------------------------------------------

int cmd_predict(const std::string& model_path, const std::string& rules_path, const std::string& data_path,
                const std::string& out_path) {
  if (!model_path.empty() && !rules_path.empty()) raise(ErrorCode::kInvalidConfig, "predict takes --model or --rules, not both");
  const Artifact a = load_artifacts(model_path, rules_path);
  const auto schema = a.schema();
  const Table table = read_csv(data_path);
  const BitDataset data = encode_against(schema, table, false);
  const Eigen::MatrixXd p = a.model ? predict_bits(a.model->model, data.bits) : rule_predict_bits(a.rules->rules, data.bits);

  std::ostringstream os;
  const auto& classes = schema->target.classes;
  switch (schema->target.task) {
    case Task::kBinary: os << "p_" << classes[1] << ",prediction\n"; break;
    case Task::kMulticlass:
      for (const auto& c : classes) os << "p_" << c << ",";
      os << "prediction\n";
      break;
    case Task::kRegression: os << "prediction\n"; break;
  }
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    switch (schema->target.task) {
      case Task::kBinary: os << fmt(p(r, 0), "%.17g") << "," << classes[p(r, 0) > 0.5 ? 1 : 0] << "\n"; break;
      case Task::kMulticlass: {
        Eigen::Index best = 0;
        p.row(r).maxCoeff(&best);
        for (Eigen::Index c = 0; c < p.cols(); ++c) os << fmt(p(r, c), "%.17g") << ",";
        os << classes[static_cast<std::size_t>(best)] << "\n";
        break;
      }
      case Task::kRegression: os << fmt(p(r, 0), "%.17g") << "\n"; break;
    }
  }
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    write_text(out_path, os.str());
  }
  return kOk;
}

// ---- topk ----------------------------------------------------------------

int cmd_topk(const std::vector<double>& x, double k, double tau) {
  BisectionOptions opts;
  opts.record_history = true;
  const SoftTopKSolution s = soft_topk(x, k, tau, opts);
  std::cout << "c: " << fmt(s.c, "%.17g") << "\n";
  std::cout << "iterations: " << s.iterations << "\n";
  std::cout << "y:";
  double sum = 0.0;
  for (double v : s.y) {
    std::cout << " " << fmt(v, "%.9g");
    sum += v;
  }
  std::cout << "\nsum: " << fmt(sum, "%.12g") << "\n";
  std::cout << "residuals:";
  for (double r : s.residuals) std::cout << " " << fmt(r, "%.3e");
  std::cout << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learnable truth-table rule models: train, prune, extract, evaluate, predict"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(library_version()));

  TrainArgs targs;
  auto* train_cmd = app.add_subcommand("train", "Train, prune and save a model from a run config");
  train_cmd->add_option("--config", targs.config, "Run config JSON")->required();
  train_cmd->add_option("--set", targs.overrides, "Config override key=value (repeatable)");
  train_cmd->add_option("--seed", targs.seed, "Seed for split, init and shuffling");
  train_cmd->add_option("--epochs", targs.epochs, "Phase-one epochs");
  train_cmd->add_option("--out", targs.out, "Output directory");
  train_cmd->add_flag("--no-prune", targs.no_prune, "Stop after phase one");

  std::string prune_model;
  TrainArgs pargs;
  auto* prune_cmd = app.add_subcommand("prune", "Prune and fine-tune a trained model");
  prune_cmd->add_option("--model", prune_model, "Model JSON")->required();
  prune_cmd->add_option("--config", pargs.config, "Run config JSON")->required();
  prune_cmd->add_option("--set", pargs.overrides, "Config override key=value (repeatable)");
  prune_cmd->add_option("--seed", pargs.seed, "Seed");
  prune_cmd->add_option("--out", pargs.out, "Output directory");

  ExtractArgs eargs;
  auto* extract_cmd = app.add_subcommand("extract", "Extract weighted Boolean rules from a model");
  extract_cmd->add_option("--model", eargs.model, "Model JSON")->required();
  extract_cmd->add_option("--data", eargs.data, "CSV used for don't-cares and the fidelity check")->required();
  extract_cmd->add_option("--format", eargs.format, "dnf or cnf")->check(CLI::IsMember({"dnf", "cnf"}));
  extract_cmd->add_flag("--no-xor", eargs.no_xor, "Disable XOR/XNOR terms");
  extract_cmd->add_option("--out", eargs.out, "Directory for rules.txt and rules.json");
  extract_cmd->add_option("--pla", eargs.pla, "Directory for per-node truth tables");

  std::string ev_model, ev_rules, ev_data, ev_split = "test";
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a model and/or rule set on a dataset");
  eval_cmd->add_option("--model", ev_model, "Model JSON");
  eval_cmd->add_option("--rules", ev_rules, "Rules JSON");
  eval_cmd->add_option("--data", ev_data, "CSV")->required();
  eval_cmd->add_option("--split", ev_split, "test, validation, train or all")
      ->check(CLI::IsMember({"test", "validation", "train", "all"}));

  std::string pr_model, pr_rules, pr_data, pr_out;
  auto* predict_cmd = app.add_subcommand("predict", "Predict every row of a CSV");
  predict_cmd->add_option("--model", pr_model, "Model JSON");
  predict_cmd->add_option("--rules", pr_rules, "Rules JSON");
  predict_cmd->add_option("--data", pr_data, "CSV")->required();
  predict_cmd->add_option("--out", pr_out, "Output CSV (default stdout)");

  std::vector<double> tk_x;
  double tk_k = 1;
  double tk_tau = 1.0;
  auto* topk_cmd = app.add_subcommand("topk", "Debug: solve one soft TopK and print the residual history");
  topk_cmd->add_option("--x", tk_x, "Scores, comma separated")->required()->delimiter(',');
  topk_cmd->add_option("--k", tk_k, "Target cardinality")->required();
  topk_cmd->add_option("--tau", tk_tau, "Temperature")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (auto& ch : msg) ch = ch == '\n' ? ' ' : ch;
    std::cerr << "error: usage: " << msg << "\n";
    return kUsage;
  }

  const std::string command = join_command(argc, argv);
  try {
    if (*train_cmd) return cmd_train(targs, command);
    if (*prune_cmd) return cmd_prune(prune_model, pargs, command);
    if (*extract_cmd) return cmd_extract(eargs);
    if (*eval_cmd) return cmd_evaluate(ev_model, ev_rules, ev_data, ev_split);
    if (*predict_cmd) return cmd_predict(pr_model, pr_rules, pr_data, pr_out);
    if (*topk_cmd) return cmd_topk(tk_x, tk_k, tk_tau);
  } catch (const Error& e) {
    std::string msg = e.what();
    for (auto& ch : msg) ch = ch == '\n' ? ' ' : ch;
    std::cerr << "error: " << msg << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}
