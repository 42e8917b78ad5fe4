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

#include <algorithm>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "lttr/csv.hpp"
#include "lttr/serialize.hpp"
#include "test_util.hpp"

namespace lttr {
namespace {

using json = nlohmann::json;
using testing::code_of;

// Short iris run; ctest runs from the source directory.
RunConfig quick_iris() {
  RunConfig c = load_run_config("data/iris.json");
  apply_override(c, "epochs=20");
  apply_override(c, "finetune_epochs=5");
  apply_override(c, "prune_rounds=2");
  return c;
}

RunResult run(const RunConfig& c) { return run_pipeline(c, read_csv(c.dataset)); }

TEST_SUITE("pipeline") {

TEST_CASE("split_rows partitions the rows") {
  const Split s = split_rows(100, 7, 0.2, 0.2);
  CHECK(s.test.size() == 20);
  CHECK(s.validation.size() == 16);
  CHECK(s.train.size() == 64);
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.validation.begin(), s.validation.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == 100);
  CHECK(*all.rbegin() == 99);
  const Split again = split_rows(SplitSpec{7, 0.2, 0.2, 100});
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);
  CHECK(split_rows(100, 8, 0.2, 0.2).test != s.test);
  const Split none = split_rows(4, 0, 0.0, 0.0);
  CHECK(none.train.size() == 4);
  CHECK(none.test.empty());
}

TEST_CASE("config loading, overrides and validation") {
  RunConfig c = load_run_config("data/iris.json");
  CHECK(c.dataset == std::filesystem::path("data") / "iris.csv");
  CHECK(c.columns.size() == 5);
  CHECK(c.task == Task::kMulticlass);
  CHECK(c.output_dir == std::filesystem::path("runs") / "iris");
  const std::string text = run_config_to_json(c);
  CHECK(run_config_to_json(run_config_from_json(text)) == text);

  apply_override(c, "epochs=7");
  apply_override(c, "name=other");
  apply_override(c, "use_xor=false");
  CHECK(c.train.epochs == 7);
  CHECK(c.name == "other");
  CHECK_FALSE(c.use_xor);
  CHECK(code_of([&] { apply_override(c, "epoch=7"); }) == ErrorCode::kInvalidConfig);
  CHECK(code_of([&] { apply_override(c, "epochs"); }) == ErrorCode::kInvalidConfig);
  CHECK(code_of([&] { apply_override(c, "epochs=\"many\""); }) == ErrorCode::kInvalidConfig);
  CHECK(code_of([&] { apply_override(c, "rule_format=dnf2"); }) == ErrorCode::kInvalidConfig);
  apply_override(c, "k=0");
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::kInvalidConfig);
  CHECK(code_of([] { run_config_from_json("[1, 2]"); }) == ErrorCode::kInvalidConfig);
  CHECK(code_of([] { run_config_from_json("{"); }) == ErrorCode::kInvalidConfig);
  CHECK(code_of([] { load_run_config("data/missing.json"); }) == ErrorCode::kDataNotFound);
}

TEST_CASE("task in the config must match the target") {
  RunConfig c = quick_iris();
  apply_override(c, "task=regression");
  CHECK(code_of([&] { run(c); }) == ErrorCode::kSchemaMismatch);
}

TEST_CASE("runs are deterministic and the rules are faithful") {
  const RunConfig c = quick_iris();
  const RunResult a = run(c);
  const RunResult b = run(c);
  CHECK(to_json(a.document) == to_json(b.document));
  CHECK(a.train_fidelity == 1.0);
  CHECK(fidelity(a.document.model, a.rules, a.data.bits) == 1.0);
  REQUIRE(a.test_network);
  REQUIRE(a.test_rules);
  CHECK(a.test_network->metric == "macro_ovr_auc");
  CHECK(std::abs(a.test_network->value - a.test_rules->value) <= 1e-10);
  CHECK(a.test_network->samples == 30);
  CHECK(a.document.log.rounds.size() >= 2);
}

TEST_CASE("documents round-trip byte for byte") {
  const RunResult r = run(quick_iris());
  const std::string model_text = to_json(r.document);
  const ModelDocument doc = model_from_json(model_text);
  CHECK(to_json(doc) == model_text);
  CHECK(doc.split->rows == 150);
  CHECK((predict_bits(doc.model, r.data.bits) - predict_bits(r.document.model, r.data.bits)).cwiseAbs().maxCoeff() ==
        0.0);

  const std::string rules_text = to_json(RulesDocument{r.rules, r.document.split});
  const RulesDocument rules = rules_from_json(rules_text);
  CHECK(to_json(rules) == rules_text);
  CHECK(rules.rules.complexity == r.rules.complexity);
  CHECK(render_text(rules.rules) == render_text(r.rules));

  const std::string schema_text = schema_to_json(*r.data.schema);
  CHECK(schema_to_json(schema_from_json(schema_text)) == schema_text);

  CHECK(detect_artifact(model_text) == ArtifactKind::kModel);
  CHECK(detect_artifact(rules_text) == ArtifactKind::kRules);
  CHECK(code_of([] { detect_artifact("{\"kind\": \"other\"}"); }) == ErrorCode::kSchemaMismatch);
  CHECK(code_of([&] { rules_from_json(model_text); }) == ErrorCode::kSchemaMismatch);
  CHECK(code_of([] { model_from_json("not json"); }) == ErrorCode::kSchemaMismatch);
}

TEST_CASE("manifest records what a rerun needs") {
  const RunConfig c = quick_iris();
  const std::string bytes = read_text(c.dataset);
  const json m = json::parse(manifest_json(c, bytes, "lttr train data/iris.json"));
  CHECK(m["seed"] == c.seed);
  CHECK(m["config"] == json::parse(run_config_to_json(c)));
  CHECK(m["dataset"]["bytes"] == bytes.size());
  CHECK(m["dataset"]["fnv1a64"].get<std::string>().size() == 16);
  CHECK(m["version"] == std::string(library_version()));
  CHECK(m["versions"].contains("eigen"));
  CHECK(json::parse(manifest_json(c, bytes, "x"))["dataset"] == m["dataset"]);
  CHECK(json::parse(manifest_json(c, bytes + " ", "x"))["dataset"]["fnv1a64"] != m["dataset"]["fnv1a64"]);
}

}  // TEST_SUITE

}  // namespace
}  // namespace lttr
