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

// JSON documents for schemas, trained models and extracted rule sets.
// Doubles are written in shortest round-trip form, so load followed by save
// reproduces the original bytes.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "lttr/encode.hpp"
#include "lttr/model.hpp"
#include "lttr/rules.hpp"
#include "lttr/train.hpp"

namespace lttr {

/// How the rows of a CSV were split when the artifact was trained.
struct SplitSpec {
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
  double validation_fraction = 0.2;
  std::size_t rows = 0;
};

struct ModelDocument {
  Model model;
  TrainLog log;
  std::optional<SplitSpec> split;
};

struct RulesDocument {
  RuleSet rules;
  std::optional<SplitSpec> split;
};

enum class ArtifactKind { kModel, kRules };

std::string schema_to_json(const EncodingSchema& schema);
EncodingSchema schema_from_json(std::string_view text);

std::string to_json(const ModelDocument& doc);
ModelDocument model_from_json(std::string_view text);

std::string to_json(const RulesDocument& doc);
RulesDocument rules_from_json(std::string_view text);

/// Distinguishes model and rule documents; schema-mismatch for anything else.
ArtifactKind detect_artifact(std::string_view text);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace lttr
