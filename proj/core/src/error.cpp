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

#include "lttr/error.hpp"

namespace lttr {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid-input";
    case ErrorCode::kInvalidState: return "invalid-state";
    case ErrorCode::kDegenerateState: return "degenerate-state";
    case ErrorCode::kInvalidConfig: return "invalid-config";
    case ErrorCode::kUndefinedMetric: return "undefined-metric";
    case ErrorCode::kTrainingFailure: return "training-failure";
    case ErrorCode::kSchemaMismatch: return "schema-mismatch";
    case ErrorCode::kDataNotFound: return "data-not-found";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void raise(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace lttr
