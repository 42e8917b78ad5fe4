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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lttr {

/// Raw table as read from a CSV file: a header plus string cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const;
  std::size_t size() const { return rows.size(); }
};

/// RFC 4180 style parsing: comma separated, double-quote escaping, LF or CRLF
/// line endings. Every record must have as many fields as the header.
Table parse_csv(std::string_view text);

/// Throws a data-not-found error when the file does not exist.
Table read_csv(const std::filesystem::path& path);

}  // namespace lttr
