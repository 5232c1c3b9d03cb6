// Copyright 2026 The RRD Toolkit Authors
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

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rrd::xml {

/// Minimal in-memory element tree for a single record payload.
/// Text nodes have an empty name.
struct Node {
  std::string name;
  std::string text;
  std::vector<std::pair<std::string, std::string>> attrs;
  std::vector<Node> children;

  bool is_text() const noexcept { return name.empty(); }
  const std::string* attr(std::string_view key) const noexcept;
  const Node* child(std::string_view element) const noexcept;
  /// Concatenated descendant text, no whitespace handling.
  std::string inner_text() const;
};

/// Parses one XML fragment with a single root element. Undefined named
/// entities are tolerated (common HTML entities are mapped, others become
/// U+FFFD). Throws ingest::ParseError with line/column on malformed input.
Node parse(std::string_view payload);

}  // namespace rrd::xml
