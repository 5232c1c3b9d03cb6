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

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace rrd {

enum class SourceDb { PubMed, PMC };

enum class BlockKind { TitleAbstract, BodyParagraph, Footnote, Caption, Other };

std::string_view to_string(SourceDb db) noexcept;
std::string_view to_string(BlockKind kind) noexcept;

/// Accepts "PubMed"/"PMC" in any letter case. Throws std::invalid_argument.
SourceDb parse_source_db(std::string_view s);

/// Location of the footnote reference that a footnote block annotates:
/// the referring block and the byte offset of the reference marker in it.
struct FootnoteAnchor {
  std::size_t block = 0;
  std::size_t offset = 0;

  friend bool operator==(const FootnoteAnchor&, const FootnoteAnchor&) = default;
};

struct TextBlock {
  std::string text;
  BlockKind kind = BlockKind::Other;
  std::optional<FootnoteAnchor> anchor;

  friend bool operator==(const TextBlock&, const TextBlock&) = default;
};

struct DocumentRecord {
  std::string doc_id;
  SourceDb source_db = SourceDb::PubMed;
  std::optional<int> pub_year;
  std::vector<TextBlock> blocks;

  /// Any block with at least one non-whitespace character.
  bool has_content() const noexcept;
  /// Whitespace-delimited runs over all blocks.
  std::size_t token_count() const noexcept;

  friend bool operator==(const DocumentRecord&, const DocumentRecord&) = default;
};

/// Provenance carried from a document onto every mention found in it.
struct Provenance {
  std::string doc_id;
  SourceDb source_db = SourceDb::PubMed;
  std::optional<int> pub_year;
};

inline Provenance provenance_of(const DocumentRecord& doc) {
  return {doc.doc_id, doc.source_db, doc.pub_year};
}

nlohmann::ordered_json to_json(const DocumentRecord& doc);

}  // namespace rrd
