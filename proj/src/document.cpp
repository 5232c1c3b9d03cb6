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

#include "rrd/document.hpp"

#include "rrd/text.hpp"

namespace rrd {

std::string_view to_string(SourceDb db) noexcept {
  return db == SourceDb::PubMed ? "PubMed" : "PMC";
}

std::string_view to_string(BlockKind kind) noexcept {
  switch (kind) {
    case BlockKind::TitleAbstract:
      return "TitleAbstract";
    case BlockKind::BodyParagraph:
      return "BodyParagraph";
    case BlockKind::Footnote:
      return "Footnote";
    case BlockKind::Caption:
      return "Caption";
    case BlockKind::Other:
      break;
  }
  return "Other";
}

SourceDb parse_source_db(std::string_view s) {
  const std::string lower = text::to_lower_ascii(s);
  if (lower == "pubmed") return SourceDb::PubMed;
  if (lower == "pmc") return SourceDb::PMC;
  throw std::invalid_argument("unknown source database: " + std::string(s));
}

bool DocumentRecord::has_content() const noexcept {
  for (const auto& block : blocks) {
    if (text::has_content(block.text)) return true;
  }
  return false;
}

std::size_t DocumentRecord::token_count() const noexcept {
  std::size_t tokens = 0;
  for (const auto& block : blocks) tokens += text::count_tokens(block.text);
  return tokens;
}

nlohmann::ordered_json to_json(const DocumentRecord& doc) {
  nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
  for (const auto& block : doc.blocks) {
    nlohmann::ordered_json b = {{"kind", to_string(block.kind)}, {"text", block.text}};
    if (block.anchor) {
      b["anchor"] = {{"block", block.anchor->block}, {"offset", block.anchor->offset}};
    }
    blocks.push_back(std::move(b));
  }
  return {{"doc_id", doc.doc_id},
          {"source_db", to_string(doc.source_db)},
          {"pub_year", doc.pub_year ? nlohmann::ordered_json(*doc.pub_year) : nlohmann::ordered_json()},
          {"blocks", std::move(blocks)}};
}

}  // namespace rrd
