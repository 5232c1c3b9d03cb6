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
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rrd/document.hpp"

// Streaming ingestion of MEDLINE citation archives and JATS article archives.
namespace rrd::ingest {

enum class Schema { Medline, Jats };

Schema parse_schema(std::string_view s);
std::string_view to_string(Schema s) noexcept;

using NameSet = std::set<std::string, std::less<>>;

/// Element and attribute names that drive text flattening. Loaded from a
/// key-value profile file so new publisher encodings can be added without
/// recompiling. See data/jats.profile for the documented format.
struct SchemaProfile {
  NameSet record_elements;        // elements that frame one article
  NameSet link_elements;          // elements whose target is a URL
  NameSet link_attributes;        // attributes holding that target
  NameSet paragraph_elements;     // -> BodyParagraph blocks
  NameSet caption_elements;       // -> Caption blocks
  NameSet footnote_elements;      // -> Footnote blocks
  NameSet footnote_ref_elements;  // in-text references to footnotes
  NameSet footnote_ref_types;     // accepted ref-type values on those
  NameSet other_block_elements;   // -> Other blocks when not nested in a block
  NameSet separator_elements;     // inline word breaks
  NameSet skip_elements;          // dropped with all descendants

  static SchemaProfile jats();
  static SchemaProfile medline();
  static SchemaProfile defaults(Schema schema);
};

/// Reads `key = value value, value` lines over `base`. Keys present in the
/// file replace the corresponding set. Throws std::runtime_error with the
/// offending line number on unknown keys or malformed lines.
SchemaProfile load_schema_profile(const std::filesystem::path& path, SchemaProfile base);
SchemaProfile parse_schema_profile(std::string_view content, SchemaProfile base);

/// Archive-level failure: unreadable file, corrupt compression or broken
/// record framing. Fatal for that archive only.
class ArchiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-record failure: malformed XML or a missing identifier.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line = 0, std::size_t column = 0)
      : std::runtime_error(message), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct RawArticle {
  std::string payload;
  std::uint64_t offset = 0;  // byte offset of the record start in the decompressed stream
  std::size_t index = 0;     // 0-based record number within the archive
};

/// Lazily splits a plain or gzip-compressed XML archive into one payload per
/// record element. Buffers at most one record plus one read chunk.
class ArchiveReader {
 public:
  ArchiveReader(const std::filesystem::path& path, NameSet record_elements);
  ~ArchiveReader();
  ArchiveReader(const ArchiveReader&) = delete;
  ArchiveReader& operator=(const ArchiveReader&) = delete;

  /// Next record, or nullopt at a clean end of archive. Throws ArchiveError.
  std::optional<RawArticle> next();

  /// Largest record payload held so far, in bytes.
  std::size_t peak_payload_bytes() const noexcept { return peak_payload_; }

 private:
  enum class State { Text, Markup, Element, Comment, CData, Instruction, Declaration };

  bool fill();
  // Consumes one byte; returns true when a record completed.
  bool consume(char c);
  bool finish_tag();

  void* file_ = nullptr;  // gzFile
  std::string path_;
  NameSet record_names_;
  std::vector<char> chunk_;
  std::size_t chunk_pos_ = 0;
  std::size_t chunk_len_ = 0;
  bool eof_ = false;
  std::uint64_t consumed_ = 0;

  State state_ = State::Text;
  std::string tag_;
  char quote_ = 0;
  int decl_depth_ = 0;
  bool in_record_ = false;
  std::string record_name_;
  int depth_ = 0;
  std::string payload_;
  std::uint64_t record_offset_ = 0;
  std::uint64_t tag_offset_ = 0;
  std::size_t records_ = 0;
  std::size_t peak_payload_ = 0;
};

/// Non-fatal findings while parsing a record.
using Warnings = std::vector<std::string>;

/// One MEDLINE citation (PubmedArticle or MedlineCitation element). Produces
/// a single TitleAbstract block holding the title and abstract sections
/// joined by single spaces.
DocumentRecord parse_medline_record(std::string_view payload,
                                    const SchemaProfile& profile = SchemaProfile::medline(),
                                    Warnings* warnings = nullptr);

/// One JATS article element. Link elements are flattened to "T (D)" or "T";
/// footnotes become their own blocks anchored at the first in-text reference.
DocumentRecord parse_jats_article(std::string_view payload,
                                  const SchemaProfile& profile = SchemaProfile::jats(),
                                  Warnings* warnings = nullptr);

/// Text for a link with target `target` and display text `display`:
/// "target (display)" when display is non-empty and differs, else "target".
std::string flatten_link(std::string_view target, std::string_view display);

}  // namespace rrd::ingest
