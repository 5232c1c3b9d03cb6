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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rrd/document.hpp"

namespace rrd::segment {

struct Sentence {
  std::string text;
  std::size_t start_offset = 0;  // byte offsets into the block text
  std::size_t end_offset = 0;
  BlockKind block_kind = BlockKind::Other;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

/// Built-in abbreviation list, identical to data/abbreviations.txt.
const std::vector<std::string>& default_abbreviations();

/// Parses the abbreviation file format: one entry per line, '#' comments.
std::vector<std::string> parse_abbreviations(std::string_view content);
std::vector<std::string> load_abbreviations(const std::filesystem::path& path);

/// Rule-based splitter. A boundary follows '.', '!' or '?' (plus any closing
/// quotes or brackets) when whitespace and then an uppercase letter or digit
/// follow, unless the token before it is a listed abbreviation or the
/// boundary would fall inside a URL. A whitespace run holding two newlines
/// always ends a sentence.
class Segmenter {
 public:
  Segmenter();
  explicit Segmenter(std::vector<std::string> abbreviations);

  std::vector<Sentence> segment(std::string_view text, BlockKind kind = BlockKind::Other) const;
  std::vector<Sentence> segment(const TextBlock& block) const {
    return segment(block.text, block.kind);
  }

 private:
  bool ends_with_abbreviation(std::string_view text, std::size_t period) const;

  std::vector<std::string> abbreviations_;
};

}  // namespace rrd::segment
