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

#include "rrd/segment.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rrd/text.hpp"
#include "rrd/url.hpp"

namespace rrd::segment {
namespace {

constexpr std::string_view kEmbeddedAbbreviations =
#include "abbreviations_data.inc"
    ;

// Byte length of a closing quote or bracket at `pos`, or 0.
std::size_t closer_length(std::string_view s, std::size_t pos) {
  if (pos >= s.size()) return 0;
  switch (s[pos]) {
    case '"':
    case '\'':
    case ')':
    case ']':
    case '}':
      return 1;
    default:
      break;
  }
  // U+2019 and U+201D
  if (s.substr(pos, 3) == "\xE2\x80\x99" || s.substr(pos, 3) == "\xE2\x80\x9D") return 3;
  return 0;
}

std::size_t opener_length(std::string_view s, std::size_t pos) {
  if (pos >= s.size()) return 0;
  switch (s[pos]) {
    case '"':
    case '\'':
    case '(':
    case '[':
      return 1;
    default:
      break;
  }
  // U+2018 and U+201C
  if (s.substr(pos, 3) == "\xE2\x80\x98" || s.substr(pos, 3) == "\xE2\x80\x9C") return 3;
  return 0;
}

}  // namespace

std::vector<std::string> parse_abbreviations(std::string_view content) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto eol = content.find('\n', pos);
    if (eol == std::string_view::npos) eol = content.size();
    const auto line = text::trim(content.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty() || line.front() == '#') continue;
    out.emplace_back(line);
  }
  return out;
}

const std::vector<std::string>& default_abbreviations() {
  static const std::vector<std::string> list = parse_abbreviations(kEmbeddedAbbreviations);
  return list;
}

std::vector<std::string> load_abbreviations(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read abbreviation list " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_abbreviations(text::sanitize_utf8(buf.str()));
}

Segmenter::Segmenter() : Segmenter(default_abbreviations()) {}

Segmenter::Segmenter(std::vector<std::string> abbreviations)
    : abbreviations_(std::move(abbreviations)) {}

bool Segmenter::ends_with_abbreviation(std::string_view text, std::size_t period) const {
  const std::string_view head = text.substr(0, period + 1);
  for (const auto& abbr : abbreviations_) {
    if (abbr.size() > head.size() || !head.ends_with(abbr)) continue;
    const std::size_t begin = head.size() - abbr.size();
    if (begin == 0) return true;
    const char before = head[begin - 1];
    if (before == '(' || before == '[' || before == '"' || before == '\'' ||
        text::is_space_at(head, begin - 1)) {
      return true;
    }
    // Multi-byte whitespace ending right before the abbreviation.
    for (std::size_t back = 2; back <= 3 && back <= begin; ++back) {
      if (text::space_length(head, begin - back) == back) return true;
    }
  }
  return false;
}

std::vector<Sentence> Segmenter::segment(std::string_view text, BlockKind kind) const {
  std::vector<Sentence> out;
  if (text.empty()) return out;

  const auto urls = url::find_urls(text);
  const auto inside_url = [&](std::size_t cut) {
    return std::any_of(urls.begin(), urls.end(),
                       [cut](const url::RawUrlSpan& s) { return s.start < cut && cut < s.end; });
  };

  std::vector<std::size_t> cuts;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      std::size_t j = i;
      int newlines = 0;
      while (j < text.size()) {
        const std::size_t sp = text::space_length(text, j);
        if (!sp) break;
        if (text[j] == '\n') ++newlines;
        j += sp;
      }
      if (newlines >= 2) cuts.push_back(i);
      i = std::max(j, i + 1);
      continue;
    }
    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }
    std::size_t cut = i + 1;
    while (const std::size_t len = closer_length(text, cut)) cut += len;
    std::size_t next = cut;
    bool saw_space = false;
    while (const std::size_t sp = text::space_length(text, next)) {
      next += sp;
      saw_space = true;
    }
    if (!saw_space || next >= text.size()) {
      i = cut;
      continue;
    }
    while (const std::size_t len = opener_length(text, next)) next += len;
    const bool starts_sentence =
        next < text.size() && (text::is_ascii_upper(text[next]) || text::is_ascii_digit(text[next]));
    if (starts_sentence && !inside_url(cut) && !(c == '.' && ends_with_abbreviation(text, i))) {
      cuts.push_back(cut);
    }
    i = cut;
  }

  std::size_t prev = 0;
  const auto emit = [&](std::size_t from, std::size_t to) {
    const std::string_view piece = text.substr(from, to - from);
    const std::string_view trimmed = text::trim(piece);
    if (trimmed.empty()) return;
    const std::size_t start = from + static_cast<std::size_t>(trimmed.data() - piece.data());
    out.push_back({std::string(trimmed), start, start + trimmed.size(), kind});
  };
  for (const std::size_t cut : cuts) {
    emit(prev, cut);
    prev = cut;
  }
  emit(prev, text.size());
  return out;
}

}  // namespace rrd::segment
