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
#include <string>
#include <string_view>

// UTF-8 helpers shared by the ingest, segmentation and extraction stages.
// All offsets are byte offsets into UTF-8 strings.
namespace rrd::text {

/// Replaces every invalid UTF-8 sequence with U+FFFD. When `xml_safe` is set,
/// C0 control characters other than tab, LF and CR are replaced as well, since
/// they cannot appear in XML 1.0 documents.
std::string sanitize_utf8(std::string_view in, bool xml_safe = false);

/// Byte length of the whitespace code point starting at `pos`, or 0.
/// Whitespace is ASCII space/tab/LF/VT/FF/CR plus the Unicode space separators
/// (U+0085, U+00A0, U+1680, U+2000..U+200A, U+2028, U+2029, U+202F, U+205F,
/// U+3000).
std::size_t space_length(std::string_view s, std::size_t pos) noexcept;

inline bool is_space_at(std::string_view s, std::size_t pos) noexcept {
  return space_length(s, pos) != 0;
}

/// Number of maximal non-whitespace runs.
std::size_t count_tokens(std::string_view s) noexcept;

/// True when `s` holds at least one non-whitespace character.
bool has_content(std::string_view s) noexcept;

std::string_view trim(std::string_view s) noexcept;

std::string to_lower_ascii(std::string_view s);

inline bool is_ascii_alpha(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline bool is_ascii_upper(char c) noexcept { return c >= 'A' && c <= 'Z'; }

inline bool is_ascii_digit(char c) noexcept { return c >= '0' && c <= '9'; }

/// Appends text while collapsing whitespace runs to one ASCII space and
/// dropping leading whitespace. Trailing whitespace is held back until more
/// content arrives, so `str()` never ends with a space.
class TextBuilder {
 public:
  void append(std::string_view s);
  /// Requests a word break before the next appended content.
  void separate() noexcept { pending_space_ = !text_.empty(); }
  /// Emits a pending break now.
  void flush_space();
  /// Length the text will have once pending content is flushed.
  std::size_t size() const noexcept { return text_.size(); }
  std::size_t pending_size() const noexcept {
    return text_.size() + (pending_space_ ? 1 : 0);
  }
  bool pending_space() const noexcept { return pending_space_; }
  const std::string& str() const noexcept { return text_; }
  /// Removes everything from `pos` on and returns it.
  std::string cut(std::size_t pos);
  void clear() noexcept {
    text_.clear();
    pending_space_ = false;
  }

 private:
  std::string text_;
  bool pending_space_ = false;
};

}  // namespace rrd::text
