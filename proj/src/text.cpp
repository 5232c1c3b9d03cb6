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

#include "rrd/text.hpp"

#include <cstdint>

namespace rrd::text {
namespace {

constexpr std::string_view kReplacement = "\xEF\xBF\xBD";

// Length of the valid UTF-8 sequence at `i`, or 0 if invalid.
std::size_t valid_sequence_length(std::string_view s, std::size_t i) noexcept {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return 1;
  std::size_t len = 0;
  std::uint32_t cp = 0;
  if (b0 >= 0xC2 && b0 <= 0xDF) {
    len = 2;
    cp = b0 & 0x1F;
  } else if (b0 >= 0xE0 && b0 <= 0xEF) {
    len = 3;
    cp = b0 & 0x0F;
  } else if (b0 >= 0xF0 && b0 <= 0xF4) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  if (len == 3 && (cp < 0x800 || (cp >= 0xD800 && cp <= 0xDFFF))) return 0;
  if (len == 4 && (cp < 0x10000 || cp > 0x10FFFF)) return 0;
  return len;
}

}  // namespace

std::string sanitize_utf8(std::string_view in, bool xml_safe) {
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    const std::size_t len = valid_sequence_length(in, i);
    if (len == 0) {
      out += kReplacement;
      ++i;
      continue;
    }
    if (len == 1 && xml_safe) {
      const auto c = static_cast<unsigned char>(in[i]);
      if (c < 0x20 && c != '\t' && c != '\n' && c != '\r') {
        out += kReplacement;
        ++i;
        continue;
      }
    }
    out.append(in.substr(i, len));
    i += len;
  }
  return out;
}

std::size_t space_length(std::string_view s, std::size_t pos) noexcept {
  if (pos >= s.size()) return 0;
  const auto b0 = static_cast<unsigned char>(s[pos]);
  switch (b0) {
    case ' ':
    case '\t':
    case '\n':
    case '\v':
    case '\f':
    case '\r':
      return 1;
    default:
      break;
  }
  if (b0 < 0xC2) return 0;
  const auto at = [&](std::size_t k) -> unsigned {
    return pos + k < s.size() ? static_cast<unsigned char>(s[pos + k]) : 0u;
  };
  if (b0 == 0xC2) {
    return (at(1) == 0x85 || at(1) == 0xA0) ? 2 : 0;
  }
  if (b0 == 0xE1) {
    return (at(1) == 0x9A && at(2) == 0x80) ? 3 : 0;  // U+1680
  }
  if (b0 == 0xE2 && at(1) == 0x80) {
    const unsigned b2 = at(2);
    if ((b2 >= 0x80 && b2 <= 0x8A) || b2 == 0xA8 || b2 == 0xA9 || b2 == 0xAF) {
      return 3;
    }
    return 0;
  }
  if (b0 == 0xE2 && at(1) == 0x81 && at(2) == 0x9F) return 3;  // U+205F
  if (b0 == 0xE3 && at(1) == 0x80 && at(2) == 0x80) return 3;  // U+3000
  return 0;
}

std::size_t count_tokens(std::string_view s) noexcept {
  std::size_t tokens = 0;
  bool in_token = false;
  std::size_t i = 0;
  while (i < s.size()) {
    const std::size_t sp = space_length(s, i);
    if (sp) {
      in_token = false;
      i += sp;
    } else {
      if (!in_token) ++tokens;
      in_token = true;
      ++i;
    }
  }
  return tokens;
}

bool has_content(std::string_view s) noexcept {
  std::size_t i = 0;
  while (i < s.size()) {
    const std::size_t sp = space_length(s, i);
    if (!sp) return true;
    i += sp;
  }
  return false;
}

std::string_view trim(std::string_view s) noexcept {
  std::size_t begin = 0;
  while (begin < s.size()) {
    const std::size_t sp = space_length(s, begin);
    if (!sp) break;
    begin += sp;
  }
  std::size_t end = begin;
  std::size_t i = begin;
  while (i < s.size()) {
    const std::size_t sp = space_length(s, i);
    if (sp) {
      i += sp;
    } else {
      ++i;
      end = i;
    }
  }
  return s.substr(begin, end - begin);
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (is_ascii_upper(c)) c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

void TextBuilder::append(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const std::size_t sp = space_length(s, i);
    if (sp) {
      pending_space_ = !text_.empty();
      i += sp;
      continue;
    }
    if (pending_space_) {
      text_ += ' ';
      pending_space_ = false;
    }
    text_ += s[i];
    ++i;
  }
}

void TextBuilder::flush_space() {
  if (pending_space_) {
    text_ += ' ';
    pending_space_ = false;
  }
}

std::string TextBuilder::cut(std::size_t pos) {
  if (pos >= text_.size()) return {};
  std::string tail = text_.substr(pos);
  text_.resize(pos);
  pending_space_ = false;
  return tail;
}

}  // namespace rrd::text
