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

#include <gtest/gtest.h>

#include "rrd/text.hpp"

namespace {

using namespace rrd::text;

TEST(Sanitize, ValidUtf8IsUnchanged) {
  const std::string s = "naïve β-catenin 数据 \xF0\x9F\x98\x80";
  EXPECT_EQ(sanitize_utf8(s), s);
}

TEST(Sanitize, InvalidSequencesBecomeReplacementCharacter) {
  EXPECT_EQ(sanitize_utf8("a\xFF" "b"), "a\xEF\xBF\xBD" "b");
  // Truncated two-byte sequence at the end.
  EXPECT_EQ(sanitize_utf8("ok\xC3"), "ok\xEF\xBF\xBD");
  // Overlong encoding of '/'.
  EXPECT_EQ(sanitize_utf8("\xC0\xAF").find('/'), std::string::npos);
  // UTF-16 surrogate encoded as UTF-8.
  EXPECT_EQ(sanitize_utf8("\xED\xA0\x80").find("\xED\xA0\x80"), std::string::npos);
}

TEST(Sanitize, XmlSafeReplacesControls) {
  EXPECT_EQ(sanitize_utf8("a\x01" "b\tc\n", true), "a\xEF\xBF\xBD" "b\tc\n");
  EXPECT_EQ(sanitize_utf8("a\x01" "b", false), "a\x01" "b");
}

TEST(Whitespace, UnicodeSpaceSeparators) {
  EXPECT_EQ(space_length(" ", 0), 1u);
  EXPECT_EQ(space_length("\xC2\xA0", 0), 2u);      // no-break space
  EXPECT_EQ(space_length("\xE3\x80\x80", 0), 3u);  // ideographic space
  EXPECT_EQ(space_length("\xE2\x80\x8B", 0), 0u);  // zero width space is not \s
  EXPECT_EQ(space_length("x", 0), 0u);
}

TEST(Tokens, WhitespaceDelimitedRuns) {
  EXPECT_EQ(count_tokens(""), 0u);
  EXPECT_EQ(count_tokens("   "), 0u);
  EXPECT_EQ(count_tokens("a b  c\n\td"), 4u);
  EXPECT_EQ(count_tokens("a\xC2\xA0" "b"), 2u);
  EXPECT_FALSE(has_content(" \n "));
  EXPECT_TRUE(has_content(" x "));
}

TEST(TextBuilder, CollapsesWhitespaceAndHoldsTrailingSpace) {
  TextBuilder b;
  b.append("  hello \n ");
  b.append("world  ");
  EXPECT_EQ(b.str(), "hello world");
  EXPECT_TRUE(b.pending_space());
  EXPECT_EQ(b.pending_size(), b.size() + 1);
  b.separate();
  b.append("x");
  EXPECT_EQ(b.str(), "hello world x");
}

TEST(TextBuilder, CutRemovesSuffix) {
  TextBuilder b;
  b.append("see our site");
  const auto tail = b.cut(4);
  EXPECT_EQ(tail, "our site");
  EXPECT_EQ(b.str(), "see ");
}

}  // namespace
