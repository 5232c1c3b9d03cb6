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

// URL detection and normalization.
//
// Detection follows the pattern [A-Za-z]+://\S* (leftmost-longest,
// non-overlapping). Whitespace is the set recognised by rrd::text.
namespace rrd::url {

struct RawUrlSpan {
  std::string matched_text;
  std::size_t start = 0;  // byte offsets within the scanned text
  std::size_t end = 0;

  friend bool operator==(const RawUrlSpan&, const RawUrlSpan&) = default;
};

struct NormalizedUrl {
  std::string url;  // scheme + "://" + host + path_query
  std::string scheme;
  std::string host;
  std::string path_query;

  friend bool operator==(const NormalizedUrl&, const NormalizedUrl&) = default;
};

class InvalidUrl : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::vector<RawUrlSpan> find_urls(std::string_view text);

/// Trims trailing sentence punctuation and unbalanced closing brackets,
/// lowercases scheme and host. Throws InvalidUrl when the host is empty.
NormalizedUrl normalize_url(std::string_view raw);
inline NormalizedUrl normalize_url(const RawUrlSpan& span) {
  return normalize_url(span.matched_text);
}

/// Non-throwing variant of normalize_url.
std::optional<NormalizedUrl> try_normalize(std::string_view raw);

/// scheme + "://" + host.
std::string extract_domain(const NormalizedUrl& url);

}  // namespace rrd::url
