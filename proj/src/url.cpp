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

#include "rrd/url.hpp"

#include <algorithm>

#include "rrd/text.hpp"

namespace rrd::url {

std::vector<RawUrlSpan> find_urls(std::string_view text) {
  std::vector<RawUrlSpan> spans;
  std::size_t from = 0;
  while (from < text.size()) {
    const std::size_t sep = text.find("://", from);
    if (sep == std::string_view::npos) break;
    std::size_t start = sep;
    while (start > from && text::is_ascii_alpha(text[start - 1])) --start;
    if (start == sep) {
      // No scheme letters; a later "://" may still start a match.
      from = sep + 1;
      continue;
    }
    std::size_t end = sep + 3;
    while (end < text.size() && !text::is_space_at(text, end)) ++end;
    spans.push_back({std::string(text.substr(start, end - start)), start, end});
    from = end;
  }
  return spans;
}

namespace {

bool is_trailing_punct(char c) {
  switch (c) {
    case '.':
    case ',':
    case ';':
    case ':':
    case '!':
    case '?':
    case '\'':
    case '"':
      return true;
    default:
      return false;
  }
}

char opener_for(char closer) {
  switch (closer) {
    case ')':
      return '(';
    case ']':
      return '[';
    case '}':
      return '{';
    default:
      return 0;
  }
}

}  // namespace

std::optional<NormalizedUrl> try_normalize(std::string_view raw) {
  raw = text::trim(raw);
  const std::size_t sep = raw.find("://");
  if (sep == std::string_view::npos || sep == 0) return std::nullopt;

  std::size_t len = raw.size();
  for (bool changed = true; changed && len > sep + 3;) {
    changed = false;
    const char last = raw[len - 1];
    if (is_trailing_punct(last)) {
      --len;
      changed = true;
    } else if (const char open = opener_for(last)) {
      const auto body = raw.substr(0, len);
      if (std::count(body.begin(), body.end(), last) > std::count(body.begin(), body.end(), open)) {
        --len;
        changed = true;
      }
    }
  }
  const std::string_view trimmed = raw.substr(0, len);
  const std::string_view rest = trimmed.substr(sep + 3);
  const std::size_t host_end = std::min(rest.find_first_of("/?#"), rest.size());
  if (host_end == 0) return std::nullopt;

  NormalizedUrl out;
  out.scheme = text::to_lower_ascii(trimmed.substr(0, sep));
  out.host = text::to_lower_ascii(rest.substr(0, host_end));
  out.path_query = std::string(rest.substr(host_end));
  out.url = out.scheme + "://" + out.host + out.path_query;
  return out;
}

NormalizedUrl normalize_url(std::string_view raw) {
  auto normalized = try_normalize(raw);
  if (!normalized) throw InvalidUrl("invalid URL (empty host): " + std::string(raw));
  return std::move(*normalized);
}

std::string extract_domain(const NormalizedUrl& url) { return url.scheme + "://" + url.host; }

}  // namespace rrd::url
