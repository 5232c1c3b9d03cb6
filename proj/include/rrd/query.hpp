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
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "rrd/liveness.hpp"
#include "rrd/store.hpp"

// In-memory search index over a merged snapshot.
//
// Term model: context words are maximal runs of ASCII alphanumerics or
// non-ASCII non-space characters, lowercased, at least two bytes long. Each
// resource is also indexed under "url:<lowercased url>" and "host:<host>".
// Queries are conjunctive: every query term must be present.
namespace rrd::query {

using Json = nlohmann::ordered_json;

enum class SortOrder { MentionCount, LatestMention, Relevance };

std::string_view to_string(SortOrder s) noexcept;

/// Facet value describing which databases mention a resource.
enum class SourceFacet { PubMed, PMC, Both };
std::string_view to_string(SourceFacet s) noexcept;

struct QuerySpec {
  std::string q;
  std::optional<std::string> domain;
  std::optional<std::string> source;  // pubmed | pmc | both
  std::optional<std::string> scheme;
  std::optional<int> year_from;
  std::optional<int> year_to;
  std::optional<SortOrder> sort;  // default: relevance with q, mention count without
  std::size_t page = 1;
  std::size_t page_size = 20;
};

/// Invalid request parameter; `field` names the parameter.
class QueryError : public std::invalid_argument {
 public:
  QueryError(std::string field, const std::string& message)
      : std::invalid_argument(message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

using Params = std::multimap<std::string, std::string>;

/// Parses and validates HTTP query parameters. Throws QueryError.
QuerySpec parse_query(const Params& params);
void validate(const QuerySpec& spec);

/// Lowercased word terms of `text`, in order, with repeats.
std::vector<std::string> word_terms(std::string_view text);
/// Index terms for a query string, deduplicated, in first-seen order.
std::vector<std::string> query_terms(std::string_view q);

struct ResourceEntry {
  std::size_t id = 0;  // 1-based snapshot position
  store::ResourceRecord record;
  std::string scheme;
  std::string host;
  SourceFacet source = SourceFacet::PubMed;
  std::optional<liveness::LivenessReport> liveness;
};

struct SearchHit {
  std::size_t id = 0;
  double score = 0;
};

struct SearchPage {
  std::size_t total = 0;
  std::size_t page = 1;
  std::size_t page_size = 20;
  SortOrder sort = SortOrder::MentionCount;
  std::vector<SearchHit> hits;
};

struct DomainCount {
  std::string domain;
  std::size_t mention_count = 0;
  std::size_t resource_count = 0;
};

class SearchIndex {
 public:
  SearchIndex() = default;
  /// Records keep their order; ids are 1-based positions. Liveness reports
  /// are joined on the normalized URL; the last report for a URL wins.
  static SearchIndex build(std::vector<store::ResourceRecord> records,
                           std::span<const liveness::LivenessReport> liveness = {});

  SearchPage search(const QuerySpec& spec) const;
  const ResourceEntry* find(std::size_t id) const noexcept;
  std::span<const ResourceEntry> resources() const noexcept { return resources_; }
  std::size_t size() const noexcept { return resources_.size(); }

  /// dimension ("domain", "source", "scheme") -> value -> resource count.
  const std::map<std::string, std::map<std::string, std::size_t>>& facets() const noexcept {
    return facets_;
  }
  /// Descending mention count, ties by domain.
  std::vector<DomainCount> top_domains(std::size_t limit) const;

  /// Number of postings for `term`, for tests and diagnostics.
  std::size_t posting_count(const std::string& term) const;

 private:
  struct Posting {
    std::size_t id;
    std::size_t tf;
  };
  bool passes_filters(const ResourceEntry& e, const QuerySpec& spec) const;

  std::vector<ResourceEntry> resources_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::map<std::string, std::map<std::string, std::size_t>> facets_;
};

Json error_json(std::string_view field, std::string_view message);
Json search_json(const SearchIndex& index, const SearchPage& page);
/// Full record, per-year mention counts, latest year and liveness (omitted
/// when unknown). The "mentions" array serializes exactly like the snapshot.
Json resource_json(const ResourceEntry& entry);
Json stats_json(const SearchIndex& index);
Json top_domains_json(const SearchIndex& index, std::size_t limit);

}  // namespace rrd::query
