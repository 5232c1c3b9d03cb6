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
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rrd/document.hpp"
#include "rrd/extract.hpp"

// Mention log, merged resource snapshot and the corpus statistics computed
// over them.
namespace rrd::store {

using Json = nlohmann::ordered_json;
using extract::ResourceMention;

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json to_json(const ResourceMention& m);
/// Throws StoreError on missing fields or an invalid url.
ResourceMention mention_from_json(const Json& j);

/// Append-only JSONL mention log. Appends are serialized by an internal mutex
/// (single-writer contract); every batch is flushed and fsync'ed.
class MentionLog {
 public:
  explicit MentionLog(std::filesystem::path path, bool sync = true);
  ~MentionLog();
  MentionLog(const MentionLog&) = delete;
  MentionLog& operator=(const MentionLog&) = delete;

  void append(std::span<const ResourceMention> batch);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  bool sync_;
  std::FILE* file_ = nullptr;
  std::mutex mutex_;
};

/// Streams mentions from a log file in order. Throws StoreError with the line
/// number on malformed lines. A missing file reads as empty.
void for_each_mention(const std::filesystem::path& path,
                      const std::function<void(ResourceMention&&)>& fn);
std::vector<ResourceMention> read_mentions(const std::filesystem::path& path);

/// One document's token and emptiness counts, written during ingestion.
struct CensusEntry {
  std::string doc_id;
  SourceDb source_db = SourceDb::PubMed;
  std::size_t tokens = 0;
  bool nonempty = false;

  friend bool operator==(const CensusEntry&, const CensusEntry&) = default;
};

Json to_json(const CensusEntry& c);
CensusEntry census_from_json(const Json& j);
void append_census(const std::filesystem::path& path, std::span<const CensusEntry> entries);
std::vector<CensusEntry> read_census(const std::filesystem::path& path);

struct MentionRef {
  std::string doc_id;
  SourceDb source_db = SourceDb::PubMed;
  std::optional<int> pub_year;
  std::string context;

  friend bool operator==(const MentionRef&, const MentionRef&) = default;
};

struct ResourceRecord {
  std::string normalized_url;
  std::string domain;
  std::size_t mention_count = 0;
  std::vector<MentionRef> mentions;
  std::optional<int> first_year;
  std::optional<int> last_year;

  friend bool operator==(const ResourceRecord&, const ResourceRecord&) = default;
};

Json to_json(const MentionRef& m);
Json to_json(const ResourceRecord& r);
ResourceRecord record_from_json(const Json& j);

/// One record per distinct normalized URL, ordered by descending mention
/// count then URL. Mentions keep their input order.
std::vector<ResourceRecord> merge_by_url(std::span<const ResourceMention> mentions);
std::vector<ResourceRecord> merge_by_url(const std::filesystem::path& mention_log);
/// Re-merges records (e.g. snapshots from several runs). Merging an already
/// merged list returns it unchanged.
std::vector<ResourceRecord> merge_records(std::span<const ResourceRecord> records);

void write_snapshot(const std::filesystem::path& path, std::span<const ResourceRecord> records);
/// Throws StoreError naming the line on malformed input.
std::vector<ResourceRecord> read_snapshot(const std::filesystem::path& path);

struct CorpusStats {
  SourceDb source_db = SourceDb::PubMed;
  std::size_t papers_total = 0;
  std::size_t papers_nonempty = 0;
  std::size_t papers_with_urls = 0;
  std::size_t mention_count = 0;
  std::size_t unique_url_count = 0;
  std::size_t token_count = 0;
  double papers_with_urls_pct = 0;  // 100 * papers_with_urls / papers_nonempty
  double mentions_per_url_paper = 0;
  double mentions_per_token = 0;
  double unique_pct = 0;

  /// Fills the ratio fields from the integer fields. Zero divisors give 0.
  void derive_ratios() noexcept;
};

/// Statistics for one source database. `census` must list every ingested
/// document of that database; a mention from a document missing from the
/// census is a StoreError.
CorpusStats compute_corpus_stats(std::span<const ResourceMention> mentions, SourceDb source_db,
                                 std::span<const CensusEntry> census);

Json to_json(const CorpusStats& s);
/// CSV with one column per source and one row per reported metric.
std::string stats_to_csv(std::span<const CorpusStats> stats);

/// Percentage of A's unique URLs that also occur in B. Throws
/// std::domain_error when A is empty.
double compute_overlap(std::span<const ResourceRecord> a, std::span<const ResourceRecord> b);

/// Records that have at least one mention from `db`, mentions filtered to it.
std::vector<ResourceRecord> filter_source(std::span<const ResourceRecord> records, SourceDb db);

}  // namespace rrd::store
