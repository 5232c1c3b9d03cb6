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

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "rrd/query.hpp"
#include "rrd/store.hpp"

namespace httplib {
class Server;
}

namespace rrd::testing {

/// Self-deleting scratch directory.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);
void write_gz(const std::filesystem::path& path, std::string_view content);
std::string xml_escape(std::string_view s);

/// Resident set size and its high-water mark, in KiB.
std::size_t rss_kib();
std::size_t peak_rss_kib();

// ---- Reference URL scanning, written independently of the library. ----

/// Matches of [A-Za-z]+://\S* (std::regex), in order.
std::vector<std::string> oracle_find_urls(const std::string& text);
/// Trailing punctuation / unbalanced bracket trimming plus scheme and host
/// lowercasing; nullopt when the host is empty.
std::optional<std::string> oracle_normalize(const std::string& raw);

// ---- Synthetic corpora. ----

struct SynthDoc {
  std::string doc_id;
  bool pmc = true;
  std::optional<int> year;
  std::string xml;                      // one record element
  std::vector<std::string> flat_texts;  // expected text of every block
};

struct SynthOptions {
  double url_rate = 0.3;       // chance that a sentence carries a URL
  double link_rate = 0.3;      // chance that a URL is written as a link element
  double footnote_rate = 0.2;  // chance of a footnote with a URL
  double invalid_rate = 0.05;  // chance of an empty-host URL
  std::size_t paragraphs = 3;
  std::size_t sentences = 4;
  std::size_t url_pool = 200;  // distinct URLs drawn from; small values repeat URLs
};

class CorpusGenerator {
 public:
  explicit CorpusGenerator(std::uint64_t seed, SynthOptions options = {});

  SynthDoc jats(std::size_t n);
  SynthDoc medline(std::size_t n);
  std::string random_url();
  std::string sentence(std::vector<std::string>* planted = nullptr);

  std::mt19937_64& rng() { return rng_; }

 private:
  std::string word();
  std::string pooled_url();
  // Appends prose with optional URL; returns (xml, flat).
  std::pair<std::string, std::string> prose(bool allow_links);

  std::mt19937_64 rng_;
  SynthOptions options_;
  std::vector<std::string> pool_;
};

std::string jats_archive(const std::vector<SynthDoc>& docs);
std::string medline_archive(const std::vector<SynthDoc>& docs);

/// Brute-force expectation: doc_id -> sorted normalized URLs.
std::map<std::string, std::vector<std::string>> oracle_mentions(const std::vector<SynthDoc>& docs);

/// n draws from the discrete power law P(x) proportional to x^-alpha, x >= x_min,
/// by inverse-CDF lookup over an explicit table with an integral tail.
std::vector<std::size_t> sample_power_law(std::mt19937_64& rng, double alpha, std::size_t x_min,
                                          std::size_t n);

/// Compares extracted mentions with oracle_mentions(docs): per-document URL
/// multisets, total count and distinct URLs. Empty when they agree, else a
/// description of the first difference.
std::string diff_against_oracle(const std::vector<rrd::extract::ResourceMention>& mentions,
                                const std::vector<SynthDoc>& docs);

// ---- Search fixtures. ----

/// Merged snapshot of `n` random resources with short prose contexts drawn
/// from a small vocabulary (ASCII and accented words).
std::vector<rrd::store::ResourceRecord> random_snapshot(std::mt19937_64& rng, std::size_t n);
const std::vector<std::string>& snapshot_vocabulary();

/// Random query over a snapshot: words, host:/url: terms, filters and sort.
rrd::query::QuerySpec random_query(std::mt19937_64& rng,
                                   const std::vector<rrd::store::ResourceRecord>& records);

/// Linear-scan reference search returning every matching id (1-based) in
/// result order. Assumes contexts carry no non-ASCII whitespace.
std::vector<std::size_t> oracle_search(const std::vector<rrd::store::ResourceRecord>& records,
                                       const rrd::query::QuerySpec& spec);

/// Collects every id by walking the pages of `spec`.
std::vector<std::size_t> all_pages(const rrd::query::SearchIndex& index,
                                   rrd::query::QuerySpec spec);

// ---- Local HTTP fixture. ----

/// httplib server on 127.0.0.1 with an ephemeral port and a large worker
/// pool, running on a background thread.
class FixtureServer {
 public:
  FixtureServer();
  ~FixtureServer();

  httplib::Server& server() { return *server_; }
  void start();
  int port() const { return port_; }
  std::string url(std::string_view path) const;

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

/// Listening socket that never accepts; connections hang after the handshake.
class BlackHole {
 public:
  BlackHole();
  ~BlackHole();
  int port() const { return port_; }

 private:
  int fd_ = -1;
  int port_ = 0;
};

}  // namespace rrd::testing
