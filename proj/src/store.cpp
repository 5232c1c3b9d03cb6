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

#include "rrd/store.hpp"

#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace rrd::store {
namespace {

Json year_json(const std::optional<int>& year) { return year ? Json(*year) : Json(nullptr); }

std::optional<int> year_from(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<int>();
}

std::string dump_line(const Json& j) {
  return j.dump(-1, ' ', false, Json::error_handler_t::replace);
}

template <typename Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) return;
    throw StoreError("cannot read " + path.string());
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    try {
      fn(Json::parse(line));
    } catch (const StoreError& e) {
      throw StoreError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const std::exception& e) {
      throw StoreError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (in.bad()) throw StoreError("I/O error reading " + path.string());
}

void write_all(std::FILE* f, const std::string& data, const std::filesystem::path& path) {
  if (std::fwrite(data.data(), 1, data.size(), f) != data.size()) {
    throw StoreError("write failed on " + path.string() + ": " + std::strerror(errno));
  }
}

void add_year(ResourceRecord& r, const std::optional<int>& year) {
  if (!year) return;
  if (!r.first_year || *year < *r.first_year) r.first_year = year;
  if (!r.last_year || *year > *r.last_year) r.last_year = year;
}

void sort_records(std::vector<ResourceRecord>& records) {
  std::sort(records.begin(), records.end(), [](const ResourceRecord& a, const ResourceRecord& b) {
    if (a.mention_count != b.mention_count) return a.mention_count > b.mention_count;
    return a.normalized_url < b.normalized_url;
  });
}

std::string fixed(double value, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << value;
  return os.str();
}

std::string scientific(double value) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << value;
  return os.str();
}

}  // namespace

Json to_json(const ResourceMention& m) {
  return Json{{"url", m.normalized.url},         {"raw", m.raw.matched_text},
              {"domain", m.domain},              {"context", m.context},
              {"doc_id", m.doc_id},              {"source_db", to_string(m.source_db)},
              {"pub_year", year_json(m.pub_year)}};
}

ResourceMention mention_from_json(const Json& j) {
  ResourceMention m;
  auto normalized = url::try_normalize(j.at("url").get<std::string>());
  if (!normalized) throw StoreError("invalid url " + j.at("url").dump());
  m.normalized = std::move(*normalized);
  m.raw.matched_text = j.value("raw", m.normalized.url);
  m.raw.start = 0;
  m.raw.end = m.raw.matched_text.size();
  m.domain = j.value("domain", url::extract_domain(m.normalized));
  m.context = j.at("context").get<std::string>();
  m.doc_id = j.at("doc_id").get<std::string>();
  m.source_db = parse_source_db(j.at("source_db").get<std::string>());
  m.pub_year = year_from(j, "pub_year");
  return m;
}

MentionLog::MentionLog(std::filesystem::path path, bool sync) : path_(std::move(path)), sync_(sync) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  file_ = std::fopen(path_.c_str(), "ab");
  if (file_ == nullptr) {
    throw StoreError("cannot open mention log " + path_.string() + ": " + std::strerror(errno));
  }
}

MentionLog::~MentionLog() {
  if (file_ != nullptr) std::fclose(file_);
}

void MentionLog::append(std::span<const ResourceMention> batch) {
  if (batch.empty()) return;
  std::string data;
  for (const auto& m : batch) {
    data += dump_line(to_json(m));
    data += '\n';
  }
  std::lock_guard lock(mutex_);
  write_all(file_, data, path_);
  if (std::fflush(file_) != 0) throw StoreError("flush failed on " + path_.string());
  if (sync_ && ::fsync(::fileno(file_)) != 0) {
    throw StoreError("fsync failed on " + path_.string() + ": " + std::strerror(errno));
  }
}

void for_each_mention(const std::filesystem::path& path,
                      const std::function<void(ResourceMention&&)>& fn) {
  for_each_line(path, [&](const Json& j) { fn(mention_from_json(j)); });
}

std::vector<ResourceMention> read_mentions(const std::filesystem::path& path) {
  std::vector<ResourceMention> out;
  for_each_mention(path, [&](ResourceMention&& m) { out.push_back(std::move(m)); });
  return out;
}

Json to_json(const CensusEntry& c) {
  return Json{{"doc_id", c.doc_id},
              {"source_db", to_string(c.source_db)},
              {"tokens", c.tokens},
              {"nonempty", c.nonempty}};
}

CensusEntry census_from_json(const Json& j) {
  return CensusEntry{j.at("doc_id").get<std::string>(),
                     parse_source_db(j.at("source_db").get<std::string>()),
                     j.at("tokens").get<std::size_t>(), j.at("nonempty").get<bool>()};
}

void append_census(const std::filesystem::path& path, std::span<const CensusEntry> entries) {
  if (entries.empty()) return;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::FILE* f = std::fopen(path.c_str(), "ab");
  if (f == nullptr) throw StoreError("cannot open census " + path.string());
  std::string data;
  for (const auto& c : entries) {
    data += dump_line(to_json(c));
    data += '\n';
  }
  try {
    write_all(f, data, path);
  } catch (...) {
    std::fclose(f);
    throw;
  }
  if (std::fclose(f) != 0) throw StoreError("close failed on " + path.string());
}

std::vector<CensusEntry> read_census(const std::filesystem::path& path) {
  std::vector<CensusEntry> out;
  for_each_line(path, [&](const Json& j) { out.push_back(census_from_json(j)); });
  return out;
}

Json to_json(const MentionRef& m) {
  return Json{{"doc_id", m.doc_id},
              {"source_db", to_string(m.source_db)},
              {"pub_year", year_json(m.pub_year)},
              {"context", m.context}};
}

Json to_json(const ResourceRecord& r) {
  Json mentions = Json::array();
  for (const auto& m : r.mentions) mentions.push_back(to_json(m));
  return Json{{"url", r.normalized_url},
              {"domain", r.domain},
              {"mention_count", r.mention_count},
              {"first_year", year_json(r.first_year)},
              {"last_year", year_json(r.last_year)},
              {"mentions", std::move(mentions)}};
}

ResourceRecord record_from_json(const Json& j) {
  ResourceRecord r;
  r.normalized_url = j.at("url").get<std::string>();
  r.domain = j.at("domain").get<std::string>();
  for (const auto& m : j.at("mentions")) {
    r.mentions.push_back({m.at("doc_id").get<std::string>(),
                          parse_source_db(m.at("source_db").get<std::string>()),
                          year_from(m, "pub_year"), m.at("context").get<std::string>()});
  }
  r.mention_count = j.at("mention_count").get<std::size_t>();
  if (r.mention_count != r.mentions.size()) {
    throw StoreError("mention_count does not match mentions for " + r.normalized_url);
  }
  if (r.mention_count == 0) throw StoreError("record without mentions: " + r.normalized_url);
  r.first_year = year_from(j, "first_year");
  r.last_year = year_from(j, "last_year");
  return r;
}

std::vector<ResourceRecord> merge_by_url(std::span<const ResourceMention> mentions) {
  std::vector<ResourceRecord> records;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& m : mentions) {
    const auto [it, inserted] = index.try_emplace(m.normalized.url, records.size());
    if (inserted) {
      ResourceRecord r;
      r.normalized_url = m.normalized.url;
      r.domain = m.domain;
      records.push_back(std::move(r));
    }
    auto& r = records[it->second];
    r.mentions.push_back({m.doc_id, m.source_db, m.pub_year, m.context});
    ++r.mention_count;
    add_year(r, m.pub_year);
  }
  sort_records(records);
  return records;
}

std::vector<ResourceRecord> merge_by_url(const std::filesystem::path& mention_log) {
  std::vector<ResourceRecord> records;
  std::unordered_map<std::string, std::size_t> index;
  for_each_mention(mention_log, [&](ResourceMention&& m) {
    const auto [it, inserted] = index.try_emplace(m.normalized.url, records.size());
    if (inserted) {
      ResourceRecord r;
      r.normalized_url = m.normalized.url;
      r.domain = m.domain;
      records.push_back(std::move(r));
    }
    auto& r = records[it->second];
    add_year(r, m.pub_year);
    r.mentions.push_back({std::move(m.doc_id), m.source_db, m.pub_year, std::move(m.context)});
    ++r.mention_count;
  });
  sort_records(records);
  return records;
}

std::vector<ResourceRecord> merge_records(std::span<const ResourceRecord> input) {
  std::vector<ResourceRecord> records;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& in : input) {
    const auto [it, inserted] = index.try_emplace(in.normalized_url, records.size());
    if (inserted) {
      ResourceRecord r;
      r.normalized_url = in.normalized_url;
      r.domain = in.domain;
      records.push_back(std::move(r));
    }
    auto& r = records[it->second];
    for (const auto& m : in.mentions) {
      r.mentions.push_back(m);
      ++r.mention_count;
      add_year(r, m.pub_year);
    }
  }
  sort_records(records);
  return records;
}

void write_snapshot(const std::filesystem::path& path, std::span<const ResourceRecord> records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError("cannot write snapshot " + tmp.string());
    for (const auto& r : records) out << dump_line(to_json(r)) << '\n';
    out.flush();
    if (!out) throw StoreError("write failed on " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<ResourceRecord> read_snapshot(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw StoreError("snapshot not found: " + path.string());
  std::vector<ResourceRecord> out;
  for_each_line(path, [&](const Json& j) { out.push_back(record_from_json(j)); });
  return out;
}

void CorpusStats::derive_ratios() noexcept {
  const auto ratio = [](double num, double den) { return den == 0 ? 0.0 : num / den; };
  papers_with_urls_pct = 100.0 * ratio(static_cast<double>(papers_with_urls),
                                       static_cast<double>(papers_nonempty));
  mentions_per_url_paper =
      ratio(static_cast<double>(mention_count), static_cast<double>(papers_with_urls));
  mentions_per_token = ratio(static_cast<double>(mention_count), static_cast<double>(token_count));
  unique_pct = 100.0 * ratio(static_cast<double>(unique_url_count),
                             static_cast<double>(mention_count));
}

CorpusStats compute_corpus_stats(std::span<const ResourceMention> mentions, SourceDb source_db,
                                 std::span<const CensusEntry> census) {
  CorpusStats s;
  s.source_db = source_db;
  std::unordered_set<std::string_view> documents;
  for (const auto& c : census) {
    if (c.source_db != source_db) continue;
    if (!documents.insert(c.doc_id).second) continue;
    ++s.papers_total;
    if (c.nonempty) ++s.papers_nonempty;
    s.token_count += c.tokens;
  }
  std::unordered_set<std::string_view> with_urls;
  std::unordered_set<std::string_view> urls;
  for (const auto& m : mentions) {
    if (m.source_db != source_db) continue;
    if (!documents.contains(m.doc_id)) {
      throw StoreError("census/store mismatch: document " + m.doc_id + " (" +
                       std::string(to_string(source_db)) + ") has mentions but no census entry");
    }
    ++s.mention_count;
    with_urls.insert(m.doc_id);
    urls.insert(m.normalized.url);
  }
  s.papers_with_urls = with_urls.size();
  s.unique_url_count = urls.size();
  s.derive_ratios();
  return s;
}

Json to_json(const CorpusStats& s) {
  return Json{{"source_db", to_string(s.source_db)},
              {"papers_total", s.papers_total},
              {"papers_nonempty", s.papers_nonempty},
              {"papers_with_urls", s.papers_with_urls},
              {"papers_with_urls_pct", s.papers_with_urls_pct},
              {"mention_count", s.mention_count},
              {"unique_url_count", s.unique_url_count},
              {"token_count", s.token_count},
              {"mentions_per_url_paper", s.mentions_per_url_paper},
              {"mentions_per_token", s.mentions_per_token},
              {"unique_pct", s.unique_pct}};
}

std::string stats_to_csv(std::span<const CorpusStats> stats) {
  std::ostringstream os;
  os << "metric";
  for (const auto& s : stats) os << ',' << to_string(s.source_db);
  os << '\n';
  const auto row = [&](std::string_view label, auto&& cell) {
    os << label;
    for (const auto& s : stats) os << ',' << cell(s);
    os << '\n';
  };
  row("Number of Papers", [](const CorpusStats& s) { return std::to_string(s.papers_nonempty); });
  row("Number and percentage of papers mentioning resource URLs", [](const CorpusStats& s) {
    return std::to_string(s.papers_with_urls) + " (" + fixed(s.papers_with_urls_pct, 2) + "%)";
  });
  row("Number of Resources", [](const CorpusStats& s) { return std::to_string(s.mention_count); });
  row("Averaged number of resource URLs per paper",
      [](const CorpusStats& s) { return fixed(s.mentions_per_url_paper, 2); });
  row("Averaged number of resource URLs per token",
      [](const CorpusStats& s) { return scientific(s.mentions_per_token); });
  row("Number and Percentage of unique resource URLs", [](const CorpusStats& s) {
    return std::to_string(s.unique_url_count) + " (" + fixed(s.unique_pct, 2) + "%)";
  });
  row("Number of articles including empty",
      [](const CorpusStats& s) { return std::to_string(s.papers_total); });
  return os.str();
}

double compute_overlap(std::span<const ResourceRecord> a, std::span<const ResourceRecord> b) {
  std::unordered_set<std::string_view> in_a;
  for (const auto& r : a) in_a.insert(r.normalized_url);
  if (in_a.empty()) throw std::domain_error("overlap undefined: first store has no URLs");
  std::unordered_set<std::string_view> in_b;
  for (const auto& r : b) in_b.insert(r.normalized_url);
  std::size_t shared = 0;
  for (const auto& u : in_a) shared += in_b.contains(u) ? 1 : 0;
  return 100.0 * static_cast<double>(shared) / static_cast<double>(in_a.size());
}

std::vector<ResourceRecord> filter_source(std::span<const ResourceRecord> records, SourceDb db) {
  std::vector<ResourceRecord> out;
  for (const auto& r : records) {
    ResourceRecord f;
    f.normalized_url = r.normalized_url;
    f.domain = r.domain;
    for (const auto& m : r.mentions) {
      if (m.source_db != db) continue;
      f.mentions.push_back(m);
      add_year(f, m.pub_year);
    }
    f.mention_count = f.mentions.size();
    if (f.mention_count > 0) out.push_back(std::move(f));
  }
  sort_records(out);
  return out;
}

}  // namespace rrd::store
