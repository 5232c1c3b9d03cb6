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

#include "rrd/query.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_set>

#include "rrd/popularity.hpp"
#include "rrd/text.hpp"
#include "rrd/url.hpp"

namespace rrd::query {
namespace {

constexpr std::size_t kMaxPageSize = 200;
constexpr std::size_t kSnippetBytes = 240;

std::optional<std::string_view> single(const Params& params, const std::string& key) {
  const auto [lo, hi] = params.equal_range(key);
  if (lo == hi) return std::nullopt;
  if (std::next(lo) != hi) throw QueryError(key, "parameter given more than once");
  return std::string_view(lo->second);
}

template <typename Int>
Int parse_number(const std::string& field, std::string_view value) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw QueryError(field, "expected an integer, got '" + std::string(value) + "'");
  }
  return out;
}

bool is_word_byte(std::string_view s, std::size_t i) {
  const auto c = static_cast<unsigned char>(s[i]);
  if (c >= 0x80) return text::space_length(s, i) == 0;
  return std::isalnum(c) != 0;
}

Json year_json(const std::optional<int>& y) { return y ? Json(*y) : Json(nullptr); }

// Cuts at a UTF-8 boundary at or before `limit` bytes.
std::string snippet(std::string_view s) {
  if (s.size() <= kSnippetBytes) return std::string(s);
  std::size_t cut = kSnippetBytes;
  while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;
  return std::string(s.substr(0, cut)) + "\xE2\x80\xA6";
}

Json liveness_json(const liveness::LivenessReport& r) {
  Json j = liveness::to_json(r);
  j.erase("url");
  return j;
}

}  // namespace

std::string_view to_string(SortOrder s) noexcept {
  switch (s) {
    case SortOrder::MentionCount:
      return "mention_count";
    case SortOrder::LatestMention:
      return "latest";
    case SortOrder::Relevance:
      break;
  }
  return "relevance";
}

std::string_view to_string(SourceFacet s) noexcept {
  switch (s) {
    case SourceFacet::PubMed:
      return "pubmed";
    case SourceFacet::PMC:
      return "pmc";
    case SourceFacet::Both:
      break;
  }
  return "both";
}

QuerySpec parse_query(const Params& params) {
  static const std::unordered_set<std::string> known = {
      "q", "domain", "source", "scheme", "year_from", "year_to", "sort", "page", "page_size"};
  for (const auto& [key, value] : params) {
    if (!known.contains(key)) throw QueryError(key, "unknown parameter");
  }
  QuerySpec spec;
  if (auto v = single(params, "q")) spec.q = std::string(*v);
  if (auto v = single(params, "domain"); v && !v->empty()) spec.domain = text::to_lower_ascii(*v);
  if (auto v = single(params, "source"); v && !v->empty()) spec.source = text::to_lower_ascii(*v);
  if (auto v = single(params, "scheme"); v && !v->empty()) spec.scheme = text::to_lower_ascii(*v);
  if (auto v = single(params, "year_from"); v && !v->empty()) {
    spec.year_from = parse_number<int>("year_from", *v);
  }
  if (auto v = single(params, "year_to"); v && !v->empty()) {
    spec.year_to = parse_number<int>("year_to", *v);
  }
  if (auto v = single(params, "sort"); v && !v->empty()) {
    if (*v == "mention_count") {
      spec.sort = SortOrder::MentionCount;
    } else if (*v == "latest") {
      spec.sort = SortOrder::LatestMention;
    } else if (*v == "relevance") {
      spec.sort = SortOrder::Relevance;
    } else {
      throw QueryError("sort", "expected one of mention_count, latest, relevance");
    }
  }
  if (auto v = single(params, "page"); v && !v->empty()) {
    spec.page = parse_number<std::size_t>("page", *v);
  }
  if (auto v = single(params, "page_size"); v && !v->empty()) {
    spec.page_size = parse_number<std::size_t>("page_size", *v);
  }
  validate(spec);
  return spec;
}

void validate(const QuerySpec& spec) {
  if (spec.page < 1) throw QueryError("page", "page must be >= 1");
  if (spec.page_size < 1 || spec.page_size > kMaxPageSize) {
    throw QueryError("page_size", "page_size must be between 1 and 200");
  }
  if (spec.source && *spec.source != "pubmed" && *spec.source != "pmc" && *spec.source != "both") {
    throw QueryError("source", "expected one of pubmed, pmc, both");
  }
  if (spec.year_from && spec.year_to && *spec.year_from > *spec.year_to) {
    throw QueryError("year_from", "year_from is after year_to");
  }
}

std::vector<std::string> word_terms(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_byte(text, i)) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < text.size() && is_word_byte(text, i)) ++i;
    if (i - start >= 2) out.push_back(text::to_lower_ascii(text.substr(start, i - start)));
  }
  return out;
}

std::vector<std::string> query_terms(std::string_view q) {
  std::vector<std::string> terms;
  const auto add = [&](std::string term) {
    if (std::find(terms.begin(), terms.end(), term) == terms.end()) terms.push_back(std::move(term));
  };
  std::size_t i = 0;
  while (i < q.size()) {
    if (const std::size_t sp = text::space_length(q, i)) {
      i += sp;
      continue;
    }
    const std::size_t start = i;
    while (i < q.size() && !text::is_space_at(q, i)) ++i;
    const std::string_view token = q.substr(start, i - start);
    if (token.starts_with("host:") && token.size() > 5) {
      add("host:" + text::to_lower_ascii(token.substr(5)));
    } else if (token.starts_with("url:") || token.find("://") != std::string_view::npos) {
      const auto raw = token.starts_with("url:") ? token.substr(4) : token;
      const auto normalized = url::try_normalize(raw);
      add("url:" + text::to_lower_ascii(normalized ? normalized->url : std::string(raw)));
    } else {
      for (auto& w : word_terms(token)) add(std::move(w));
    }
  }
  return terms;
}

SearchIndex SearchIndex::build(std::vector<store::ResourceRecord> records,
                               std::span<const liveness::LivenessReport> liveness) {
  std::unordered_map<std::string, const liveness::LivenessReport*> reports;
  for (const auto& r : liveness) reports[r.url] = &r;

  SearchIndex index;
  index.resources_.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    ResourceEntry e;
    e.id = i + 1;
    e.record = std::move(records[i]);
    if (const auto n = url::try_normalize(e.record.normalized_url)) {
      e.scheme = n->scheme;
      e.host = n->host;
    }
    bool pubmed = false;
    bool pmc = false;
    for (const auto& m : e.record.mentions) {
      (m.source_db == SourceDb::PubMed ? pubmed : pmc) = true;
    }
    e.source = pubmed && pmc ? SourceFacet::Both : (pubmed ? SourceFacet::PubMed : SourceFacet::PMC);
    if (const auto it = reports.find(e.record.normalized_url); it != reports.end()) {
      e.liveness = *it->second;
    }

    std::map<std::string, std::size_t> tf;
    for (const auto& m : e.record.mentions) {
      for (auto& w : word_terms(m.context)) ++tf[std::move(w)];
    }
    tf["url:" + text::to_lower_ascii(e.record.normalized_url)] = 1;
    if (!e.host.empty()) tf["host:" + e.host] = 1;
    for (auto& [term, count] : tf) index.postings_[term].push_back({e.id, count});

    index.facets_["domain"][e.record.domain]++;
    index.facets_["source"][std::string(to_string(e.source))]++;
    index.facets_["scheme"][e.scheme]++;
    index.resources_.push_back(std::move(e));
  }
  return index;
}

const ResourceEntry* SearchIndex::find(std::size_t id) const noexcept {
  if (id == 0 || id > resources_.size()) return nullptr;
  return &resources_[id - 1];
}

std::size_t SearchIndex::posting_count(const std::string& term) const {
  const auto it = postings_.find(term);
  return it == postings_.end() ? 0 : it->second.size();
}

bool SearchIndex::passes_filters(const ResourceEntry& e, const QuerySpec& spec) const {
  if (spec.domain && e.record.domain != *spec.domain) return false;
  if (spec.source && to_string(e.source) != *spec.source) return false;
  if (spec.scheme && e.scheme != *spec.scheme) return false;
  if (spec.year_from || spec.year_to) {
    const bool any = std::any_of(e.record.mentions.begin(), e.record.mentions.end(),
                                 [&](const store::MentionRef& m) {
                                   if (!m.pub_year) return false;
                                   if (spec.year_from && *m.pub_year < *spec.year_from) return false;
                                   if (spec.year_to && *m.pub_year > *spec.year_to) return false;
                                   return true;
                                 });
    if (!any) return false;
  }
  return true;
}

SearchPage SearchIndex::search(const QuerySpec& spec) const {
  validate(spec);
  const auto terms = query_terms(spec.q);
  SearchPage page;
  page.page = spec.page;
  page.page_size = spec.page_size;
  page.sort = spec.sort.value_or(terms.empty() ? SortOrder::MentionCount : SortOrder::Relevance);

  std::vector<SearchHit> hits;
  if (terms.empty()) {
    for (const auto& e : resources_) {
      if (passes_filters(e, spec)) hits.push_back({e.id, 0.0});
    }
  } else {
    std::vector<const std::vector<Posting>*> lists;
    for (const auto& t : terms) {
      const auto it = postings_.find(t);
      if (it == postings_.end()) {
        lists.clear();
        break;
      }
      lists.push_back(&it->second);
    }
    if (lists.size() == terms.size()) {
      std::sort(lists.begin(), lists.end(),
                [](const auto* a, const auto* b) { return a->size() < b->size(); });
      // Postings are in ascending id order, so each list is binary-searchable.
      for (const Posting& p : *lists.front()) {
        double score = static_cast<double>(p.tf);
        bool all = true;
        for (std::size_t k = 1; k < lists.size() && all; ++k) {
          const auto& list = *lists[k];
          const auto it = std::lower_bound(list.begin(), list.end(), p.id,
                                           [](const Posting& q, std::size_t id) { return q.id < id; });
          if (it == list.end() || it->id != p.id) {
            all = false;
          } else {
            score += static_cast<double>(it->tf);
          }
        }
        if (all && passes_filters(resources_[p.id - 1], spec)) hits.push_back({p.id, score});
      }
    }
  }

  const auto& res = resources_;
  const auto count_of = [&](std::size_t id) { return res[id - 1].record.mention_count; };
  switch (page.sort) {
    case SortOrder::MentionCount:
      std::sort(hits.begin(), hits.end(), [&](const SearchHit& a, const SearchHit& b) {
        if (count_of(a.id) != count_of(b.id)) return count_of(a.id) > count_of(b.id);
        return a.id < b.id;
      });
      break;
    case SortOrder::LatestMention:
      std::sort(hits.begin(), hits.end(), [&](const SearchHit& a, const SearchHit& b) {
        const auto ya = res[a.id - 1].record.last_year;
        const auto yb = res[b.id - 1].record.last_year;
        if (ya != yb) {
          if (!ya) return false;
          if (!yb) return true;
          return *ya > *yb;
        }
        return a.id < b.id;
      });
      break;
    case SortOrder::Relevance:
      std::sort(hits.begin(), hits.end(), [&](const SearchHit& a, const SearchHit& b) {
        if (a.score != b.score) return a.score > b.score;
        if (count_of(a.id) != count_of(b.id)) return count_of(a.id) > count_of(b.id);
        return a.id < b.id;
      });
      break;
  }

  page.total = hits.size();
  const std::size_t begin = (spec.page - 1) * spec.page_size;
  if (begin < hits.size()) {
    const std::size_t end = std::min(hits.size(), begin + spec.page_size);
    page.hits.assign(hits.begin() + static_cast<std::ptrdiff_t>(begin),
                     hits.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return page;
}

std::vector<DomainCount> SearchIndex::top_domains(std::size_t limit) const {
  std::map<std::string, std::size_t> resource_counts;
  std::map<std::string, std::size_t> by_domain;
  for (const auto& e : resources_) {
    by_domain[e.record.domain] += e.record.mention_count;
    ++resource_counts[e.record.domain];
  }
  const auto dist = popularity::make_distribution(
      popularity::FreqKind::Domain,
      std::vector<std::pair<std::string, std::size_t>>(by_domain.begin(), by_domain.end()));
  std::vector<DomainCount> out;
  for (const auto& entry : dist.entries) {
    if (out.size() >= limit) break;
    out.push_back({entry.key, entry.count, resource_counts[entry.key]});
  }
  return out;
}

Json error_json(std::string_view field, std::string_view message) {
  return Json{{"error", Json{{"field", field}, {"message", message}}}};
}

Json search_json(const SearchIndex& index, const SearchPage& page) {
  Json results = Json::array();
  for (const auto& hit : page.hits) {
    const ResourceEntry* e = index.find(hit.id);
    if (e == nullptr) continue;
    Json r{{"id", e->id},
           {"url", e->record.normalized_url},
           {"domain", e->record.domain},
           {"scheme", e->scheme},
           {"source", to_string(e->source)},
           {"mention_count", e->record.mention_count},
           {"first_year", year_json(e->record.first_year)},
           {"last_year", year_json(e->record.last_year)},
           {"score", hit.score},
           {"snippet", e->record.mentions.empty() ? std::string()
                                                  : snippet(e->record.mentions.front().context)}};
    if (e->liveness) r["liveness"] = liveness_json(*e->liveness);
    results.push_back(std::move(r));
  }
  return Json{{"total", page.total},
              {"page", page.page},
              {"page_size", page.page_size},
              {"sort", to_string(page.sort)},
              {"results", std::move(results)}};
}

Json resource_json(const ResourceEntry& e) {
  std::map<int, std::size_t> per_year;
  for (const auto& m : e.record.mentions) {
    if (m.pub_year) ++per_year[*m.pub_year];
  }
  Json years = Json::array();
  for (const auto& [year, count] : per_year) years.push_back(Json{{"year", year}, {"count", count}});
  const Json record = store::to_json(e.record);
  Json j{{"id", e.id},
         {"url", e.record.normalized_url},
         {"domain", e.record.domain},
         {"scheme", e.scheme},
         {"source", to_string(e.source)},
         {"mention_count", e.record.mention_count},
         {"first_year", year_json(e.record.first_year)},
         {"last_year", year_json(e.record.last_year)},
         {"latest_year", year_json(e.record.last_year)},
         {"year_counts", std::move(years)},
         {"mentions", record.at("mentions")}};
  if (e.liveness) j["liveness"] = liveness_json(*e.liveness);
  return j;
}

Json stats_json(const SearchIndex& index) {
  struct PerSource {
    std::size_t mentions = 0;
    std::size_t resources = 0;
    std::unordered_set<std::string> documents;
  };
  std::map<SourceDb, PerSource> per_source = {{SourceDb::PubMed, {}}, {SourceDb::PMC, {}}};
  std::size_t mentions = 0;
  std::vector<store::ResourceRecord> records;
  records.reserve(index.size());
  for (const auto& e : index.resources()) {
    mentions += e.record.mention_count;
    bool seen[2] = {false, false};
    for (const auto& m : e.record.mentions) {
      auto& s = per_source[m.source_db];
      ++s.mentions;
      s.documents.insert(m.doc_id);
      seen[m.source_db == SourceDb::PMC ? 1 : 0] = true;
    }
    if (seen[0]) ++per_source[SourceDb::PubMed].resources;
    if (seen[1]) ++per_source[SourceDb::PMC].resources;
    records.push_back(e.record);
  }
  Json sources = Json::array();
  for (const auto& [db, s] : per_source) {
    sources.push_back(Json{{"source_db", to_string(db)},
                           {"mention_count", s.mentions},
                           {"unique_url_count", s.resources},
                           {"papers_with_urls", s.documents.size()}});
  }
  const auto histogram = [](const popularity::FrequencyDistribution& d) {
    Json h = Json::array();
    for (const auto& b : d.histogram) h.push_back(Json::array({b.frequency, b.keys}));
    return h;
  };
  Json facets = Json::object();
  for (const auto& [dimension, values] : index.facets()) {
    Json v = Json::object();
    for (const auto& [value, count] : values) v[value] = count;
    facets[dimension] = std::move(v);
  }
  return Json{{"resources", index.size()},
              {"mentions", mentions},
              {"sources", std::move(sources)},
              {"facets", std::move(facets)},
              {"top_domains", top_domains_json(index, 10)},
              {"histograms",
               Json{{"url", histogram(popularity::url_frequency(records))},
                    {"domain", histogram(popularity::domain_frequency(records))}}}};
}

Json top_domains_json(const SearchIndex& index, std::size_t limit) {
  Json out = Json::array();
  for (const auto& d : index.top_domains(limit)) {
    out.push_back(Json{{"domain", d.domain},
                       {"mention_count", d.mention_count},
                       {"resource_count", d.resource_count}});
  }
  return out;
}

}  // namespace rrd::query
