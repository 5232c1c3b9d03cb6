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

#include "support.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

#include <httplib.h>

namespace rrd::testing {

TempDir::TempDir() {
  std::string tmpl = (std::filesystem::temp_directory_path() / "rrd-test-XXXXXX").string();
  if (::mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void write_gz(const std::filesystem::path& path, std::string_view content) {
  gzFile f = gzopen(path.c_str(), "wb");
  if (f == nullptr) throw std::runtime_error("cannot write " + path.string());
  std::size_t off = 0;
  while (off < content.size()) {
    const auto n = static_cast<unsigned>(std::min<std::size_t>(content.size() - off, 1 << 20));
    if (gzwrite(f, content.data() + off, n) != static_cast<int>(n)) {
      gzclose(f);
      throw std::runtime_error("gzwrite failed");
    }
    off += n;
  }
  gzclose(f);
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

namespace {

std::size_t status_field_kib(const char* key) {
  std::ifstream in("/proc/self/status");
  std::string line;
  const std::string prefix = std::string(key) + ":";
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) == 0) return std::stoul(line.substr(prefix.size()));
  }
  return 0;
}

}  // namespace

std::size_t rss_kib() { return status_field_kib("VmRSS"); }
std::size_t peak_rss_kib() { return status_field_kib("VmHWM"); }

std::vector<std::string> oracle_find_urls(const std::string& text) {
  static const std::regex re(R"([A-Za-z]+://[^\s]*)");
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator();
       ++it) {
    out.push_back(it->str());
  }
  return out;
}

std::optional<std::string> oracle_normalize(const std::string& raw) {
  const auto sep = raw.find("://");
  std::string u = raw;
  const std::string strip = ".,;:!?'\"";
  while (u.size() > sep + 3) {
    const char c = u.back();
    if (strip.find(c) != std::string::npos) {
      u.pop_back();
      continue;
    }
    const char open = c == ')' ? '(' : c == ']' ? '[' : c == '}' ? '{' : 0;
    if (open != 0 && std::count(u.begin(), u.end(), c) > std::count(u.begin(), u.end(), open)) {
      u.pop_back();
      continue;
    }
    break;
  }
  std::string scheme = u.substr(0, sep);
  std::string rest = u.substr(sep + 3);
  std::size_t host_len = 0;
  while (host_len < rest.size() && rest[host_len] != '/' && rest[host_len] != '?' &&
         rest[host_len] != '#') {
    ++host_len;
  }
  if (host_len == 0) return std::nullopt;
  const auto lower = [](std::string s) {
    for (auto& c : s) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return s;
  };
  return lower(scheme) + "://" + lower(rest.substr(0, host_len)) + rest.substr(host_len);
}

// ---- Generator ----

namespace {

const std::vector<std::string> kWords = {
    "gene",     "expression", "protein",  "analysis", "data",     "we",        "the",
    "software", "tool",       "cells",    "patients", "results",  "showed",    "model",
    "sequence", "available",  "method",   "using",    "RNA",      "binding",   "network",
    "clinical", "samples",    "database", "naïve",    "β-catenin", "R&D",      "p<0.05",
    "et al.",   "e.g.",       "Fig. 2",   "i.e.",     "résumé",   "数据",      "approx.",
    "version",  "server",     "pipeline", "code",     "mouse",    "tumor",     "signal"};

const std::vector<std::string> kTlds = {"org", "com", "edu", "gov", "net", "io", "ac.uk"};
const std::vector<std::string> kSchemes = {"http", "https", "ftp", "HTTP", "Https"};

}  // namespace

CorpusGenerator::CorpusGenerator(std::uint64_t seed, SynthOptions options)
    : rng_(seed), options_(options) {
  pool_.reserve(options_.url_pool);
  for (std::size_t i = 0; i < std::max<std::size_t>(1, options_.url_pool); ++i) {
    pool_.push_back(random_url());
  }
}

std::string CorpusGenerator::word() {
  std::uniform_int_distribution<std::size_t> pick(0, kWords.size() - 1);
  return kWords[pick(rng_)];
}

std::string CorpusGenerator::random_url() {
  std::uniform_int_distribution<int> coin(0, 99);
  std::uniform_int_distribution<std::size_t> len(3, 10);
  const auto label = [&] {
    std::string s;
    const std::size_t n = len(rng_);
    for (std::size_t i = 0; i < n; ++i) {
      const int r = coin(rng_);
      s += r < 8 ? static_cast<char>('A' + r % 26) : static_cast<char>('a' + r % 26);
    }
    return s;
  };
  std::string url = kSchemes[static_cast<std::size_t>(coin(rng_)) % kSchemes.size()] + "://";
  if (coin(rng_) < 30) url += "www.";
  url += label() + "." + kTlds[static_cast<std::size_t>(coin(rng_)) % kTlds.size()];
  if (coin(rng_) < 10) url += ":8080";
  const int segments = coin(rng_) % 4;
  for (int i = 0; i < segments; ++i) url += "/" + label();
  if (coin(rng_) < 30) url += "/";
  if (coin(rng_) < 15) url += "?id=" + std::to_string(coin(rng_)) + "&db=" + label();
  if (coin(rng_) < 5) url += "/(v2)";
  return url;
}

std::string CorpusGenerator::pooled_url() {
  std::uniform_int_distribution<std::size_t> pick(0, pool_.size() - 1);
  return pool_[pick(rng_)];
}

std::string CorpusGenerator::sentence(std::vector<std::string>* planted) {
  std::uniform_int_distribution<int> coin(0, 99);
  std::uniform_int_distribution<int> n_words(4, 14);
  const int n = n_words(rng_);
  std::string s;
  std::string first = word();
  first[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(first[0])));
  s += first;
  for (int i = 1; i < n; ++i) {
    s += ' ';
    if (planted != nullptr && coin(rng_) < 12) {
      std::string token = random_url();
      const int r = coin(rng_);
      if (r < 15) {
        s += "(";
        token += ")";
      } else if (r < 30) {
        token += ",";
      } else if (r < 35) {
        token += ";";
      }
      planted->push_back(token);
      s += token;
    } else {
      s += word();
    }
  }
  const int end = coin(rng_);
  if (planted != nullptr && end < 30) {
    std::string token = random_url() + ".";
    planted->push_back(token);
    s += ' ' + token;
  } else {
    const char* stop = end < 80 ? "." : end < 90 ? "?" : "!";
    // A terminator glued to a trailing URL is part of its raw match.
    if (planted != nullptr && !planted->empty() && s.ends_with(planted->back())) {
      planted->back() += stop;
    }
    s += stop;
  }
  return s;
}

std::pair<std::string, std::string> CorpusGenerator::prose(bool allow_links) {
  std::uniform_real_distribution<double> unit(0, 1);
  std::uniform_int_distribution<int> n_words(5, 16);
  std::string xml;
  std::string flat;
  const auto add = [&](const std::string& text) {
    xml += xml_escape(text);
    flat += text;
  };
  const int n = n_words(rng_);
  const int url_at = unit(rng_) < options_.url_rate ? static_cast<int>(rng_() % n) : -1;
  for (int i = 0; i < n; ++i) {
    if (i > 0) add(" ");
    if (i == url_at) {
      if (unit(rng_) < options_.invalid_rate) {
        add(rng_() % 2 ? "http://" : "ftp:///pub/data");
      } else if (allow_links && unit(rng_) < options_.link_rate) {
        const std::string target = pooled_url();
        const int style = static_cast<int>(rng_() % 4);
        std::string display;
        if (style == 1) display = target;
        if (style == 2) display = "the " + word() + " site";
        if (style == 3) display = pooled_url();
        xml += "<ext-link ext-link-type=\"uri\" xlink:href=\"" + xml_escape(target) + "\"";
        if (display.empty()) {
          xml += "/>";
        } else {
          xml += ">" + xml_escape(display) + "</ext-link>";
        }
        flat += display.empty() || display == target ? target : target + " (" + display + ")";
      } else {
        std::string url = pooled_url();
        if (rng_() % 5 == 0) {
          add("(" + url + ")");
        } else {
          add(url);
        }
      }
    } else if (rng_() % 10 == 0) {
      const std::string w = word();
      xml += "<italic>" + xml_escape(w) + "</italic>";
      flat += w;
    } else {
      std::string w = word();
      if (i == 0) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
      add(w);
    }
  }
  add(rng_() % 4 == 0 ? "?" : ".");
  return {xml, flat};
}

SynthDoc CorpusGenerator::jats(std::size_t n) {
  std::uniform_real_distribution<double> unit(0, 1);
  SynthDoc d;
  d.pmc = true;
  d.doc_id = "PMC" + std::to_string(1000000 + n);
  d.year = 1995 + static_cast<int>(rng_() % 30);
  const bool empty = unit(rng_) < 0.03;

  std::string meta = "<article-id pub-id-type=\"pmid\">" + std::to_string(2000000 + n) +
                     "</article-id><article-id pub-id-type=\"pmc\">" + std::to_string(1000000 + n) +
                     "</article-id>";
  meta += "<pub-date pub-type=\"epub\"><day>" + std::to_string(1 + rng_() % 28) + "</day><month>" +
          std::to_string(1 + rng_() % 12) + "</month><year>" + std::to_string(*d.year) +
          "</year></pub-date>";
  meta += "<pub-date pub-type=\"collection\"><year>" + std::to_string(*d.year + 1) + "</year></pub-date>";
  std::string body;
  std::string back;
  if (!empty) {
    auto [title_xml, title_flat] = prose(false);
    auto [abs_xml, abs_flat] = prose(false);
    meta += "<title-group><article-title>" + title_xml + "</article-title></title-group>";
    meta += "<abstract><p>" + abs_xml + "</p></abstract>";
    d.flat_texts.push_back(title_flat);
    d.flat_texts.push_back(abs_flat);

    std::string fn_id;
    std::string fn_xml;
    if (unit(rng_) < options_.footnote_rate) {
      fn_id = "fn" + std::to_string(n);
      std::string url = pooled_url();
      fn_xml = "<fn-group><fn id=\"" + fn_id + "\"><p>Available at " + xml_escape(url) +
               "</p></fn></fn-group>";
      d.flat_texts.push_back("Available at " + url);
    }
    body += "<sec><title>Methods</title>";
    d.flat_texts.push_back("Methods");
    for (std::size_t p = 0; p < options_.paragraphs; ++p) {
      std::string px;
      std::string pf;
      for (std::size_t s = 0; s < options_.sentences; ++s) {
        auto [sx, sf] = prose(true);
        if (s > 0) {
          px += " ";
          pf += " ";
        }
        px += sx;
        pf += sf;
        if (p == 0 && s == 0 && !fn_id.empty()) {
          px += "<xref ref-type=\"fn\" rid=\"" + fn_id + "\">1</xref>";
          pf += "1";
        }
      }
      body += "<p>" + px + "</p>";
      d.flat_texts.push_back(pf);
    }
    if (unit(rng_) < 0.3) {
      auto [cx, cf] = prose(false);
      body += "<fig id=\"f1\"><label>Figure 1</label><caption><p>" + cx + "</p></caption></fig>";
      d.flat_texts.push_back("Figure 1");
      d.flat_texts.push_back(cf);
    }
    body += "</sec>";
    back = fn_xml + "<ref-list><ref id=\"r1\"><mixed-citation>Cited work. http://cited.example.org/ref" +
           std::to_string(n) + "</mixed-citation></ref></ref-list>";
  } else {
    d.flat_texts.clear();
  }
  d.xml = "<article xmlns:xlink=\"http://www.w3.org/1999/xlink\" article-type=\"research-article\">"
          "<front><journal-meta><journal-id>J</journal-id></journal-meta><article-meta>" +
          meta + "</article-meta></front><body>" + body + "</body><back>" + back +
          "</back></article>";
  return d;
}

SynthDoc CorpusGenerator::medline(std::size_t n) {
  static const char* kMonths[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                  "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  std::uniform_real_distribution<double> unit(0, 1);
  SynthDoc d;
  d.pmc = false;
  d.doc_id = std::to_string(30000000 + n);
  d.year = 1980 + static_cast<int>(rng_() % 44);
  auto [title_xml, title_flat] = prose(false);
  d.flat_texts.push_back(title_flat);
  std::string abstract;
  if (unit(rng_) < 0.9) {
    abstract = "<Abstract>";
    const std::size_t sections = 1 + rng_() % 3;
    for (std::size_t i = 0; i < sections; ++i) {
      auto [ax, af] = prose(false);
      abstract += "<AbstractText Label=\"S" + std::to_string(i) + "\">" + ax + "</AbstractText>";
      d.flat_texts.push_back(af);
    }
    abstract += "</Abstract>";
  }
  d.xml = "<PubmedArticle><MedlineCitation Status=\"MEDLINE\" Owner=\"NLM\"><PMID Version=\"1\">" +
          d.doc_id + "</PMID><Article PubModel=\"Print\"><Journal><JournalIssue CitedMedium=\"Print\">"
          "<PubDate><Year>" + std::to_string(*d.year) + "</Year><Month>" + kMonths[rng_() % 12] +
          "</Month></PubDate></JournalIssue></Journal><ArticleTitle>" + title_xml +
          "</ArticleTitle>" + abstract +
          "</Article></MedlineCitation><PubmedData><ArticleIdList><ArticleId IdType=\"pubmed\">" +
          d.doc_id + "</ArticleId></ArticleIdList></PubmedData></PubmedArticle>";
  return d;
}

std::string jats_archive(const std::vector<SynthDoc>& docs) {
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<!DOCTYPE pmc-articleset PUBLIC \"-//NLM//DTD ARTICLE SET 2.0//EN\" "
      "\"https://dtd.nlm.nih.gov/ncbi/pmc/articleset/nlm-articleset-2.0.dtd\">\n<pmc-articleset>\n";
  for (const auto& d : docs) out += d.xml + "\n";
  return out + "</pmc-articleset>\n";
}

std::string medline_archive(const std::vector<SynthDoc>& docs) {
  std::string out =
      "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n"
      "<!DOCTYPE PubmedArticleSet PUBLIC \"-//NLM//DTD PubMedArticle, 1st January 2024//EN\" "
      "\"https://dtd.nlm.nih.gov/ncbi/pubmed/out/pubmed_240101.dtd\">\n<PubmedArticleSet>\n";
  for (const auto& d : docs) out += d.xml + "\n";
  return out + "</PubmedArticleSet>\n";
}

std::map<std::string, std::vector<std::string>> oracle_mentions(const std::vector<SynthDoc>& docs) {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& d : docs) {
    auto& urls = out[d.doc_id];
    for (const auto& text : d.flat_texts) {
      for (const auto& raw : oracle_find_urls(text)) {
        if (auto n = oracle_normalize(raw)) urls.push_back(*n);
      }
    }
    std::sort(urls.begin(), urls.end());
  }
  return out;
}

std::string diff_against_oracle(const std::vector<rrd::extract::ResourceMention>& mentions,
                                const std::vector<SynthDoc>& docs) {
  const auto want = oracle_mentions(docs);
  std::map<std::string, std::vector<std::string>> got;
  for (const auto& d : docs) got[d.doc_id];
  std::set<std::string> got_unique;
  for (const auto& m : mentions) {
    got[m.doc_id].push_back(m.normalized.url);
    got_unique.insert(m.normalized.url);
  }
  std::size_t want_total = 0;
  std::set<std::string> want_unique;
  for (const auto& [doc, urls] : want) {
    want_total += urls.size();
    want_unique.insert(urls.begin(), urls.end());
  }
  for (auto& [doc, urls] : got) {
    std::sort(urls.begin(), urls.end());
    const auto it = want.find(doc);
    if (it == want.end()) return "unexpected document " + doc;
    if (urls != it->second) {
      std::string msg = "document " + doc + ": got";
      for (const auto& u : urls) msg += " " + u;
      msg += " | want";
      for (const auto& u : it->second) msg += " " + u;
      return msg;
    }
  }
  if (mentions.size() != want_total) {
    return "mention count " + std::to_string(mentions.size()) + " != " + std::to_string(want_total);
  }
  if (got_unique != want_unique) return "unique URL sets differ";
  return {};
}

// ---- HTTP fixtures ----

FixtureServer::FixtureServer() : server_(std::make_unique<httplib::Server>()) {
  server_->new_task_queue = [] { return new httplib::ThreadPool(64); };
}

FixtureServer::~FixtureServer() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

void FixtureServer::start() {
  port_ = server_->bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw std::runtime_error("cannot bind fixture server");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

std::string FixtureServer::url(std::string_view path) const {
  return "http://127.0.0.1:" + std::to_string(port_) + std::string(path);
}

std::vector<std::size_t> sample_power_law(std::mt19937_64& rng, double alpha, std::size_t x_min,
                                          std::size_t n) {
  constexpr std::size_t kTable = 100'000;
  std::vector<double> cdf;
  cdf.reserve(kTable);
  double acc = 0;
  for (std::size_t x = x_min; x < x_min + kTable; ++x) {
    acc += std::pow(static_cast<double>(x), -alpha);
    cdf.push_back(acc);
  }
  const double edge = static_cast<double>(x_min + kTable) - 0.5;
  const double tail = std::pow(edge, 1 - alpha) / (alpha - 1);
  std::uniform_real_distribution<double> uni(0.0, acc + tail);
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = uni(rng);
    if (u < acc) {
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      out.push_back(x_min + static_cast<std::size_t>(it - cdf.begin()));
    } else {
      const double rest = std::pow(edge, 1 - alpha) - (u - acc) * (alpha - 1);
      out.push_back(static_cast<std::size_t>(std::llround(std::pow(rest, 1 / (1 - alpha)))));
    }
  }
  return out;
}

const std::vector<std::string>& snapshot_vocabulary() {
  static const std::vector<std::string> words = {
      "genome", "protein", "database", "server", "tool", "software", "alignment", "sequence",
      "analysis", "available", "web", "download", "source", "code", "package", "pipeline",
      "model", "network", "expression", "cell", "gene", "variant", "clinical", "trial",
      "imaging", "brain", "structure", "browser", "annotation", "ontology", "café", "naïve",
      "größe", "R2", "v3", "x"};
  return words;
}

std::vector<rrd::store::ResourceRecord> random_snapshot(std::mt19937_64& rng, std::size_t n) {
  const auto& vocab = snapshot_vocabulary();
  const std::vector<std::string> schemes = {"http", "https", "ftp"};
  std::vector<rrd::extract::ResourceMention> mentions;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string host = "h" + std::to_string(rng() % 40) + (rng() % 2 ? ".org" : ".edu");
    const std::string url = schemes[rng() % 8 == 0 ? 2 : rng() % 2] + "://" + host + "/r" +
                            std::to_string(i);
    const auto normalized = rrd::url::normalize_url(url);
    for (std::size_t k = 0, m = 1 + rng() % 4 + (rng() % 10 == 0 ? rng() % 20 : 0); k < m; ++k) {
      rrd::extract::ResourceMention rm;
      rm.normalized = normalized;
      rm.raw = {url, 0, url.size()};
      rm.domain = rrd::url::extract_domain(normalized);
      std::string ctx;
      for (std::size_t w = 0, nw = 3 + rng() % 8; w < nw; ++w) {
        std::string word = vocab[rng() % vocab.size()];
        if (rng() % 5 == 0) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
        ctx += word + (rng() % 6 == 0 ? ", " : " ");
      }
      rm.context = ctx + url + ".";
      rm.doc_id = std::to_string(rng() % 5000);
      rm.source_db = rng() % 3 == 0 ? rrd::SourceDb::PubMed : rrd::SourceDb::PMC;
      if (rng() % 7) rm.pub_year = 1995 + static_cast<int>(rng() % 30);
      mentions.push_back(std::move(rm));
    }
  }
  return rrd::store::merge_by_url(mentions);
}

rrd::query::QuerySpec random_query(std::mt19937_64& rng,
                                   const std::vector<rrd::store::ResourceRecord>& records) {
  const auto& vocab = snapshot_vocabulary();
  rrd::query::QuerySpec spec;
  for (std::size_t k = 0, n = rng() % 3; k < n; ++k) {
    std::string w = rng() % 15 == 0 ? "absentword" : vocab[rng() % vocab.size()];
    if (rng() % 4 == 0) std::transform(w.begin(), w.end(), w.begin(), [](unsigned char c) {
      return static_cast<char>(std::toupper(c));
    });
    spec.q += w + " ";
  }
  const auto& pick = records[rng() % records.size()];
  if (rng() % 8 == 0) spec.q += "host:" + rrd::url::normalize_url(pick.normalized_url).host + " ";
  if (rng() % 12 == 0) spec.q += "url:" + pick.normalized_url;
  if (rng() % 4 == 0) spec.domain = records[rng() % records.size()].domain;
  if (rng() % 4 == 0) spec.source = std::vector<std::string>{"pubmed", "pmc", "both"}[rng() % 3];
  if (rng() % 5 == 0) spec.scheme = std::vector<std::string>{"http", "https", "ftp"}[rng() % 3];
  if (rng() % 3 == 0) {
    const int a = 1995 + static_cast<int>(rng() % 30);
    const int b = 1995 + static_cast<int>(rng() % 30);
    if (rng() % 3) spec.year_from = std::min(a, b);
    if (rng() % 3) spec.year_to = std::max(a, b);
  }
  switch (rng() % 4) {
    case 0:
      spec.sort = rrd::query::SortOrder::MentionCount;
      break;
    case 1:
      spec.sort = rrd::query::SortOrder::LatestMention;
      break;
    case 2:
      spec.sort = rrd::query::SortOrder::Relevance;
      break;
    default:
      break;
  }
  spec.page_size = 1 + rng() % 50;
  return spec;
}

namespace {

std::string ascii_lower(std::string s) {
  for (auto& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

std::vector<std::string> oracle_words(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  const auto flush = [&] {
    if (cur.size() >= 2) out.push_back(ascii_lower(cur));
    cur.clear();
  };
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80 || std::isalnum(c)) {
      cur += ch;
    } else {
      flush();
    }
  }
  flush();
  return out;
}

}  // namespace

std::vector<std::size_t> oracle_search(const std::vector<rrd::store::ResourceRecord>& records,
                                       const rrd::query::QuerySpec& spec) {
  std::vector<std::string> words;
  std::vector<std::string> hosts;
  std::vector<std::string> urls;
  std::istringstream in(spec.q);
  std::string token;
  while (in >> token) {
    if (token.rfind("host:", 0) == 0) {
      hosts.push_back(ascii_lower(token.substr(5)));
    } else if (token.rfind("url:", 0) == 0) {
      urls.push_back(ascii_lower(token.substr(4)));
    } else {
      for (auto& w : oracle_words(token)) words.push_back(w);
    }
  }
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  const bool has_terms = !words.empty() || !hosts.empty() || !urls.empty();

  struct Hit {
    std::size_t id;
    double score;
  };
  std::vector<Hit> hits;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const std::string host = ascii_lower(r.normalized_url.substr(r.normalized_url.find("://") + 3));
    const std::string bare = host.substr(0, host.find('/'));
    bool ok = true;
    double score = 0;
    for (const auto& h : hosts) ok = ok && h == bare;
    for (const auto& u : urls) ok = ok && u == ascii_lower(r.normalized_url);
    score += static_cast<double>(hosts.size() + urls.size());
    std::map<std::string, std::size_t> tf;
    for (const auto& m : r.mentions) {
      for (const auto& w : oracle_words(m.context)) ++tf[w];
    }
    for (const auto& w : words) {
      const auto it = tf.find(w);
      ok = ok && it != tf.end();
      if (it != tf.end()) score += static_cast<double>(it->second);
    }
    if (!ok) continue;
    if (spec.domain && r.domain != *spec.domain) continue;
    if (spec.scheme && r.normalized_url.substr(0, r.normalized_url.find("://")) != *spec.scheme) continue;
    if (spec.source) {
      bool pubmed = false, pmc = false;
      for (const auto& m : r.mentions) (m.source_db == rrd::SourceDb::PubMed ? pubmed : pmc) = true;
      const std::string facet = pubmed && pmc ? "both" : pubmed ? "pubmed" : "pmc";
      if (facet != *spec.source) continue;
    }
    if (spec.year_from || spec.year_to) {
      bool any = false;
      for (const auto& m : r.mentions) {
        if (m.pub_year && (!spec.year_from || *m.pub_year >= *spec.year_from) &&
            (!spec.year_to || *m.pub_year <= *spec.year_to)) {
          any = true;
        }
      }
      if (!any) continue;
    }
    hits.push_back({i + 1, has_terms ? score : 0.0});
  }
  using rrd::query::SortOrder;
  const SortOrder sort = spec.sort.value_or(has_terms ? SortOrder::Relevance : SortOrder::MentionCount);
  const auto count = [&](const Hit& h) { return records[h.id - 1].mention_count; };
  const auto latest = [&](const Hit& h) { return records[h.id - 1].last_year.value_or(-1); };
  std::stable_sort(hits.begin(), hits.end(), [&](const Hit& a, const Hit& b) {
    switch (sort) {
      case SortOrder::Relevance:
        if (a.score != b.score) return a.score > b.score;
        [[fallthrough]];
      case SortOrder::MentionCount:
        return count(a) > count(b);
      case SortOrder::LatestMention:
        return latest(a) > latest(b);
    }
    return false;
  });
  std::vector<std::size_t> ids;
  for (const auto& h : hits) ids.push_back(h.id);
  return ids;
}

std::vector<std::size_t> all_pages(const rrd::query::SearchIndex& index, rrd::query::QuerySpec spec) {
  std::vector<std::size_t> ids;
  for (spec.page = 1;; ++spec.page) {
    const auto page = index.search(spec);
    for (const auto& h : page.hits) ids.push_back(h.id);
    if (page.hits.size() < spec.page_size) break;
  }
  return ids;
}

BlackHole::BlackHole() {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw std::runtime_error("socket failed");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd_, 1) != 0) {
    ::close(fd_);
    throw std::runtime_error("cannot bind black hole");
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

BlackHole::~BlackHole() {
  if (fd_ >= 0) ::close(fd_);
}

}  // namespace rrd::testing
