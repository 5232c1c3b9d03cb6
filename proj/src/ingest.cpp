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

#include "rrd/ingest.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "rrd/text.hpp"
#include "xml_dom.hpp"

namespace rrd::ingest {

Schema parse_schema(std::string_view s) {
  const std::string lower = text::to_lower_ascii(s);
  if (lower == "medline") return Schema::Medline;
  if (lower == "jats") return Schema::Jats;
  throw std::invalid_argument("unknown schema: " + std::string(s));
}

std::string_view to_string(Schema s) noexcept { return s == Schema::Medline ? "medline" : "jats"; }

// --- schema profiles --------------------------------------------------------

SchemaProfile SchemaProfile::jats() {
  SchemaProfile p;
  p.record_elements = {"article"};
  p.link_elements = {"ext-link", "uri", "self-uri", "inline-supplementary-material",
                     "related-object", "supplementary-material"};
  p.link_attributes = {"xlink:href", "href"};
  p.paragraph_elements = {"p"};
  p.caption_elements = {"caption"};
  p.footnote_elements = {"fn"};
  p.footnote_ref_elements = {"xref"};
  p.footnote_ref_types = {"fn", "table-fn"};
  p.other_block_elements = {"title", "label", "td", "th", "def", "term", "disp-quote",
                            "attrib", "verse-line", "statement", "speech"};
  p.separator_elements = {"break", "list-item", "list", "tr", "sec", "def-item",
                          "table", "fig", "table-wrap", "disp-formula"};
  p.skip_elements = {"ref-list", "tex-math", "mml:math", "math", "processing-meta",
                     "object-id", "alternatives"};
  return p;
}

SchemaProfile SchemaProfile::medline() {
  SchemaProfile p;
  p.record_elements = {"PubmedArticle", "MedlineCitation"};
  p.link_elements = {};
  p.link_attributes = {"href", "xlink:href"};
  p.separator_elements = {"AbstractText"};
  p.skip_elements = {"mml:math", "math"};
  return p;
}

SchemaProfile SchemaProfile::defaults(Schema schema) {
  return schema == Schema::Medline ? medline() : jats();
}

SchemaProfile parse_schema_profile(std::string_view content, SchemaProfile base) {
  const std::map<std::string_view, NameSet SchemaProfile::*> keys = {
      {"record_elements", &SchemaProfile::record_elements},
      {"link_elements", &SchemaProfile::link_elements},
      {"link_attributes", &SchemaProfile::link_attributes},
      {"paragraph_elements", &SchemaProfile::paragraph_elements},
      {"caption_elements", &SchemaProfile::caption_elements},
      {"footnote_elements", &SchemaProfile::footnote_elements},
      {"footnote_ref_elements", &SchemaProfile::footnote_ref_elements},
      {"footnote_ref_types", &SchemaProfile::footnote_ref_types},
      {"other_block_elements", &SchemaProfile::other_block_elements},
      {"separator_elements", &SchemaProfile::separator_elements},
      {"skip_elements", &SchemaProfile::skip_elements},
  };
  std::set<std::string_view> assigned;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    auto eol = content.find('\n', pos);
    if (eol == std::string_view::npos) eol = content.size();
    std::string_view line = content.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::runtime_error("schema profile line " + std::to_string(line_no) +
                               ": expected key = values");
    }
    const auto key = text::trim(line.substr(0, eq));
    const auto it = keys.find(key);
    if (it == keys.end()) {
      throw std::runtime_error("schema profile line " + std::to_string(line_no) +
                               ": unknown key '" + std::string(key) + "'");
    }
    NameSet values;
    std::string current;
    for (char c : line.substr(eq + 1)) {
      if (c == ',' || c == ' ' || c == '\t' || c == '\r') {
        if (!current.empty()) values.insert(std::move(current));
        current.clear();
      } else {
        current += c;
      }
    }
    if (!current.empty()) values.insert(std::move(current));
    // The first line for a key replaces the default; later lines extend it.
    NameSet& target = base.*(it->second);
    if (assigned.insert(it->first).second) target.clear();
    target.merge(values);
  }
  return base;
}

SchemaProfile load_schema_profile(const std::filesystem::path& path, SchemaProfile base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read schema profile " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_schema_profile(buf.str(), std::move(base));
}

// --- archive framing --------------------------------------------------------

namespace {
constexpr std::size_t kChunkBytes = 64 * 1024;
}

ArchiveReader::ArchiveReader(const std::filesystem::path& path, NameSet record_elements)
    : path_(path.string()), record_names_(std::move(record_elements)), chunk_(kChunkBytes) {
  if (!std::filesystem::is_regular_file(path)) {
    throw ArchiveError(path_ + ": not a readable file");
  }
  gzFile f = gzopen(path_.c_str(), "rb");
  if (f == nullptr) throw ArchiveError(path_ + ": cannot open");
  gzbuffer(f, 128 * 1024);
  file_ = f;
}

ArchiveReader::~ArchiveReader() {
  if (file_ != nullptr) gzclose(static_cast<gzFile>(file_));
}

bool ArchiveReader::fill() {
  if (eof_) return false;
  auto f = static_cast<gzFile>(file_);
  const int n = gzread(f, chunk_.data(), static_cast<unsigned>(chunk_.size()));
  int err = Z_OK;
  const char* msg = gzerror(f, &err);
  // Data decoded before a failure is delivered first; the error surfaces on
  // the following read.
  if (n < 0 || (n == 0 && err != Z_OK && err != Z_STREAM_END)) {
    throw ArchiveError(path_ + ": decompression failed: " + (msg ? msg : "unknown error"));
  }
  if (n == 0) {
    eof_ = true;
    return false;
  }
  chunk_pos_ = 0;
  chunk_len_ = static_cast<std::size_t>(n);
  return true;
}

std::optional<RawArticle> ArchiveReader::next() {
  for (;;) {
    if (chunk_pos_ == chunk_len_ && !fill()) break;
    while (chunk_pos_ < chunk_len_) {
      const char c = chunk_[chunk_pos_++];
      if (consume(c)) {
        RawArticle article;
        article.payload = std::move(payload_);
        article.offset = record_offset_;
        article.index = records_++;
        peak_payload_ = std::max(peak_payload_, article.payload.size());
        payload_ = std::string();
        return article;
      }
    }
  }
  if (in_record_ || state_ != State::Text) {
    throw ArchiveError(path_ + ": truncated record starting at byte " +
                       std::to_string(in_record_ ? record_offset_ : tag_offset_));
  }
  return std::nullopt;
}

bool ArchiveReader::consume(char c) {
  const std::uint64_t here = consumed_++;
  if (in_record_) payload_ += c;
  switch (state_) {
    case State::Text:
      if (c == '<') {
        state_ = State::Markup;
        tag_.clear();
        tag_offset_ = here;
      }
      return false;
    case State::Markup: {
      tag_ += c;
      if (tag_[0] == '?') {
        state_ = State::Instruction;
        return false;
      }
      if (tag_[0] == '!') {
        constexpr std::string_view comment = "!--";
        constexpr std::string_view cdata = "![CDATA[";
        if (tag_ == comment) {
          state_ = State::Comment;
          tag_.clear();
        } else if (tag_ == cdata) {
          state_ = State::CData;
          tag_.clear();
        } else if (!comment.starts_with(tag_) && !cdata.starts_with(tag_)) {
          state_ = State::Declaration;
          decl_depth_ = 0;
          if (c == '[') ++decl_depth_;
          if (c == '>') state_ = State::Text;
        }
        return false;
      }
      state_ = State::Element;
      quote_ = 0;
      if (c == '>') {
        state_ = State::Text;
        return finish_tag();
      }
      if (c == '"' || c == '\'') quote_ = c;
      return false;
    }
    case State::Element:
      tag_ += c;
      if (quote_ != 0) {
        if (c == quote_) quote_ = 0;
      } else if (c == '"' || c == '\'') {
        quote_ = c;
      } else if (c == '>') {
        state_ = State::Text;
        return finish_tag();
      }
      return false;
    case State::Comment:
      tag_ += c;
      if (tag_.size() > 3) tag_.erase(0, tag_.size() - 3);
      if (tag_ == "-->") state_ = State::Text;
      return false;
    case State::CData:
      tag_ += c;
      if (tag_.size() > 3) tag_.erase(0, tag_.size() - 3);
      if (tag_ == "]]>") state_ = State::Text;
      return false;
    case State::Instruction:
      tag_ += c;
      if (tag_.size() > 2) tag_.erase(0, tag_.size() - 2);
      if (tag_ == "?>") state_ = State::Text;
      return false;
    case State::Declaration:
      if (c == '[') {
        ++decl_depth_;
      } else if (c == ']') {
        --decl_depth_;
      } else if (c == '>' && decl_depth_ <= 0) {
        state_ = State::Text;
      }
      return false;
  }
  return false;
}

bool ArchiveReader::finish_tag() {
  // tag_ holds everything after '<' up to and including '>'.
  const bool closing = !tag_.empty() && tag_[0] == '/';
  std::size_t begin = closing ? 1 : 0;
  std::size_t end = begin;
  while (end < tag_.size() && tag_[end] != '>' && tag_[end] != '/' &&
         !text::is_space_at(tag_, end)) {
    ++end;
  }
  const std::string_view name(tag_.data() + begin, end - begin);
  const bool self_closing = !closing && tag_.size() >= 2 && tag_[tag_.size() - 2] == '/';

  if (!in_record_) {
    if (closing || !record_names_.contains(name)) return false;
    record_offset_ = tag_offset_;
    payload_ = "<" + tag_;
    if (self_closing) return true;
    in_record_ = true;
    record_name_ = name;
    depth_ = 1;
    return false;
  }
  if (name != record_name_) return false;
  if (closing) {
    if (--depth_ == 0) {
      in_record_ = false;
      return true;
    }
  } else if (!self_closing) {
    ++depth_;
  }
  return false;
}

// --- record parsing ---------------------------------------------------------

std::string flatten_link(std::string_view target, std::string_view display) {
  const auto t = text::trim(target);
  const auto d = text::trim(display);
  std::string out(t);
  if (!d.empty() && d != t) {
    out += " (";
    out += d;
    out += ')';
  }
  return out;
}

namespace {

using xml::Node;

const std::string* link_target(const Node& node, const SchemaProfile& profile) {
  for (const auto& [key, value] : node.attrs) {
    if (profile.link_attributes.contains(key) && text::has_content(value)) return &value;
  }
  return nullptr;
}

// Appends inline content of `node` with link flattening and separators.
void append_inline(const Node& node, const SchemaProfile& profile, text::TextBuilder& out) {
  if (node.is_text()) {
    out.append(node.text);
    return;
  }
  if (profile.skip_elements.contains(node.name)) return;
  const bool separator = profile.separator_elements.contains(node.name);
  if (separator) out.separate();
  const std::string* target =
      profile.link_elements.contains(node.name) ? link_target(node, profile) : nullptr;
  std::size_t start = 0;
  if (target != nullptr) {
    out.flush_space();
    start = out.size();
  }
  for (const auto& c : node.children) append_inline(c, profile, out);
  if (target != nullptr) {
    const std::string display = out.cut(start);
    out.append(flatten_link(*target, display));
  }
  if (separator) out.separate();
}

struct DateParts {
  int year = 0;
  int month = 0;
  int day = 0;
};

std::optional<int> parse_int(std::string_view s) {
  s = text::trim(s);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<int> parse_month(std::string_view s) {
  if (auto n = parse_int(s)) {
    if (*n >= 1 && *n <= 12) return n;
    return std::nullopt;
  }
  static constexpr std::array<std::string_view, 12> names = {
      "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"};
  const std::string lower = text::to_lower_ascii(text::trim(s));
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (lower.starts_with(names[i])) return static_cast<int>(i + 1);
  }
  return std::nullopt;
}

// First run of four digits, for free-form dates like "1998 Dec-1999 Jan".
std::optional<int> first_year(std::string_view s) {
  for (std::size_t i = 0; i + 4 <= s.size(); ++i) {
    bool digits = true;
    for (std::size_t k = 0; k < 4; ++k) digits = digits && text::is_ascii_digit(s[i + k]);
    const bool bounded = (i == 0 || !text::is_ascii_digit(s[i - 1])) &&
                         (i + 4 == s.size() || !text::is_ascii_digit(s[i + 4]));
    if (digits && bounded) return parse_int(s.substr(i, 4));
  }
  return std::nullopt;
}

// Earliest complete (year, month, day) date; failing that, the earliest year.
class YearPicker {
 public:
  void add(const Node& date, std::string_view year_tag, std::string_view month_tag,
           std::string_view day_tag) {
    const Node* y = date.child(year_tag);
    std::optional<int> year = y ? parse_int(y->inner_text()) : std::nullopt;
    if (!year) {
      if (const Node* free_form = date.child("MedlineDate")) {
        year = first_year(free_form->inner_text());
      }
      if (year) add_partial(*year);
      return;
    }
    const Node* m = date.child(month_tag);
    const Node* d = date.child(day_tag);
    const auto month = m ? parse_month(m->inner_text()) : std::nullopt;
    const auto day = d ? parse_int(d->inner_text()) : std::nullopt;
    if (month && day && *day >= 1 && *day <= 31) {
      const DateParts parts{*year, *month, *day};
      if (!complete_ || std::tie(parts.year, parts.month, parts.day) <
                            std::tie(complete_->year, complete_->month, complete_->day)) {
        complete_ = parts;
      }
    } else {
      add_partial(*year);
    }
  }

  std::optional<int> year() const {
    if (complete_) return complete_->year;
    return partial_;
  }

 private:
  void add_partial(int year) {
    if (!partial_ || year < *partial_) partial_ = year;
  }
  std::optional<DateParts> complete_;
  std::optional<int> partial_;
};

void collect(const Node& node, std::string_view name, std::vector<const Node*>& out) {
  if (node.is_text()) return;
  if (node.name == name) out.push_back(&node);
  for (const auto& c : node.children) collect(c, name, out);
}

// Walks a JATS tree and assigns text to blocks.
class JatsFlattener {
 public:
  JatsFlattener(const SchemaProfile& profile, Warnings* warnings)
      : profile_(profile), warnings_(warnings) {
    slots_.push_back({BlockKind::TitleAbstract, {}});
  }

  std::vector<TextBlock> run(const Node& article) {
    walk(article, nullptr);
    return finish();
  }

 private:
  struct Slot {
    BlockKind kind;
    text::TextBuilder text;
  };
  struct Open {
    std::size_t slot;
    const Node* owner;
    bool implicit;
  };
  struct Ref {
    std::size_t slot;
    std::size_t offset;
  };

  text::TextBuilder& current() { return slots_[open_.back().slot].text; }

  std::size_t open_block(BlockKind kind, const Node* owner, bool implicit) {
    slots_.push_back({kind, {}});
    open_.push_back({slots_.size() - 1, owner, implicit});
    return slots_.size() - 1;
  }

  void close_implicit(const Node* owner) {
    if (!open_.empty() && open_.back().implicit && open_.back().owner == owner) open_.pop_back();
  }

  bool ensure_block(const Node* parent) {
    if (!open_.empty()) return true;
    if (front_depth_ > 0) return false;
    open_block(BlockKind::Other, parent, true);
    return true;
  }

  bool is_block_element(const Node& n) const {
    return profile_.paragraph_elements.contains(n.name) ||
           profile_.caption_elements.contains(n.name) ||
           profile_.footnote_elements.contains(n.name) ||
           profile_.other_block_elements.contains(n.name);
  }

  void walk_children(const Node& node) {
    for (const auto& c : node.children) {
      if (c.is_text()) {
        if (!open_.empty()) {
          current().append(c.text);
        } else if (text::has_content(c.text) && ensure_block(&node)) {
          current().append(c.text);
        }
        continue;
      }
      if (is_block_element(c)) close_implicit(&node);
      walk(c, &node);
    }
    close_implicit(&node);
  }

  void walk(const Node& node, const Node* parent) {
    if (profile_.skip_elements.contains(node.name)) return;
    const bool front = node.name == "front" || node.name == "front-stub";
    if (front) ++front_depth_;

    if (front_depth_ > 0 && open_.empty() &&
        (node.name == "article-title" || node.name == "abstract")) {
      slots_[0].text.separate();
      open_.push_back({0, &node, false});
      walk_children(node);
      slots_[0].text.separate();
      open_.pop_back();
    } else if (profile_.footnote_elements.contains(node.name) ||
               profile_.caption_elements.contains(node.name)) {
      const bool fn = profile_.footnote_elements.contains(node.name);
      const std::size_t slot =
          open_block(fn ? BlockKind::Footnote : BlockKind::Caption, &node, false);
      if (fn) {
        if (const std::string* id = node.attr("id")) footnote_slot_.emplace(*id, slot);
      }
      walk_children(node);
      open_.pop_back();
    } else if (profile_.paragraph_elements.contains(node.name) ||
               profile_.other_block_elements.contains(node.name)) {
      if (open_.empty()) {
        if (front_depth_ == 0) {
          const bool para = profile_.paragraph_elements.contains(node.name);
          open_block(para ? BlockKind::BodyParagraph : BlockKind::Other, &node, false);
          walk_children(node);
          open_.pop_back();
        } else {
          walk_children(node);
        }
      } else {
        current().separate();
        walk_children(node);
        current().separate();
      }
    } else if (profile_.link_elements.contains(node.name) && link_target(node, profile_) &&
               ensure_block(parent)) {
      const std::string* target = link_target(node, profile_);
      auto& out = current();
      out.flush_space();
      const std::size_t start = out.size();
      walk_children(node);
      auto& after = current();
      const std::string display = after.cut(start);
      after.append(flatten_link(*target, display));
    } else {
      if (profile_.footnote_ref_elements.contains(node.name) && !open_.empty()) {
        const std::string* type = node.attr("ref-type");
        const std::string* rid = node.attr("rid");
        if (type && rid && profile_.footnote_ref_types.contains(*type)) {
          std::istringstream ids(*rid);
          std::string id;
          while (ids >> id) {
            first_ref_.try_emplace(id, Ref{open_.back().slot, current().pending_size()});
          }
        }
      }
      const bool separator = profile_.separator_elements.contains(node.name);
      if (separator && !open_.empty()) current().separate();
      walk_children(node);
      if (separator && !open_.empty()) current().separate();
    }

    if (front) --front_depth_;
  }

  std::vector<TextBlock> finish() {
    std::vector<std::optional<std::size_t>> final_index(slots_.size());
    std::vector<TextBlock> blocks;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      const std::string& t = slots_[i].text.str();
      if (!text::has_content(t)) continue;
      final_index[i] = blocks.size();
      blocks.push_back({t, slots_[i].kind, std::nullopt});
    }
    for (const auto& [id, slot] : footnote_slot_) {
      if (!final_index[slot]) continue;
      const auto ref = first_ref_.find(id);
      if (ref == first_ref_.end() || !final_index[ref->second.slot] ||
          ref->second.slot == slot) {
        if (warnings_) warnings_->push_back("unresolved footnote reference: " + id);
        continue;
      }
      const std::size_t block = *final_index[ref->second.slot];
      const std::size_t offset = std::min(ref->second.offset, blocks[block].text.size());
      blocks[*final_index[slot]].anchor = FootnoteAnchor{block, offset};
    }
    return blocks;
  }

  const SchemaProfile& profile_;
  Warnings* warnings_;
  std::vector<Slot> slots_;
  std::vector<Open> open_;
  int front_depth_ = 0;
  std::map<std::string, std::size_t> footnote_slot_;
  std::map<std::string, Ref> first_ref_;
};

std::string jats_doc_id(const Node& article) {
  std::vector<const Node*> ids;
  if (const Node* front = article.child("front")) {
    if (const Node* meta = front->child("article-meta")) {
      for (const auto& c : meta->children) {
        if (!c.is_text() && c.name == "article-id") ids.push_back(&c);
      }
    }
  }
  for (const std::string_view wanted : {"pmc", "pmcid", "pmid"}) {
    for (const Node* id : ids) {
      const std::string* type = id->attr("pub-id-type");
      if (!type || *type != wanted) continue;
      std::string value(text::trim(id->inner_text()));
      if (value.empty()) continue;
      if (wanted != "pmid" && std::all_of(value.begin(), value.end(), text::is_ascii_digit)) {
        value = "PMC" + value;
      }
      return value;
    }
  }
  return {};
}

}  // namespace

DocumentRecord parse_medline_record(std::string_view payload, const SchemaProfile& profile,
                                    Warnings* warnings) {
  const std::string clean = text::sanitize_utf8(payload, true);
  const Node root = xml::parse(clean);
  const Node* citation = root.name == "MedlineCitation" ? &root : root.child("MedlineCitation");
  if (citation == nullptr) throw ParseError("record has no MedlineCitation element");

  DocumentRecord doc;
  doc.source_db = SourceDb::PubMed;
  if (const Node* pmid = citation->child("PMID")) {
    doc.doc_id = std::string(text::trim(pmid->inner_text()));
  }
  if (doc.doc_id.empty()) throw ParseError("citation is missing its PMID");

  const Node* article = citation->child("Article");
  text::TextBuilder out;
  YearPicker years;
  if (article != nullptr) {
    if (const Node* title = article->child("ArticleTitle")) append_inline(*title, profile, out);
    if (const Node* abstract = article->child("Abstract")) {
      for (const auto& section : abstract->children) {
        if (section.is_text() || section.name != "AbstractText") continue;
        out.separate();
        append_inline(section, profile, out);
      }
    }
    for (const auto& c : article->children) {
      if (!c.is_text() && c.name == "ArticleDate") years.add(c, "Year", "Month", "Day");
    }
    if (const Node* journal = article->child("Journal")) {
      if (const Node* issue = journal->child("JournalIssue")) {
        if (const Node* date = issue->child("PubDate")) years.add(*date, "Year", "Month", "Day");
      }
    }
  }
  if (text::has_content(out.str())) {
    doc.blocks.push_back({out.str(), BlockKind::TitleAbstract, std::nullopt});
  }
  doc.pub_year = years.year();
  (void)warnings;
  return doc;
}

DocumentRecord parse_jats_article(std::string_view payload, const SchemaProfile& profile,
                                  Warnings* warnings) {
  const std::string clean = text::sanitize_utf8(payload, true);
  const Node root = xml::parse(clean);
  DocumentRecord doc;
  doc.source_db = SourceDb::PMC;
  doc.doc_id = jats_doc_id(root);
  if (doc.doc_id.empty()) throw ParseError("article is missing a pmc/pmcid/pmid article-id");

  YearPicker years;
  std::vector<const Node*> dates;
  if (const Node* front = root.child("front")) {
    if (const Node* meta = front->child("article-meta")) collect(*meta, "pub-date", dates);
  }
  for (const Node* date : dates) years.add(*date, "year", "month", "day");
  doc.pub_year = years.year();

  JatsFlattener flattener(profile, warnings);
  doc.blocks = flattener.run(root);
  return doc;
}

}  // namespace rrd::ingest
