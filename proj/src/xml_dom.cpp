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

#include "xml_dom.hpp"

#include <expat.h>

#include <map>
#include <memory>

#include "rrd/ingest.hpp"

namespace rrd::xml {
namespace {

const std::map<std::string, std::string, std::less<>>& entity_table() {
  static const std::map<std::string, std::string, std::less<>> table = {
      {"nbsp", "\xC2\xA0"},      {"ndash", "\xE2\x80\x93"},  {"mdash", "\xE2\x80\x94"},
      {"lsquo", "\xE2\x80\x98"}, {"rsquo", "\xE2\x80\x99"},  {"ldquo", "\xE2\x80\x9C"},
      {"rdquo", "\xE2\x80\x9D"}, {"hellip", "\xE2\x80\xA6"}, {"times", "\xC3\x97"},
      {"deg", "\xC2\xB0"},       {"plusmn", "\xC2\xB1"},     {"micro", "\xC2\xB5"},
      {"middot", "\xC2\xB7"},    {"copy", "\xC2\xA9"},       {"reg", "\xC2\xAE"},
      {"trade", "\xE2\x84\xA2"}, {"alpha", "\xCE\xB1"},      {"beta", "\xCE\xB2"},
      {"gamma", "\xCE\xB3"},     {"delta", "\xCE\xB4"},      {"mu", "\xCE\xBC"},
      {"le", "\xE2\x89\xA4"},    {"ge", "\xE2\x89\xA5"},     {"thinsp", "\xE2\x80\x89"},
      {"ensp", "\xE2\x80\x82"},  {"emsp", "\xE2\x80\x83"},
  };
  return table;
}

struct Builder {
  Node root;
  std::vector<Node*> stack;
  bool have_root = false;
};

void append_text(Builder& b, std::string_view s) {
  if (b.stack.empty()) return;
  Node* parent = b.stack.back();
  if (!parent->children.empty() && parent->children.back().is_text()) {
    parent->children.back().text.append(s);
  } else {
    Node text;
    text.text.assign(s);
    parent->children.push_back(std::move(text));
  }
}

void XMLCALL on_start(void* data, const XML_Char* name, const XML_Char** attrs) {
  auto& b = *static_cast<Builder*>(data);
  Node node;
  node.name = name;
  for (std::size_t i = 0; attrs[i] != nullptr; i += 2) {
    node.attrs.emplace_back(attrs[i], attrs[i + 1]);
  }
  if (b.stack.empty()) {
    b.root = std::move(node);
    b.have_root = true;
    b.stack.push_back(&b.root);
    return;
  }
  Node* parent = b.stack.back();
  parent->children.push_back(std::move(node));
  b.stack.push_back(&parent->children.back());
}

void XMLCALL on_end(void* data, const XML_Char*) {
  auto& b = *static_cast<Builder*>(data);
  if (!b.stack.empty()) b.stack.pop_back();
}

void XMLCALL on_text(void* data, const XML_Char* s, int len) {
  append_text(*static_cast<Builder*>(data), std::string_view(s, static_cast<std::size_t>(len)));
}

void XMLCALL on_skipped(void* data, const XML_Char* name, int is_parameter) {
  if (is_parameter) return;
  const auto& table = entity_table();
  const auto it = table.find(std::string_view(name));
  append_text(*static_cast<Builder*>(data),
              it != table.end() ? std::string_view(it->second) : "\xEF\xBF\xBD");
}

struct ParserDeleter {
  void operator()(XML_Parser p) const noexcept { XML_ParserFree(p); }
};

}  // namespace

const std::string* Node::attr(std::string_view key) const noexcept {
  for (const auto& [k, v] : attrs) {
    if (k == key) return &v;
  }
  return nullptr;
}

const Node* Node::child(std::string_view element) const noexcept {
  for (const auto& c : children) {
    if (!c.is_text() && c.name == element) return &c;
  }
  return nullptr;
}

std::string Node::inner_text() const {
  if (is_text()) return text;
  std::string out;
  for (const auto& c : children) out += c.inner_text();
  return out;
}

Node parse(std::string_view payload) {
  // A declared external subset turns undefined entities into skipped-entity
  // callbacks instead of fatal errors. The subset itself is never loaded.
  std::string doc;
  doc.reserve(payload.size() + 64);
  std::string_view rest = payload;
  if (rest.substr(0, 5) == "<?xml") {
    const auto end = rest.find("?>");
    if (end != std::string_view::npos) {
      doc.append(rest.substr(0, end + 2));
      rest.remove_prefix(end + 2);
    }
  }
  if (rest.find("<!DOCTYPE") == std::string_view::npos) {
    doc += "<!DOCTYPE record SYSTEM \"record.dtd\">";
  }
  doc.append(rest);

  std::unique_ptr<XML_ParserStruct, ParserDeleter> parser(XML_ParserCreate("UTF-8"));
  if (!parser) throw ingest::ParseError("cannot allocate XML parser");
  Builder builder;
  XML_SetUserData(parser.get(), &builder);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);
  XML_SetSkippedEntityHandler(parser.get(), on_skipped);
  if (XML_Parse(parser.get(), doc.data(), static_cast<int>(doc.size()), XML_TRUE) ==
      XML_STATUS_ERROR) {
    throw ingest::ParseError(
        std::string("malformed XML: ") + XML_ErrorString(XML_GetErrorCode(parser.get())),
        XML_GetCurrentLineNumber(parser.get()), XML_GetCurrentColumnNumber(parser.get()));
  }
  if (!builder.have_root) throw ingest::ParseError("no root element");
  return std::move(builder.root);
}

}  // namespace rrd::xml
