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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rrd/document.hpp"
#include "rrd/segment.hpp"
#include "rrd/url.hpp"

// Turns segmented text into resource mentions: one per valid URL occurrence,
// carrying its context and document provenance.
namespace rrd::extract {

struct ResourceMention {
  url::NormalizedUrl normalized;
  url::RawUrlSpan raw;
  std::string domain;
  std::string context;
  std::string doc_id;
  SourceDb source_db = SourceDb::PubMed;
  std::optional<int> pub_year;

  friend bool operator==(const ResourceMention&, const ResourceMention&) = default;
};

/// A regex match that failed normalization; kept for auditing.
struct RejectedUrl {
  std::string raw;
  std::string context;
  std::string doc_id;
  SourceDb source_db = SourceDb::PubMed;
  std::string reason;
};

/// Mentions for `sentences[index]`. The context is the sentence extended by up
/// to `window` neighbours on each side, sliced from `block_text` so the
/// original spacing is kept. A non-empty `anchor_context` (the sentence a
/// footnote annotates) is prepended with a single space.
std::vector<ResourceMention> make_mentions(std::span<const segment::Sentence> sentences,
                                           std::size_t index, std::string_view block_text,
                                           const Provenance& provenance, std::size_t window,
                                           std::vector<RejectedUrl>* rejects = nullptr,
                                           std::string_view anchor_context = {});

struct DocumentExtraction {
  std::vector<ResourceMention> mentions;
  std::vector<RejectedUrl> rejects;
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  bool nonempty = false;
};

struct ExtractOptions {
  std::size_t context_window = 0;
};

/// Segments every block of a document and collects its mentions. Footnote
/// mentions take the anchored sentence followed by the footnote text as
/// context.
class Extractor {
 public:
  explicit Extractor(segment::Segmenter segmenter = {}, ExtractOptions options = {});

  DocumentExtraction run(const DocumentRecord& doc) const;

  const segment::Segmenter& segmenter() const noexcept { return segmenter_; }
  const ExtractOptions& options() const noexcept { return options_; }

 private:
  segment::Segmenter segmenter_;
  ExtractOptions options_;
};

}  // namespace rrd::extract
