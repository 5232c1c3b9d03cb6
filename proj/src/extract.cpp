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

#include "rrd/extract.hpp"

#include <algorithm>

#include "rrd/text.hpp"

namespace rrd::extract {

std::vector<ResourceMention> make_mentions(std::span<const segment::Sentence> sentences,
                                           std::size_t index, std::string_view block_text,
                                           const Provenance& provenance, std::size_t window,
                                           std::vector<RejectedUrl>* rejects,
                                           std::string_view anchor_context) {
  std::vector<ResourceMention> out;
  if (index >= sentences.size()) return out;
  const auto& sentence = sentences[index];
  const auto spans = url::find_urls(sentence.text);
  if (spans.empty()) return out;

  const std::size_t lo = index >= window ? index - window : 0;
  const std::size_t hi = std::min(sentences.size() - 1, index + window);
  std::string context;
  if (!anchor_context.empty()) {
    context.assign(anchor_context);
    context += ' ';
  }
  if (window == 0 || block_text.empty()) {
    context += sentence.text;
  } else {
    const std::size_t from = sentences[lo].start_offset;
    context += block_text.substr(from, sentences[hi].end_offset - from);
  }

  for (const auto& span : spans) {
    auto normalized = url::try_normalize(span.matched_text);
    if (!normalized) {
      if (rejects) {
        rejects->push_back({span.matched_text, context, provenance.doc_id, provenance.source_db,
                            "empty host"});
      }
      continue;
    }
    ResourceMention m;
    m.domain = url::extract_domain(*normalized);
    m.normalized = std::move(*normalized);
    m.raw = span;
    m.context = context;
    m.doc_id = provenance.doc_id;
    m.source_db = provenance.source_db;
    m.pub_year = provenance.pub_year;
    out.push_back(std::move(m));
  }
  return out;
}

Extractor::Extractor(segment::Segmenter segmenter, ExtractOptions options)
    : segmenter_(std::move(segmenter)), options_(options) {}

namespace {

// Sentence of `sentences` that holds byte `offset`, or the last one before it.
const segment::Sentence* sentence_at(const std::vector<segment::Sentence>& sentences,
                                     std::size_t offset) {
  const segment::Sentence* best = nullptr;
  for (const auto& s : sentences) {
    if (s.start_offset > offset) break;
    best = &s;
  }
  if (best == nullptr && !sentences.empty()) best = &sentences.front();
  return best;
}

}  // namespace

DocumentExtraction Extractor::run(const DocumentRecord& doc) const {
  DocumentExtraction result;
  result.tokens = doc.token_count();
  result.nonempty = doc.has_content();
  const Provenance provenance = provenance_of(doc);

  std::vector<std::vector<segment::Sentence>> segmented;
  segmented.reserve(doc.blocks.size());
  for (const auto& block : doc.blocks) {
    segmented.push_back(segmenter_.segment(block));
    result.sentences += segmented.back().size();
  }

  for (std::size_t b = 0; b < doc.blocks.size(); ++b) {
    const auto& block = doc.blocks[b];
    const auto& sentences = segmented[b];
    std::string_view anchor_context;
    if (block.kind == BlockKind::Footnote && block.anchor && block.anchor->block < segmented.size()) {
      if (const auto* anchored = sentence_at(segmented[block.anchor->block], block.anchor->offset)) {
        anchor_context = anchored->text;
      }
    }
    // A footnote's context is the annotated sentence plus the whole footnote.
    const std::size_t window =
        anchor_context.empty() ? options_.context_window : sentences.size();
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      auto found = make_mentions(sentences, i, block.text, provenance, window, &result.rejects,
                                 anchor_context);
      std::move(found.begin(), found.end(), std::back_inserter(result.mentions));
    }
  }
  return result;
}

}  // namespace rrd::extract
