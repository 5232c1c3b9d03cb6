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

#include "rrd/pipeline.hpp"

#include <atomic>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>
#include <utility>

#include "rrd/store.hpp"

namespace rrd::pipeline {
namespace {

using store::Json;

// Everything one record contributes to the outputs.
struct DocResult {
  std::size_t index = 0;
  bool ok = false;
  std::string error;
  std::string doc_id;
  SourceDb source_db = SourceDb::PubMed;
  ingest::Warnings warnings;
  extract::DocumentExtraction extraction;
};

struct ArchiveSummary {
  std::size_t records = 0;
  std::size_t peak_payload_bytes = 0;
  std::optional<std::string> error;
};

DocResult process(const ingest::RawArticle& raw, ingest::Schema schema,
                  const ingest::SchemaProfile& profile, const extract::Extractor& extractor) {
  DocResult out;
  out.index = raw.index;
  try {
    const DocumentRecord doc =
        schema == ingest::Schema::Medline
            ? ingest::parse_medline_record(raw.payload, profile, &out.warnings)
            : ingest::parse_jats_article(raw.payload, profile, &out.warnings);
    out.doc_id = doc.doc_id;
    out.source_db = doc.source_db;
    out.extraction = extractor.run(doc);
    out.ok = true;
  } catch (const ingest::ParseError& e) {
    out.error = e.what();
    if (e.line() > 0) {
      out.error += " (line " + std::to_string(e.line()) + ", column " +
                   std::to_string(e.column()) + ")";
    }
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

// Reads one archive sequentially and hands each record's result to `emit`.
ArchiveSummary scan_archive(const std::filesystem::path& path, const ingest::SchemaProfile& profile,
                            const IngestOptions& options,
                            const std::function<void(DocResult&&)>& emit) {
  ArchiveSummary summary;
  try {
    ingest::ArchiveReader reader(path, profile.record_elements);
    try {
      while (auto raw = reader.next()) {
        ++summary.records;
        emit(process(*raw, options.schema, profile, options.extractor));
      }
    } catch (const ingest::ArchiveError& e) {
      summary.error = e.what();
    }
    summary.peak_payload_bytes = reader.peak_payload_bytes();
  } catch (const ingest::ArchiveError& e) {
    summary.error = e.what();
  }
  return summary;
}

Json reject_json(const extract::RejectedUrl& r) {
  return Json{{"raw", r.raw},
              {"reason", r.reason},
              {"doc_id", r.doc_id},
              {"source_db", to_string(r.source_db)},
              {"context", r.context}};
}

extract::RejectedUrl reject_from_json(const Json& j) {
  return {j.at("raw").get<std::string>(), j.at("context").get<std::string>(),
          j.at("doc_id").get<std::string>(), parse_source_db(j.at("source_db").get<std::string>()),
          j.at("reason").get<std::string>()};
}

// Spool format: one JSON object per line, "doc" lines followed by one "end".
Json spool_json(const DocResult& r) {
  Json j{{"type", "doc"}, {"index", r.index}, {"ok", r.ok}};
  if (!r.ok) {
    j["error"] = r.error;
    return j;
  }
  const auto& ex = r.extraction;
  j["doc_id"] = r.doc_id;
  j["source_db"] = to_string(r.source_db);
  j["warnings"] = r.warnings;
  j["sentences"] = ex.sentences;
  j["tokens"] = ex.tokens;
  j["nonempty"] = ex.nonempty;
  Json mentions = Json::array();
  for (const auto& m : ex.mentions) mentions.push_back(store::to_json(m));
  j["mentions"] = std::move(mentions);
  Json rejects = Json::array();
  for (const auto& x : ex.rejects) rejects.push_back(reject_json(x));
  j["rejects"] = std::move(rejects);
  return j;
}

DocResult spool_doc(const Json& j) {
  DocResult r;
  r.index = j.at("index").get<std::size_t>();
  r.ok = j.at("ok").get<bool>();
  if (!r.ok) {
    r.error = j.at("error").get<std::string>();
    return r;
  }
  r.doc_id = j.at("doc_id").get<std::string>();
  r.source_db = parse_source_db(j.at("source_db").get<std::string>());
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  auto& ex = r.extraction;
  ex.sentences = j.at("sentences").get<std::size_t>();
  ex.tokens = j.at("tokens").get<std::size_t>();
  ex.nonempty = j.at("nonempty").get<bool>();
  for (const auto& m : j.at("mentions")) ex.mentions.push_back(store::mention_from_json(m));
  for (const auto& x : j.at("rejects")) ex.rejects.push_back(reject_from_json(x));
  return r;
}

void truncate(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw store::StoreError("cannot create " + p.string());
}

// Single writer for all outputs. Applies duplicate detection in commit order.
class Committer {
 public:
  Committer(const IngestOptions& options, IngestReport& report, const Progress& progress)
      : options_(options),
        report_(report),
        progress_(progress),
        log_(options.mentions_out, options.sync) {
    if (options.rejects_out) {
      rejects_.open(*options.rejects_out, std::ios::binary | std::ios::app);
      if (!rejects_) throw store::StoreError("cannot open " + options.rejects_out->string());
    }
  }

  void accept(const std::string& archive, DocResult&& r) {
    if (!r.ok) {
      ++report_.record_errors;
      report_.errors.push_back({archive, r.index, {}, std::move(r.error)});
      return;
    }
    if (!seen_.emplace(r.source_db, r.doc_id).second) {
      ++report_.duplicates;
      report_.warnings.push_back({archive, r.index, r.doc_id, "duplicate doc_id skipped"});
      return;
    }
    for (auto& w : r.warnings) report_.warnings.push_back({archive, r.index, r.doc_id, std::move(w)});
    auto& ex = r.extraction;
    ++report_.documents;
    if (ex.nonempty) ++report_.nonempty_documents;
    report_.sentences += ex.sentences;
    report_.tokens += ex.tokens;
    report_.mentions += ex.mentions.size();
    report_.rejects += ex.rejects.size();
    census_.push_back({r.doc_id, r.source_db, ex.tokens, ex.nonempty});
    std::move(ex.mentions.begin(), ex.mentions.end(), std::back_inserter(mentions_));
    if (rejects_.is_open()) {
      for (const auto& x : ex.rejects) reject_lines_ += reject_json(x).dump() + '\n';
    }
    if (census_.size() >= std::max<std::size_t>(1, options_.batch_size)) flush();
  }

  void flush() {
    if (census_.empty() && mentions_.empty() && reject_lines_.empty()) return;
    log_.append(mentions_);
    if (!options_.census_out.empty()) store::append_census(options_.census_out, census_);
    if (!reject_lines_.empty()) {
      rejects_ << reject_lines_;
      rejects_.flush();
      if (!rejects_) throw store::StoreError("cannot write " + options_.rejects_out->string());
    }
    mentions_.clear();
    census_.clear();
    reject_lines_.clear();
    if (progress_) progress_(report_);
  }

 private:
  const IngestOptions& options_;
  IngestReport& report_;
  const Progress& progress_;
  store::MentionLog log_;
  std::ofstream rejects_;
  std::set<std::pair<SourceDb, std::string>> seen_;
  std::vector<extract::ResourceMention> mentions_;
  std::vector<store::CensusEntry> census_;
  std::string reject_lines_;
};

void finish_archive(IngestReport& report, const std::string& name, const ArchiveSummary& s) {
  ++report.archives;
  report.records += s.records;
  report.peak_payload_bytes = std::max(report.peak_payload_bytes, s.peak_payload_bytes);
  if (s.error) {
    ++report.archive_errors;
    report.errors.push_back({name, s.records, {}, *s.error});
  }
}

}  // namespace

IngestReport run_ingest(const std::vector<std::filesystem::path>& archives,
                        const IngestOptions& options, const Progress& progress) {
  const ingest::SchemaProfile profile =
      options.profile ? *options.profile : ingest::SchemaProfile::defaults(options.schema);

  if (!options.append) {
    truncate(options.mentions_out);
    if (!options.census_out.empty()) truncate(options.census_out);
    if (options.rejects_out) truncate(*options.rejects_out);
  }

  IngestReport report;
  Committer committer(options, report, progress);
  const std::size_t workers = std::min(std::max<std::size_t>(1, options.threads), archives.size());

  if (workers <= 1) {
    for (const auto& path : archives) {
      const std::string name = path.string();
      const auto summary = scan_archive(path, profile, options, [&](DocResult&& r) {
        committer.accept(name, std::move(r));
      });
      committer.flush();
      finish_archive(report, name, summary);
    }
    return report;
  }

  // Each worker spools one archive at a time next to the mention log; the
  // calling thread commits spools strictly in input order.
  const auto spool_path = [&](std::size_t k) {
    auto p = options.mentions_out;
    p += ".spool-" + std::to_string(k);
    return p;
  };
  std::mutex mu;
  std::condition_variable cv;
  std::vector<std::optional<ArchiveSummary>> done(archives.size());
  std::vector<std::string> failures(archives.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};

  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < archives.size() && !stop; k = next++) {
        ArchiveSummary summary;
        std::string failure;
        try {
          std::ofstream spool(spool_path(k), std::ios::binary | std::ios::trunc);
          if (!spool) throw store::StoreError("cannot create " + spool_path(k).string());
          summary = scan_archive(archives[k], profile, options, [&](DocResult&& r) {
            spool << spool_json(r).dump() << '\n';
          });
          spool.flush();
          if (!spool) throw store::StoreError("cannot write " + spool_path(k).string());
        } catch (const std::exception& e) {
          failure = e.what();
        }
        std::lock_guard lock(mu);
        done[k] = std::move(summary);
        failures[k] = std::move(failure);
        cv.notify_all();
      }
    });
  }

  const auto cleanup = [&] {
    stop = true;
    pool.clear();
    for (std::size_t k = 0; k < archives.size(); ++k) std::filesystem::remove(spool_path(k));
  };
  try {
    for (std::size_t k = 0; k < archives.size(); ++k) {
      ArchiveSummary summary;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return done[k].has_value(); });
        summary = *done[k];
        if (!failures[k].empty()) throw store::StoreError(failures[k]);
      }
      const std::string name = archives[k].string();
      std::ifstream spool(spool_path(k), std::ios::binary);
      std::string line;
      while (std::getline(spool, line)) {
        committer.accept(name, spool_doc(Json::parse(line)));
      }
      spool.close();
      std::filesystem::remove(spool_path(k));
      committer.flush();
      finish_archive(report, name, summary);
    }
  } catch (...) {
    cleanup();
    throw;
  }
  cleanup();
  return report;
}

}  // namespace rrd::pipeline
