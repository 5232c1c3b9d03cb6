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
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rrd/extract.hpp"
#include "rrd/ingest.hpp"

// Archive-to-mention-log driver. Archives are scanned concurrently, each one
// sequentially; results are committed in input order, so the output does not
// depend on the thread count.
namespace rrd::pipeline {

struct IngestOptions {
  ingest::Schema schema = ingest::Schema::Jats;
  std::optional<ingest::SchemaProfile> profile;  // defaults(schema) when empty
  extract::Extractor extractor;
  std::filesystem::path mentions_out;
  std::filesystem::path census_out;              // empty: no census
  std::optional<std::filesystem::path> rejects_out;
  std::size_t threads = 1;       // archives scanned concurrently
  std::size_t batch_size = 256;  // documents per durable commit
  bool append = false;  // keep existing output files instead of truncating
  bool sync = true;     // fsync every mention batch
};

struct IngestIssue {
  std::string path;
  std::size_t record = 0;  // 0-based record index within the archive
  std::string doc_id;
  std::string message;
};

struct IngestReport {
  std::size_t archives = 0;
  std::size_t records = 0;          // framed records seen
  std::size_t documents = 0;        // successfully parsed and committed
  std::size_t nonempty_documents = 0;
  std::size_t duplicates = 0;       // skipped: doc_id already committed
  std::size_t record_errors = 0;    // skipped: unparseable record
  std::size_t archive_errors = 0;   // archives that stopped early
  std::size_t mentions = 0;
  std::size_t rejects = 0;
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  std::size_t peak_payload_bytes = 0;
  std::vector<IngestIssue> errors;    // record and archive errors
  std::vector<IngestIssue> warnings;  // e.g. unresolved footnotes, duplicates
};

/// Called after each committed batch; the argument is the running report.
using Progress = std::function<void(const IngestReport&)>;

IngestReport run_ingest(const std::vector<std::filesystem::path>& archives,
                        const IngestOptions& options, const Progress& progress = {});

}  // namespace rrd::pipeline
