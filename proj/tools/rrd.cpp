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

// rrd: command-line front end for the research resource toolkit.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <httplib.h>

#include "rrd/api.hpp"
#include "rrd/ingest.hpp"
#include "rrd/liveness.hpp"
#include "rrd/pipeline.hpp"
#include "rrd/popularity.hpp"
#include "rrd/query.hpp"
#include "rrd/segment.hpp"
#include "rrd/store.hpp"

namespace {

using rrd::store::Json;
namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
  } else {
    write_file(out_path, content);
  }
}

struct IngestArgs {
  std::string schema;
  std::string out;
  std::string census;
  std::string profile;
  std::string abbreviations;
  std::string rejects;
  std::vector<std::string> inputs;
  std::size_t context_window = 0;
  std::size_t threads = 1;
  bool keep_invalid = false;
  bool append = false;
  bool no_sync = false;
  bool quiet = false;
};

int run_ingest(const IngestArgs& a) {
  rrd::pipeline::IngestOptions options;
  options.schema = rrd::ingest::parse_schema(a.schema);
  if (!a.profile.empty()) {
    options.profile = rrd::ingest::load_schema_profile(
        a.profile, rrd::ingest::SchemaProfile::defaults(options.schema));
  }
  rrd::segment::Segmenter segmenter = a.abbreviations.empty()
                                          ? rrd::segment::Segmenter()
                                          : rrd::segment::Segmenter(
                                                rrd::segment::load_abbreviations(a.abbreviations));
  options.extractor = rrd::extract::Extractor(std::move(segmenter), {a.context_window});
  options.mentions_out = a.out;
  options.census_out = a.census.empty() ? fs::path(a.out + ".census.jsonl") : fs::path(a.census);
  if (a.keep_invalid) {
    options.rejects_out = a.rejects.empty() ? fs::path(a.out + ".rejects.jsonl") : fs::path(a.rejects);
  }
  options.threads = a.threads;
  options.append = a.append;
  options.sync = !a.no_sync;

  std::vector<fs::path> inputs(a.inputs.begin(), a.inputs.end());
  const auto report = rrd::pipeline::run_ingest(inputs, options);

  if (!a.quiet) {
    for (const auto& w : report.warnings) {
      std::cerr << "warning: " << w.path << " record " << w.record;
      if (!w.doc_id.empty()) std::cerr << " (" << w.doc_id << ")";
      std::cerr << ": " << w.message << '\n';
    }
  }
  for (const auto& e : report.errors) {
    std::cerr << "error: " << e.path << " record " << e.record << ": " << e.message << '\n';
  }
  const Json summary{{"archives", report.archives},
                     {"records", report.records},
                     {"documents", report.documents},
                     {"nonempty_documents", report.nonempty_documents},
                     {"duplicates", report.duplicates},
                     {"record_errors", report.record_errors},
                     {"archive_errors", report.archive_errors},
                     {"sentences", report.sentences},
                     {"tokens", report.tokens},
                     {"mentions", report.mentions},
                     {"rejects", report.rejects}};
  std::cout << summary.dump() << '\n';
  return report.archive_errors > 0 ? 2 : 0;
}

int run_merge(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<rrd::extract::ResourceMention> mentions;
  for (const auto& in : inputs) {
    rrd::store::for_each_mention(in, [&](rrd::extract::ResourceMention&& m) {
      mentions.push_back(std::move(m));
    });
  }
  const auto records = rrd::store::merge_by_url(mentions);
  rrd::store::write_snapshot(out, records);
  std::cout << Json{{"mentions", mentions.size()}, {"resources", records.size()}}.dump() << '\n';
  return 0;
}

int run_stats(const std::vector<std::string>& mention_logs, const std::vector<std::string>& censuses,
              const std::string& json_out, const std::string& csv_out) {
  std::vector<rrd::extract::ResourceMention> mentions;
  for (const auto& in : mention_logs) {
    auto part = rrd::store::read_mentions(in);
    std::move(part.begin(), part.end(), std::back_inserter(mentions));
  }
  std::vector<rrd::store::CensusEntry> census;
  for (const auto& in : censuses) {
    auto part = rrd::store::read_census(in);
    std::move(part.begin(), part.end(), std::back_inserter(census));
  }
  std::vector<rrd::store::CorpusStats> stats;
  for (const auto db : {rrd::SourceDb::PubMed, rrd::SourceDb::PMC}) {
    stats.push_back(rrd::store::compute_corpus_stats(mentions, db, census));
  }
  Json j = Json::array();
  for (const auto& s : stats) j.push_back(rrd::store::to_json(s));
  emit(json_out, j.dump(2) + "\n");
  if (!csv_out.empty()) write_file(csv_out, rrd::store::stats_to_csv(stats));
  return 0;
}

int run_overlap(const std::string& a_path, const std::string& b_path, const std::string& from,
                const std::string& to) {
  auto a = rrd::store::read_snapshot(a_path);
  auto b = b_path.empty() ? a : rrd::store::read_snapshot(b_path);
  if (!from.empty()) a = rrd::store::filter_source(a, rrd::parse_source_db(from));
  if (!to.empty()) b = rrd::store::filter_source(b, rrd::parse_source_db(to));
  const double pct = rrd::store::compute_overlap(a, b);
  std::cout << Json{{"a_unique", a.size()}, {"b_unique", b.size()}, {"overlap_pct", pct}}.dump()
            << '\n';
  return 0;
}

int run_analyze(const std::string& kind, const std::string& in, const std::string& out,
                const std::string& fit_out) {
  const auto records = rrd::store::read_snapshot(in);
  const auto k = rrd::popularity::parse_freq_kind(kind);
  const auto dist = k == rrd::popularity::FreqKind::Url ? rrd::popularity::url_frequency(records)
                                                        : rrd::popularity::domain_frequency(records);
  emit(out, rrd::popularity::loglog_csv(rrd::popularity::emit_loglog_points(dist)));
  if (!fit_out.empty()) {
    const auto fit = rrd::popularity::fit_power_law(dist);
    write_file(fit_out, Json{{"alpha", fit.alpha},
                             {"x_min", fit.x_min},
                             {"n_tail", fit.n_tail},
                             {"ks_distance", fit.ks_distance}}
                                .dump(2) +
                            "\n");
  }
  return 0;
}

struct CheckArgs {
  std::string in;
  std::string out;
  long timeout_ms = 10'000;
  int max_redirects = 5;
  long interval_ms = 1'000;
  std::size_t concurrency = 32;
  std::string user_agent;
  bool ignore_robots = false;
  bool insecure = false;
};

int run_check(const CheckArgs& a) {
  const auto records = rrd::store::read_snapshot(a.in);
  std::vector<std::string> urls;
  urls.reserve(records.size());
  for (const auto& r : records) urls.push_back(r.normalized_url);

  rrd::liveness::ProbePolicy policy;
  policy.timeout = std::chrono::milliseconds(a.timeout_ms);
  policy.max_redirects = a.max_redirects;
  policy.per_host_interval = std::chrono::milliseconds(a.interval_ms);
  policy.concurrency = a.concurrency;
  if (!a.user_agent.empty()) policy.user_agent = a.user_agent;
  policy.honor_robots = !a.ignore_robots;
  policy.verify_tls = !a.insecure;

  const fs::path out(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream file(out, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write " + a.out);
  std::map<std::string, std::size_t> counts;
  rrd::liveness::LinkChecker checker(policy);
  checker.check_all(urls, [&](std::size_t, rrd::liveness::LivenessReport report) {
    ++counts[std::string(rrd::liveness::to_string(report.status))];
    file << rrd::liveness::to_json(report).dump() << '\n';
    file.flush();
  });
  Json summary = Json::object();
  for (const auto& [status, n] : counts) summary[status] = n;
  std::cout << summary.dump() << '\n';
  return file ? 0 : 1;
}

httplib::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

int run_serve(const std::string& snapshot, const std::string& liveness_path, const std::string& host,
              int port) {
  auto records = rrd::store::read_snapshot(snapshot);
  std::vector<rrd::liveness::LivenessReport> reports;
  if (!liveness_path.empty()) reports = rrd::liveness::read_reports(liveness_path);
  rrd::api::ResourceApi api(rrd::query::SearchIndex::build(std::move(records), reports));

  httplib::Server server;
  api.mount(server);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "serving " << api.index()->size() << " resources on http://" << host << ':' << port
            << '\n';
  if (!server.listen(host, port)) {
    std::cerr << "error: cannot listen on " << host << ':' << port << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Research resource discovery toolkit"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Extract URL mentions from MEDLINE or JATS archives");
  ingest_cmd->add_option("--schema", ingest.schema, "Input schema")
      ->required()
      ->check(CLI::IsMember({"medline", "jats"}));
  ingest_cmd->add_option("--out", ingest.out, "Mention log (JSONL)")->required();
  ingest_cmd->add_option("paths", ingest.inputs, ".xml or .xml.gz archives")
      ->required()
      ->check(CLI::ExistingFile);
  ingest_cmd->add_option("--census", ingest.census,
                         "Per-document census (default: <out>.census.jsonl)");
  ingest_cmd->add_option("--profile", ingest.profile, "Schema profile file")
      ->check(CLI::ExistingFile);
  ingest_cmd->add_option("--abbreviations", ingest.abbreviations, "Abbreviation list file")
      ->check(CLI::ExistingFile);
  ingest_cmd->add_option("--context-window", ingest.context_window,
                         "Neighbouring sentences on each side of a mention's context");
  ingest_cmd->add_flag("--keep-invalid", ingest.keep_invalid,
                       "Write rejected URL matches to a sidecar file");
  ingest_cmd->add_option("--rejects", ingest.rejects,
                         "Sidecar for --keep-invalid (default: <out>.rejects.jsonl)");
  ingest_cmd->add_option("--threads", ingest.threads, "Archives processed concurrently")
      ->check(CLI::PositiveNumber);
  ingest_cmd->add_flag("--append", ingest.append, "Append to existing outputs");
  ingest_cmd->add_flag("--no-sync", ingest.no_sync, "Skip fsync after each batch");
  ingest_cmd->add_flag("-q,--quiet", ingest.quiet, "Do not print warnings");

  std::vector<std::string> merge_in;
  std::string merge_out;
  auto* merge_cmd = app.add_subcommand("merge", "Merge mention logs into a per-URL snapshot");
  merge_cmd->add_option("--in", merge_in, "Mention logs")->required()->check(CLI::ExistingFile);
  merge_cmd->add_option("--out", merge_out, "Snapshot (JSONL)")->required();

  std::vector<std::string> stats_mentions;
  std::vector<std::string> stats_census;
  std::string stats_json;
  std::string stats_csv;
  auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics per source database");
  stats_cmd->add_option("--mentions", stats_mentions, "Mention logs")
      ->required()
      ->check(CLI::ExistingFile);
  stats_cmd->add_option("--census", stats_census, "Census files")
      ->required()
      ->check(CLI::ExistingFile);
  stats_cmd->add_option("--json", stats_json, "JSON output (default: stdout)");
  stats_cmd->add_option("--csv", stats_csv, "CSV output");

  std::string overlap_a;
  std::string overlap_b;
  std::string overlap_from;
  std::string overlap_to;
  auto* overlap_cmd =
      app.add_subcommand("overlap", "Percentage of A's unique URLs also present in B");
  overlap_cmd->add_option("--a", overlap_a, "Snapshot A")->required()->check(CLI::ExistingFile);
  overlap_cmd->add_option("--b", overlap_b, "Snapshot B (default: A)")->check(CLI::ExistingFile);
  overlap_cmd->add_option("--a-source", overlap_from, "Restrict A to pubmed or pmc mentions");
  overlap_cmd->add_option("--b-source", overlap_to, "Restrict B to pubmed or pmc mentions");

  std::string analyze_kind;
  std::string analyze_in;
  std::string analyze_out;
  std::string analyze_fit;
  auto* analyze_cmd = app.add_subcommand("analyze", "Frequency distribution and power-law fit");
  analyze_cmd->add_option("--kind", analyze_kind, "url or domain")
      ->required()
      ->check(CLI::IsMember({"url", "domain"}));
  analyze_cmd->add_option("--in", analyze_in, "Snapshot")->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--out", analyze_out, "Log-log points CSV (default: stdout)");
  analyze_cmd->add_option("--fit", analyze_fit, "Power-law fit JSON");

  CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "Probe resource URLs for availability");
  check_cmd->add_option("--in", check.in, "Snapshot")->required()->check(CLI::ExistingFile);
  check_cmd->add_option("--out", check.out, "Liveness reports (JSONL)")->required();
  check_cmd->add_option("--timeout-ms", check.timeout_ms, "Per-request timeout")
      ->check(CLI::PositiveNumber);
  check_cmd->add_option("--max-redirects", check.max_redirects, "Redirects to follow")
      ->check(CLI::NonNegativeNumber);
  check_cmd->add_option("--per-host-interval-ms", check.interval_ms,
                        "Minimum spacing of requests to one host")
      ->check(CLI::NonNegativeNumber);
  check_cmd->add_option("--concurrency", check.concurrency, "Requests in flight")
      ->check(CLI::PositiveNumber);
  check_cmd->add_option("--user-agent", check.user_agent, "User-Agent header");
  check_cmd->add_flag("--ignore-robots", check.ignore_robots, "Do not consult robots.txt");
  check_cmd->add_flag("--insecure", check.insecure, "Skip TLS certificate verification");

  std::string serve_snapshot;
  std::string serve_liveness;
  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the resource API over HTTP");
  serve_cmd->add_option("--snapshot", serve_snapshot, "Snapshot")
      ->required()
      ->check(CLI::ExistingFile);
  serve_cmd->add_option("--liveness", serve_liveness, "Liveness reports")
      ->check(CLI::ExistingFile);
  serve_cmd->add_option("--host", serve_host, "Bind address");
  serve_cmd->add_option("--port", serve_port, "Port")->check(CLI::Range(1, 65535));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest_cmd) return run_ingest(ingest);
    if (*merge_cmd) return run_merge(merge_in, merge_out);
    if (*stats_cmd) return run_stats(stats_mentions, stats_census, stats_json, stats_csv);
    if (*overlap_cmd) return run_overlap(overlap_a, overlap_b, overlap_from, overlap_to);
    if (*analyze_cmd) return run_analyze(analyze_kind, analyze_in, analyze_out, analyze_fit);
    if (*check_cmd) return run_check(check);
    if (*serve_cmd) return run_serve(serve_snapshot, serve_liveness, serve_host, serve_port);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
