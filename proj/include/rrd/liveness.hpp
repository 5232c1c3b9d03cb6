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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <future>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

// HTTP(S) availability probing for resource URLs.
namespace rrd::liveness {

enum class LinkStatus {
  Alive,
  Redirected,
  ClientError,
  ServerError,
  Timeout,
  DnsFailure,
  TlsFailure,
  UnsupportedScheme,
  RobotsDisallowed,
};

std::string_view to_string(LinkStatus s) noexcept;
LinkStatus parse_link_status(std::string_view s);

/// http_code is set iff an HTTP response arrived; final_url is set iff the
/// status is Alive or Redirected.
struct LivenessReport {
  std::string url;
  LinkStatus status = LinkStatus::Alive;
  std::optional<int> http_code;
  std::optional<std::string> final_url;
  std::int64_t latency_ms = 0;
  std::string checked_at;  // ISO-8601 UTC
};

nlohmann::ordered_json to_json(const LivenessReport& r);
LivenessReport report_from_json(const nlohmann::ordered_json& j);
std::vector<LivenessReport> read_reports(const std::filesystem::path& path);

struct ProbePolicy {
  std::chrono::milliseconds timeout{10'000};
  int max_redirects = 5;
  std::chrono::milliseconds per_host_interval{1'000};
  std::size_t concurrency = 32;
  std::size_t max_body_bytes = 1;
  std::string user_agent = "rrd-linkcheck/1.0 (+https://example.org/rrd-linkcheck)";
  bool honor_robots = true;
  std::chrono::milliseconds robots_timeout{2'000};
  bool verify_tls = true;
};

/// Called when a request starts, after politeness waiting.
struct RequestEvent {
  std::string host;
  std::string method;
  std::string url;
  std::chrono::steady_clock::time_point start;
};
using RequestObserver = std::function<void(const RequestEvent&)>;

/// Reserves request start slots so that consecutive starts for one host are
/// at least `interval` apart. Returns the granted start time.
class HostThrottle {
 public:
  std::chrono::steady_clock::time_point wait_turn(const std::string& host,
                                                  std::chrono::milliseconds interval);

 private:
  std::mutex mutex_;
  std::unordered_map<std::string, std::chrono::steady_clock::time_point> next_;
};

/// Parsed robots.txt rules for one user agent.
class RobotsRules {
 public:
  RobotsRules() = default;
  static RobotsRules parse(std::string_view content, std::string_view user_agent);
  bool allowed(std::string_view path) const;

 private:
  struct Rule {
    std::string pattern;
    bool allow = false;
  };
  std::vector<Rule> rules_;
};

class LinkChecker {
 public:
  explicit LinkChecker(ProbePolicy policy = {}, RequestObserver observer = {});

  /// Never throws for network failures; they are encoded in the status.
  LivenessReport check(std::string_view url);

  /// Checks every URL with at most `policy.concurrency` requests in flight.
  /// `sink` receives (input index, report) once per input, possibly out of
  /// order, serialized on an internal mutex.
  void check_all(std::span<const std::string> urls,
                 const std::function<void(std::size_t, LivenessReport)>& sink);
  std::vector<LivenessReport> check_all(std::span<const std::string> urls);

  const ProbePolicy& policy() const noexcept { return policy_; }

 private:
  bool robots_allow(const std::string& origin, const std::string& host, const std::string& path);

  ProbePolicy policy_;
  RequestObserver observer_;
  HostThrottle throttle_;
  std::mutex robots_mutex_;
  std::unordered_map<std::string, std::shared_future<RobotsRules>> robots_;
};

}  // namespace rrd::liveness
