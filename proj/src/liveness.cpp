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

#include "rrd/liveness.hpp"

#include <netdb.h>
#include <sys/socket.h>

#include <httplib.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <ctime>
#include <fstream>
#include <thread>

#include "rrd/text.hpp"

namespace rrd::liveness {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::array<std::pair<LinkStatus, std::string_view>, 9> kStatusNames = {{
    {LinkStatus::Alive, "Alive"},
    {LinkStatus::Redirected, "Redirected"},
    {LinkStatus::ClientError, "ClientError"},
    {LinkStatus::ServerError, "ServerError"},
    {LinkStatus::Timeout, "Timeout"},
    {LinkStatus::DnsFailure, "DnsFailure"},
    {LinkStatus::TlsFailure, "TlsFailure"},
    {LinkStatus::UnsupportedScheme, "UnsupportedScheme"},
    {LinkStatus::RobotsDisallowed, "RobotsDisallowed"},
}};

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Target {
  std::string scheme;     // lowercase
  std::string authority;  // host[:port], userinfo removed
  std::string host;       // lowercase, no port
  std::string path;       // path + query, at least "/"

  std::string origin() const { return scheme + "://" + authority; }
  std::string url() const { return origin() + path; }
};

std::optional<Target> split_url(std::string_view url) {
  const auto sep = url.find("://");
  if (sep == std::string_view::npos || sep == 0) return std::nullopt;
  Target t;
  t.scheme = text::to_lower_ascii(url.substr(0, sep));
  std::string_view rest = url.substr(sep + 3);
  const auto auth_end = std::min(rest.find_first_of("/?#"), rest.size());
  std::string_view authority = rest.substr(0, auth_end);
  if (const auto at = authority.rfind('@'); at != std::string_view::npos) {
    authority.remove_prefix(at + 1);
  }
  if (authority.empty()) return std::nullopt;
  t.authority = text::to_lower_ascii(authority);
  std::string_view host = t.authority;
  if (!host.empty() && host.front() == '[') {
    host = host.substr(0, host.find(']') + 1);
  } else if (const auto colon = host.rfind(':'); colon != std::string_view::npos) {
    host = host.substr(0, colon);
  }
  t.host = std::string(host);
  std::string_view path = rest.substr(auth_end);
  if (const auto hash = path.find('#'); hash != std::string_view::npos) path = path.substr(0, hash);
  t.path = path.empty() || path.front() != '/' ? "/" + std::string(path) : std::string(path);
  return t;
}

// Resolves a Location header against the URL it came from.
std::string resolve_location(const Target& base, std::string_view location) {
  location = text::trim(location);
  if (location.find("://") != std::string_view::npos) return std::string(location);
  if (location.starts_with("//")) return base.scheme + ":" + std::string(location);
  if (location.starts_with("/")) return base.origin() + std::string(location);
  std::string dir = base.path.substr(0, base.path.find('?'));
  dir = dir.substr(0, dir.rfind('/') + 1);
  return base.origin() + dir + std::string(location);
}

bool is_ip_literal(std::string_view host) {
  if (!host.empty() && host.front() == '[') return true;
  return std::all_of(host.begin(), host.end(),
                     [](char c) { return text::is_ascii_digit(c) || c == '.'; });
}

bool resolves(const std::string& host) {
  if (is_ip_literal(host)) return true;
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* result = nullptr;
  const int rc = ::getaddrinfo(host.c_str(), nullptr, &hints, &result);
  if (result) ::freeaddrinfo(result);
  return rc == 0;
}

struct Exchange {
  std::optional<int> status;
  std::string location;
  httplib::Error error = httplib::Error::Success;
  Clock::duration elapsed{};
};

}  // namespace

std::string_view to_string(LinkStatus s) noexcept {
  for (const auto& [status, name] : kStatusNames) {
    if (status == s) return name;
  }
  return "Unknown";
}

LinkStatus parse_link_status(std::string_view s) {
  for (const auto& [status, name] : kStatusNames) {
    if (name == s) return status;
  }
  throw std::invalid_argument("unknown link status: " + std::string(s));
}

nlohmann::ordered_json to_json(const LivenessReport& r) {
  nlohmann::ordered_json j;
  j["url"] = r.url;
  j["status"] = to_string(r.status);
  if (r.http_code) j["http_code"] = *r.http_code;
  if (r.final_url) j["final_url"] = *r.final_url;
  j["latency_ms"] = r.latency_ms;
  j["checked_at"] = r.checked_at;
  return j;
}

LivenessReport report_from_json(const nlohmann::ordered_json& j) {
  LivenessReport r;
  r.url = j.at("url").get<std::string>();
  r.status = parse_link_status(j.at("status").get<std::string>());
  if (j.contains("http_code") && !j["http_code"].is_null()) r.http_code = j["http_code"].get<int>();
  if (j.contains("final_url") && !j["final_url"].is_null()) {
    r.final_url = j["final_url"].get<std::string>();
  }
  r.latency_ms = j.value("latency_ms", std::int64_t{0});
  r.checked_at = j.value("checked_at", std::string());
  return r;
}

std::vector<LivenessReport> read_reports(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read liveness reports " + path.string());
  std::vector<LivenessReport> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(report_from_json(nlohmann::ordered_json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

Clock::time_point HostThrottle::wait_turn(const std::string& host,
                                           std::chrono::milliseconds interval) {
  std::unique_lock lock(mutex_);
  for (;;) {
    const auto now = Clock::now();
    auto& next = next_[host];
    if (now >= next) {
      next = now + interval;
      return now;
    }
    const auto until = next;
    lock.unlock();
    std::this_thread::sleep_until(until);
    lock.lock();
  }
}

// --- robots.txt -------------------------------------------------------------

namespace {

// Pattern match with '*' wildcards and an optional trailing '$' anchor;
// unanchored patterns match any path they are a prefix of.
bool robots_match(std::string_view pattern, std::string_view path) {
  const bool anchored = !pattern.empty() && pattern.back() == '$';
  if (anchored) pattern.remove_suffix(1);
  std::size_t p = 0;
  std::size_t s = 0;
  std::size_t star = std::string_view::npos;
  std::size_t resume = 0;
  for (;;) {
    if (p == pattern.size()) {
      if (!anchored || s == path.size()) return true;
    } else if (pattern[p] == '*') {
      star = p++;
      resume = s;
      continue;
    } else if (s < path.size() && pattern[p] == path[s]) {
      ++p;
      ++s;
      continue;
    }
    if (star == std::string_view::npos || resume >= path.size()) return false;
    p = star + 1;
    s = ++resume;
  }
}

}  // namespace

RobotsRules RobotsRules::parse(std::string_view content, std::string_view user_agent) {
  const std::string token =
      text::to_lower_ascii(user_agent.substr(0, user_agent.find_first_of("/ ")));

  struct Group {
    std::vector<std::string> agents;
    std::vector<Rule> rules;
  };
  std::vector<Group> groups;
  bool last_was_agent = false;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto eol = content.find('\n', pos);
    if (eol == std::string_view::npos) eol = content.size();
    std::string_view line = content.substr(pos, eol - pos);
    pos = eol + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    const std::string key = text::to_lower_ascii(text::trim(line.substr(0, colon)));
    const std::string value(text::trim(line.substr(colon + 1)));
    if (key == "user-agent") {
      if (!last_was_agent) groups.emplace_back();
      groups.back().agents.push_back(text::to_lower_ascii(value));
      last_was_agent = true;
      continue;
    }
    last_was_agent = false;
    if ((key == "allow" || key == "disallow") && !groups.empty() && !value.empty()) {
      groups.back().rules.push_back({value, key == "allow"});
    }
  }
  const Group* chosen = nullptr;
  for (const auto& g : groups) {
    for (const auto& a : g.agents) {
      if (a != "*" && !token.empty() && token.find(a) != std::string::npos) chosen = &g;
    }
    if (chosen) break;
  }
  if (!chosen) {
    for (const auto& g : groups) {
      if (std::find(g.agents.begin(), g.agents.end(), "*") != g.agents.end()) {
        chosen = &g;
        break;
      }
    }
  }
  RobotsRules rules;
  if (chosen) rules.rules_ = chosen->rules;
  return rules;
}

bool RobotsRules::allowed(std::string_view path) const {
  const Rule* best = nullptr;
  for (const auto& r : rules_) {
    if (!robots_match(r.pattern, path)) continue;
    if (!best || r.pattern.size() > best->pattern.size() ||
        (r.pattern.size() == best->pattern.size() && r.allow)) {
      best = &r;
    }
  }
  return !best || best->allow;
}

// --- probing ----------------------------------------------------------------

LinkChecker::LinkChecker(ProbePolicy policy, RequestObserver observer)
    : policy_(std::move(policy)), observer_(std::move(observer)) {
  if (policy_.concurrency == 0) policy_.concurrency = 1;
  if (policy_.max_body_bytes == 0) policy_.max_body_bytes = 1;
}

namespace {

struct RequestContext {
  const ProbePolicy& policy;
  const RequestObserver& observer;
  HostThrottle& throttle;
};

Exchange perform(RequestContext& ctx, const Target& target, const std::string& method,
                 std::chrono::milliseconds timeout) {
  const auto start = ctx.throttle.wait_turn(target.host, ctx.policy.per_host_interval);
  if (ctx.observer) ctx.observer({target.host, method, target.url(), start});

  httplib::Client client(target.origin());
  const auto sec = static_cast<time_t>(timeout.count() / 1000);
  const auto usec = static_cast<time_t>((timeout.count() % 1000) * 1000);
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);
  client.set_follow_location(false);
  client.set_keep_alive(false);
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
  client.enable_server_certificate_verification(ctx.policy.verify_tls);
#endif
  httplib::Headers headers = {{"User-Agent", ctx.policy.user_agent}};

  Exchange ex;
  if (method == "HEAD") {
    auto res = client.Head(target.path, headers);
    ex.error = res.error();
    if (res) {
      ex.status = res->status;
      ex.location = res->get_header_value("Location");
    }
  } else {
    headers.emplace("Range", "bytes=0-" + std::to_string(ctx.policy.max_body_bytes - 1));
    std::size_t received = 0;
    const std::size_t limit = ctx.policy.max_body_bytes;
    auto res = client.Get(
        target.path, headers,
        [&](const httplib::Response& response) {
          ex.status = response.status;
          ex.location = response.get_header_value("Location");
          return true;
        },
        [&](const char*, size_t length) {
          received += length;
          return received < limit;
        });
    ex.error = res.error();
    if (res) {
      ex.status = res->status;
      ex.location = res->get_header_value("Location");
    }
  }
  ex.elapsed = Clock::now() - start;
  return ex;
}

LinkStatus classify_failure(const Exchange& ex, std::chrono::milliseconds timeout) {
  using httplib::Error;
  switch (ex.error) {
    case Error::ConnectionTimeout:
      return LinkStatus::Timeout;
    case Error::SSLConnection:
    case Error::SSLLoadingCerts:
    case Error::SSLServerVerification:
      return LinkStatus::TlsFailure;
    case Error::Read:
    case Error::Write:
      return ex.elapsed + std::chrono::milliseconds(50) >= timeout ? LinkStatus::Timeout
                                                                   : LinkStatus::ServerError;
    default:
      return LinkStatus::ServerError;
  }
}

}  // namespace

bool LinkChecker::robots_allow(const std::string& origin, const std::string& host,
                               const std::string& path) {
  std::promise<RobotsRules> promise;
  std::shared_future<RobotsRules> future;
  bool fetch = false;
  {
    std::lock_guard lock(robots_mutex_);
    auto it = robots_.find(origin);
    if (it == robots_.end()) {
      future = promise.get_future().share();
      robots_.emplace(origin, future);
      fetch = true;
    } else {
      future = it->second;
    }
  }
  if (fetch) {
    RobotsRules rules;
    try {
      const auto target = split_url(origin + "/robots.txt");
      const auto start = throttle_.wait_turn(host, policy_.per_host_interval);
      if (observer_) observer_({host, "GET", origin + "/robots.txt", start});
      httplib::Client client(origin);
      const auto t = std::min(policy_.robots_timeout, policy_.timeout);
      client.set_connection_timeout(static_cast<time_t>(t.count() / 1000),
                                    static_cast<time_t>((t.count() % 1000) * 1000));
      client.set_read_timeout(static_cast<time_t>(t.count() / 1000),
                              static_cast<time_t>((t.count() % 1000) * 1000));
      client.set_keep_alive(false);
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
      client.enable_server_certificate_verification(policy_.verify_tls);
#endif
      auto res = client.Get(target->path, {{"User-Agent", policy_.user_agent}});
      if (res && res->status == 200 && res->body.size() <= 512 * 1024) {
        rules = RobotsRules::parse(res->body, policy_.user_agent);
      }
    } catch (...) {
      // Unfetchable robots.txt allows probing.
    }
    promise.set_value(rules);
  }
  return future.get().allowed(path);
}

LivenessReport LinkChecker::check(std::string_view url) {
  const auto started = Clock::now();
  LivenessReport report;
  report.url = std::string(url);
  report.checked_at = utc_now();
  const auto finish = [&](LinkStatus status) {
    report.status = status;
    report.latency_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started).count();
    return report;
  };

  auto target = split_url(url);
  if (!target) return finish(LinkStatus::ClientError);
  if (target->scheme != "http" && target->scheme != "https") {
    return finish(LinkStatus::UnsupportedScheme);
  }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (target->scheme == "https") return finish(LinkStatus::UnsupportedScheme);
#endif
  if (!resolves(target->host)) return finish(LinkStatus::DnsFailure);
  if (policy_.honor_robots && !robots_allow(target->origin(), target->host, target->path)) {
    return finish(LinkStatus::RobotsDisallowed);
  }

  RequestContext ctx{policy_, observer_, throttle_};
  int redirects = 0;
  for (;;) {
    Exchange ex = perform(ctx, *target, "HEAD", policy_.timeout);
    if (ex.status && (*ex.status == 405 || *ex.status == 501)) {
      ex = perform(ctx, *target, "GET", policy_.timeout);
    }
    if (!ex.status) return finish(classify_failure(ex, policy_.timeout));

    const int code = *ex.status;
    report.http_code = code;
    if (code >= 300 && code < 400) {
      const std::string next = ex.location.empty() ? std::string() : resolve_location(*target, ex.location);
      auto next_target = next.empty() ? std::nullopt : split_url(next);
      const bool followable = next_target && (next_target->scheme == "http" ||
                                              next_target->scheme == "https");
      if (!followable || redirects >= policy_.max_redirects) {
        report.final_url = next_target ? next : target->url();
        return finish(LinkStatus::Redirected);
      }
      ++redirects;
      if (!resolves(next_target->host)) {
        report.http_code.reset();
        return finish(LinkStatus::DnsFailure);
      }
      target = std::move(next_target);
      continue;
    }
    if (code >= 200 && code < 300) {
      report.final_url = target->url();
      return finish(redirects == 0 ? LinkStatus::Alive : LinkStatus::Redirected);
    }
    if (code >= 400 && code < 500) return finish(LinkStatus::ClientError);
    return finish(LinkStatus::ServerError);
  }
}

void LinkChecker::check_all(std::span<const std::string> urls,
                            const std::function<void(std::size_t, LivenessReport)>& sink) {
  if (urls.empty()) return;
  std::atomic<std::size_t> next{0};
  std::mutex sink_mutex;
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= urls.size()) return;
      LivenessReport report = check(urls[i]);
      std::lock_guard lock(sink_mutex);
      sink(i, std::move(report));
    }
  };
  const std::size_t n = std::min(policy_.concurrency, urls.size());
  std::vector<std::thread> threads;
  threads.reserve(n);
  for (std::size_t t = 0; t < n; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
}

std::vector<LivenessReport> LinkChecker::check_all(std::span<const std::string> urls) {
  std::vector<LivenessReport> out(urls.size());
  check_all(urls, [&](std::size_t i, LivenessReport r) { out[i] = std::move(r); });
  return out;
}

}  // namespace rrd::liveness
