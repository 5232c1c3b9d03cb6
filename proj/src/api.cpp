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

#include "rrd/api.hpp"

#include <charconv>

#include <httplib.h>

namespace rrd::api {
namespace {

constexpr std::size_t kMaxTopLimit = 1000;

ApiResponse error(int status, std::string_view field, std::string_view message) {
  return {status, query::error_json(field, message)};
}

std::optional<std::size_t> parse_id(std::string_view s) {
  std::size_t id = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), id);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return id;
}

}  // namespace

ResourceApi::ResourceApi(query::SearchIndex index)
    : index_(std::make_shared<const query::SearchIndex>(std::move(index))) {}

void ResourceApi::reload(query::SearchIndex index) {
  auto next = std::make_shared<const query::SearchIndex>(std::move(index));
  std::lock_guard lock(mu_);
  index_ = std::move(next);
}

std::shared_ptr<const query::SearchIndex> ResourceApi::index() const {
  std::lock_guard lock(mu_);
  return index_;
}

ApiResponse ResourceApi::handle(const std::string& path, const query::Params& params) const {
  const auto idx = index();
  try {
    if (path == "/resources") {
      const auto spec = query::parse_query(params);
      return {200, query::search_json(*idx, idx->search(spec))};
    }
    if (path.starts_with("/resources/")) {
      const auto id = parse_id(std::string_view(path).substr(11));
      if (!id) return error(400, "id", "resource id must be a positive integer");
      const auto* entry = idx->find(*id);
      if (entry == nullptr) return error(404, "id", "no resource with id " + std::to_string(*id));
      return {200, query::resource_json(*entry)};
    }
    if (path == "/stats") return {200, query::stats_json(*idx)};
    if (path == "/domains/top") {
      std::size_t limit = 10;
      for (const auto& [key, value] : params) {
        if (key != "limit") return error(400, key, "unknown parameter");
        const auto n = parse_id(value);
        if (!n || *n < 1 || *n > kMaxTopLimit) {
          return error(400, "limit", "limit must be between 1 and 1000");
        }
        limit = *n;
      }
      return {200, query::top_domains_json(*idx, limit)};
    }
  } catch (const query::QueryError& e) {
    return error(400, e.field(), e.what());
  }
  return error(404, "path", "no route for " + path);
}

void ResourceApi::mount(httplib::Server& server) const {
  const auto respond = [this](const httplib::Request& req, httplib::Response& res) {
    query::Params params(req.params.begin(), req.params.end());
    const ApiResponse out = handle(req.path, params);
    res.status = out.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(out.body.dump(), "application/json");
  };
  server.Get(R"(/resources)", respond);
  server.Get(R"(/resources/[^/]+)", respond);
  server.Get(R"(/stats)", respond);
  server.Get(R"(/domains/top)", respond);
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(query::error_json("path", "no route for " + req.path).dump(),
                    "application/json");
  });
}

}  // namespace rrd::api
