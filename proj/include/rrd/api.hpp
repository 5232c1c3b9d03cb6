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

#include <memory>
#include <mutex>
#include <string>

#include "rrd/query.hpp"

namespace httplib {
class Server;
}

// Read-only JSON API over a SearchIndex.
//
//   GET /resources?q=&domain=&source=&scheme=&year_from=&year_to=&sort=&page=&page_size=
//   GET /resources/{id}
//   GET /stats
//   GET /domains/top?limit=
//
// Errors are {"error": {"field": ..., "message": ...}} with status 400 or 404.
namespace rrd::api {

struct ApiResponse {
  int status = 200;
  query::Json body;
};

class ResourceApi {
 public:
  explicit ResourceApi(query::SearchIndex index = {});

  /// Atomically replaces the served index; in-flight requests keep the old one.
  void reload(query::SearchIndex index);
  std::shared_ptr<const query::SearchIndex> index() const;

  ApiResponse handle(const std::string& path, const query::Params& params) const;

  /// Registers the routes on `server`, with permissive CORS headers.
  void mount(httplib::Server& server) const;

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const query::SearchIndex> index_;
};

}  // namespace rrd::api
