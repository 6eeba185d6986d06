// Copyright 2026 The segmark Authors
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

#include "segmark/hia/http.h"

#include <cstdlib>

namespace segmark::hia {

namespace {

void send(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

bool parse_size(const httplib::Request& req, const char* name, std::size_t& out,
                httplib::Response& res) {
  if (!req.has_param(name)) return true;
  const std::string v = req.get_param_value(name);
  char* end = nullptr;
  const unsigned long long n = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || v[0] == '-') {
    send(res, {400, {{"error", std::string(name) + " must be a non-negative integer"},
                     {"field", name}}});
    return false;
  }
  out = static_cast<std::size_t>(n);
  return true;
}

}  // namespace

std::unique_ptr<httplib::Server> make_http_server(HiaService& service) {
  auto server = std::make_unique<httplib::Server>();
  server->Get("/api/docs", [&service](const httplib::Request& req, httplib::Response& res) {
    std::size_t offset = 0, limit = kDefaultPageSize;
    if (!parse_size(req, "offset", offset, res) || !parse_size(req, "limit", limit, res)) return;
    send(res, service.list_docs(req.get_param_value("split"), offset, limit));
  });
  server->Get(R"(/api/docs/([^/]+))", [&service](const httplib::Request& req, httplib::Response& res) {
    send(res, service.get_doc(req.matches[1]));
  });
  server->Get(R"(/api/docs/([^/]+)/hia)", [&service](const httplib::Request& req, httplib::Response& res) {
    send(res, service.get_hia(req.matches[1]));
  });
  server->Post("/api/corrections", [&service](const httplib::Request& req, httplib::Response& res) {
    send(res, service.post_correction(req.body));
  });
  server->Get("/api/report", [&service](const httplib::Request&, httplib::Response& res) {
    send(res, service.report());
  });
  server->set_exception_handler(
      [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
          std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          what = e.what();
        } catch (...) {
        }
        send(res, {500, {{"error", what}}});
      });
  return server;
}

bool serve(HiaService& service, const std::string& host, int port) {
  auto server = make_http_server(service);
  return server->listen(host, port);
}

}  // namespace segmark::hia
