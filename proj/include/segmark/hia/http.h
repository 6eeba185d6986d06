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

#pragma once

#include <memory>
#include <string>

// Eigen must precede httplib: a system header pulled in by httplib
// defines macros that collide with Eigen internals.
#include "segmark/hia/hia.h"

#include "httplib.h"

namespace segmark::hia {

// Routes the JSON API onto an httplib server. The service must outlive it.
std::unique_ptr<httplib::Server> make_http_server(HiaService& service);

// Blocks serving on host:port. Returns false if the port cannot be bound.
bool serve(HiaService& service, const std::string& host, int port);

}  // namespace segmark::hia
