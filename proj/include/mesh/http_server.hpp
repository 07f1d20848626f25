// Copyright 2026 the meshplane authors
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

#include "mesh/service.hpp"

namespace httplib {
class Server;
}

namespace mesh {

// HTTP/JSON surface over MeshService (developer- and mesh-experience APIs).
// Reads run concurrently against state snapshots; mutations serialize through
// the service's writer. Callers assert their subject in request bodies; API
// authentication is out of scope at desk scale.
class HttpServer {
 public:
  explicit HttpServer(MeshService& service);
  ~HttpServer();

  // Blocks until stop(). Returns false if the port cannot be bound.
  bool listen(const std::string& host, int port);

  // For tests: binds to an OS-assigned port and returns it, -1 on failure.
  int bind_any_port(const std::string& host);
  bool listen_after_bind();

  void stop();

 private:
  void install_routes();

  MeshService& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace mesh
