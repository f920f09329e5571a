#pragma once

#include <memory>
#include <string>

#include "tgm/error.hpp"
#include "tgm/service/workspace.hpp"

namespace httplib {
class Server;
}

namespace tgm::service {

int http_status_for(ErrorCode code);

// JSON API over a Workspace, rooted at /api.
class ApiServer {
 public:
  explicit ApiServer(Workspace& workspace);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Returns the bound port (useful with port 0), or -1 when binding fails.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  bool listen_after_bind();
  void stop();

 private:
  void install_routes();

  Workspace& workspace_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace tgm::service
