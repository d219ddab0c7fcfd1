#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "outlier/service.hpp"

namespace httplib {
class Server;
}

namespace outlier {

/// HTTP transport for ReviewService. Serves /api/* and, optionally, a static
/// UI directory at "/".
class HttpServer {
 public:
  explicit HttpServer(ReviewService& service, std::optional<std::filesystem::path> ui_dir = {});
  ~HttpServer();

  /// Binds the listening socket; port 0 picks a free port. Returns the port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); requires bind().
  void listen();
  /// listen() on a background thread.
  void start();
  void stop();

 private:
  ReviewService& service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace outlier
