#pragma once

// HTTP front end for SessionService on localhost.

#include <memory>
#include <string>

#include "rerl/session.hpp"

namespace rerl {

class HttpServer {
 public:
  explicit HttpServer(SessionService& service);
  ~HttpServer();

  /// Binds `host`:`port`; port 0 picks a free one. Returns the bound port
  /// or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called.
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rerl
