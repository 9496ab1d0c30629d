#pragma once

// Socket-level HTTP service over the server core, for poking the emulated
// provider with any HTTP client. All state mutations serialize through one
// writer lock; the route table is the same one the simulations use.

#include <memory>
#include <mutex>
#include <string>

#include "tileof/server.hpp"

namespace tileof::http {

class HttpService {
 public:
  explicit HttpService(server::ServerCore& core);
  ~HttpService();

  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  // Blocks until stop(); returns false if the port could not be bound.
  bool listen(const std::string& host, int port);

  // For tests: bind to an OS-assigned port, then serve from a caller thread.
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();

  void stop();
  bool is_running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tileof::http
