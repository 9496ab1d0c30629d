#pragma once

// HTTP surface over the server core. The route table is shared between the
// in-process transport used by simulations and the socket service, so both
// speak the same paths, headers, and JSON bodies. Requests and responses
// pass through as text, and a wire tap can record every exchange; that
// recorded traffic is the "network capture" several scenarios inspect.

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tileof/server.hpp"

namespace tileof::http {

struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> headers;
  std::map<std::string, std::string> query;
  std::string body;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

struct HttpExchange {
  Timestamp t = 0;
  std::string client;
  HttpRequest request;
  HttpResponse response;
};

// Records whole exchanges, TLS-proxy style.
class WireTap {
 public:
  void record(HttpExchange exchange) { exchanges_.push_back(std::move(exchange)); }
  const std::vector<HttpExchange>& exchanges() const { return exchanges_; }

 private:
  std::vector<HttpExchange> exchanges_;
};

// Identity header carried on authenticated requests.
inline constexpr char kUserUuidHeader[] = "user_uuid";

HttpResponse route_request(server::ServerCore& core, const HttpRequest& request);

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse send(const HttpRequest& request) = 0;
};

class InProcessTransport : public Transport {
 public:
  InProcessTransport(server::ServerCore& core, std::function<Timestamp()> now,
                     std::string client_label, WireTap* tap = nullptr)
      : core_(core), now_(std::move(now)), client_label_(std::move(client_label)), tap_(tap) {}

  HttpResponse send(const HttpRequest& request) override {
    HttpResponse response = route_request(core_, request);
    if (tap_ != nullptr) tap_->record(HttpExchange{now_(), client_label_, request, response});
    return response;
  }

 private:
  server::ServerCore& core_;
  std::function<Timestamp()> now_;
  std::string client_label_;
  WireTap* tap_;
};

}  // namespace tileof::http
