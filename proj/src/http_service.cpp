#include "tileof/http_service.hpp"

#include "httplib.h"
#include "tileof/http_api.hpp"

namespace tileof::http {

struct HttpService::Impl {
  explicit Impl(server::ServerCore& core) : core(core) {}

  server::ServerCore& core;
  std::mutex write_lock;
  httplib::Server server;
};

namespace {

HttpRequest to_request(const httplib::Request& req) {
  HttpRequest out;
  out.method = req.method;
  out.path = req.path;
  out.body = req.body;
  for (const auto& [key, value] : req.headers) out.headers[key] = value;
  for (const auto& [key, value] : req.params) out.query[key] = value;
  return out;
}

}  // namespace

HttpService::HttpService(server::ServerCore& core) : impl_(std::make_unique<Impl>(core)) {
  auto handle = [impl = impl_.get()](const httplib::Request& req, httplib::Response& res) {
    HttpResponse response;
    {
      std::scoped_lock lock(impl->write_lock);
      response = route_request(impl->core, to_request(req));
    }
    res.status = response.status;
    res.set_content(response.body, "application/json");
  };
  const std::string any = R"(/.*)";
  impl_->server.Get(any, handle);
  impl_->server.Post(any, handle);
  impl_->server.Delete(any, handle);
  impl_->server.Put(any, handle);
}

HttpService::~HttpService() { stop(); }

bool HttpService::listen(const std::string& host, int port) {
  return impl_->server.listen(host, port);
}

int HttpService::bind_to_any_port(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool HttpService::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpService::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

bool HttpService::is_running() const { return impl_->server.is_running(); }

}  // namespace tileof::http
