#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <thread>

#include "acd/errors.hpp"
#include "acd/http.hpp"

namespace acd {

namespace {

struct SplitUrl {
  std::string origin;
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  auto scheme = url.find("://");
  if (scheme == std::string::npos) throw TransportError("URL without scheme: " + url);
  auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace

HttpResponse http_post_json(const std::string& url, const std::string& body, const HttpHeaders& headers,
                            std::chrono::milliseconds timeout) {
  const auto parts = split_url(url);
  httplib::Client client(parts.origin);
  const auto sec = static_cast<time_t>(timeout.count() / 1000);
  const auto usec = static_cast<time_t>((timeout.count() % 1000) * 1000);
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  auto res = client.Post(parts.path, h, body, "application/json");
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) {
      throw TimeoutError("HTTP request to " + url + " timed out (" + httplib::to_string(err) + ")");
    }
    throw TransportError("HTTP request to " + url + " failed: " + httplib::to_string(err));
  }
  return {res->status, res->body};
}

struct JsonHttpServer::Impl {
  httplib::Server server;
  std::thread thread;
};

JsonHttpServer::JsonHttpServer(Handler handler) : impl_(std::make_unique<Impl>()) {
  impl_->server.Post(".*", [handler = std::move(handler)](const httplib::Request& req, httplib::Response& res) {
    auto [status, body] = handler(req.path, req.body);
    res.status = status;
    res.set_content(body, "application/json");
  });
}

JsonHttpServer::~JsonHttpServer() { stop(); }

int JsonHttpServer::start(const std::string& host, int port) {
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(host);
  } else {
    if (!impl_->server.bind_to_port(host, port)) port_ = -1;
    else port_ = port;
  }
  if (port_ <= 0) throw TransportError("could not bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port_;
}

void JsonHttpServer::serve_forever(const std::string& host, int port) {
  port_ = port;
  if (!impl_->server.listen(host, port)) throw TransportError("could not listen on " + host + ":" + std::to_string(port));
}

void JsonHttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace acd
