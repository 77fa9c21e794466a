#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace acd {

struct HttpResponse {
  int status = 0;
  std::string body;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

/// POSTs a JSON body to an http:// or https:// URL. Throws TimeoutError when the
/// deadline passes and TransportError for any other connection failure.
/// Non-2xx statuses are returned, not thrown.
HttpResponse http_post_json(const std::string& url, const std::string& body, const HttpHeaders& headers,
                            std::chrono::milliseconds timeout);

/// Minimal JSON-over-HTTP server on a background thread (mock endpoints, tests).
class JsonHttpServer {
 public:
  /// (path, request body) -> (status, response body)
  using Handler = std::function<std::pair<int, std::string>(const std::string&, const std::string&)>;

  explicit JsonHttpServer(Handler handler);
  ~JsonHttpServer();
  JsonHttpServer(const JsonHttpServer&) = delete;
  JsonHttpServer& operator=(const JsonHttpServer&) = delete;

  /// Binds `host` on `port` (0 picks a free port) and starts serving. Returns the port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Blocks serving on the calling thread.
  void serve_forever(const std::string& host, int port);
  void stop();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace acd
