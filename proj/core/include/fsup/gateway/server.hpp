#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "fsup/gateway/service.hpp"

namespace fsup::gateway {

struct HttpResult {
  int status = 200;
  nlohmann::json body;
};

/// Splits "/a/b?x=1&y=2" into path and query parameters (no percent-decoding
/// beyond '+' and %XX).
struct Target {
  std::string path;
  std::map<std::string, std::string> query;
};
Target parse_target(std::string_view target);

/// The JSON API without a socket. Maps fsup errors to HTTP statuses:
/// NotFound 404, Validation/Domain 400, SessionClosed 409, everything else 500.
HttpResult handle_http(Service& service, std::string_view method, std::string_view target, std::string_view body);

/// Session id of a "/sessions/{id}/stream" path, if it is one.
std::optional<std::string> stream_session(std::string_view path);

/// HTTP and WebSocket on one port, served by a small thread pool.
class Server {
 public:
  Server(std::shared_ptr<Service> service, std::string host, std::uint16_t port, int threads = 4);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts serving in background threads. Throws ConfigError when
  /// the address cannot be bound.
  void start();
  /// Stops accepting, closes connections and joins the threads.
  void stop();
  /// Blocks until stop() is called from another thread or a signal handler.
  void wait();

  /// The bound port (useful when constructed with port 0).
  std::uint16_t port() const { return bound_port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::uint16_t bound_port_ = 0;
};

}  // namespace fsup::gateway
