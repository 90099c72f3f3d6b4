#include "fsup/gateway/server.hpp"

#include <charconv>
#include <deque>

#include <boost/asio.hpp>
#include <boost/beast.hpp>
#include <spdlog/spdlog.h>

#include "fsup/error.hpp"

namespace fsup::gateway {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::json;

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size() && hex_value(s[i + 1]) >= 0 && hex_value(s[i + 2]) >= 0) {
      out += static_cast<char>(hex_value(s[i + 1]) * 16 + hex_value(s[i + 2]));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (pos < path.size()) {
    if (path[pos] == '/') {
      ++pos;
      continue;
    }
    const auto end = std::min(path.find('/', pos), path.size());
    parts.push_back(path.substr(pos, end - pos));
    pos = end;
  }
  return parts;
}

std::uint64_t query_seq(const Target& t, const char* key, std::uint64_t fallback) {
  const auto it = t.query.find(key);
  if (it == t.query.end() || it->second.empty()) return fallback;
  std::uint64_t v = 0;
  const auto& s = it->second;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ValidationError(std::string(key) + " must be an integer");
  return v;
}

json parse_body(std::string_view body) {
  if (body.empty()) return json::object();
  auto j = json::parse(body, nullptr, false);
  if (j.is_discarded()) throw ValidationError("request body is not valid JSON");
  return j;
}

HttpResult error(int status, const std::string& message) { return {status, {{"error", message}}}; }

HttpResult dispatch(Service& svc, std::string_view method, const Target& t, std::string_view body) {
  const auto parts = split_path(t.path);
  const auto is = [&](std::string_view m) { return method == m; };

  if (parts.size() == 1 && parts[0] == "health") {
    if (!is("GET")) return error(405, "method not allowed");
    return {200, {{"status", "ok"}}};
  }
  if (parts.size() == 1 && parts[0] == "scenarios") {
    if (!is("GET")) return error(405, "method not allowed");
    return {200, svc.list_scenarios()};
  }
  if (parts.size() == 1 && parts[0] == "sessions") {
    if (!is("POST")) return error(405, "method not allowed");
    const auto req = parse_body(body);
    const auto it = req.find("scenario_id");
    if (!req.is_object() || it == req.end() || !it->is_string()) {
      throw ValidationError("body must contain a string scenario_id");
    }
    const auto id = svc.create_session(it->get<std::string>());
    return {201, {{"session_id", id}, {"scenario_id", it->get<std::string>()}}};
  }
  if (parts.size() == 3 && parts[0] == "sessions") {
    const std::string id = decode(parts[1]);
    const auto action = parts[2];
    if (action == "messages") {
      if (!is("POST")) return error(405, "method not allowed");
      return {200, svc.post_message(id, parse_body(body))};
    }
    if (action == "close") {
      if (!is("POST")) return error(405, "method not allowed");
      return {200, svc.close_session(id)};
    }
    if (action == "report") {
      if (!is("GET")) return error(405, "method not allowed");
      return {200, svc.report(id)};
    }
    if (action == "log") {
      if (!is("GET")) return error(405, "method not allowed");
      return {200, svc.log(id, query_seq(t, "from", 1))};
    }
    if (action == "stream") return error(426, "use a WebSocket upgrade for the stream");
  }
  return error(404, "no route for " + t.path);
}

}  // namespace

Target parse_target(std::string_view target) {
  Target t;
  const auto q = target.find('?');
  t.path = decode(target.substr(0, q));
  if (q == std::string_view::npos) return t;
  auto query = target.substr(q + 1);
  while (!query.empty()) {
    const auto amp = query.find('&');
    const auto pair = query.substr(0, amp);
    const auto eq = pair.find('=');
    if (!pair.empty()) {
      t.query[decode(pair.substr(0, eq))] = eq == std::string_view::npos ? "" : decode(pair.substr(eq + 1));
    }
    if (amp == std::string_view::npos) break;
    query.remove_prefix(amp + 1);
  }
  return t;
}

std::optional<std::string> stream_session(std::string_view path) {
  const auto parts = split_path(path);
  if (parts.size() == 3 && parts[0] == "sessions" && parts[2] == "stream") return decode(parts[1]);
  return std::nullopt;
}

HttpResult handle_http(Service& service, std::string_view method, std::string_view target, std::string_view body) {
  try {
    return dispatch(service, method, parse_target(target), body);
  } catch (const NotFoundError& e) {
    return error(404, e.what());
  } catch (const SessionClosedError& e) {
    return error(409, e.what());
  } catch (const ValidationError& e) {
    return error(400, e.what());
  } catch (const DomainError& e) {
    return error(400, e.what());
  } catch (const std::exception& e) {
    spdlog::error("{} {} failed: {}", method, target, e.what());
    return error(500, e.what());
  }
}

// ---------------------------------------------------------------- transport

namespace {

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, Service& svc) : ws_(std::move(socket)), svc_(svc) {}

  void run(http::request<http::string_body> req, std::string session_id, std::uint64_t from) {
    std::weak_ptr<WsSession> weak = weak_from_this();
    sub_ = svc_.subscribe(session_id, from, [weak](const StreamFrame& f) {
      if (auto self = weak.lock()) {
        net::post(self->ws_.get_executor(),
                  [self, text = to_json(f).dump()]() mutable { self->enqueue(std::move(text)); });
      }
    });
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return finish();
    accepted_ = true;
    if (!queue_.empty()) write_next();
    ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
  }

  // Client messages are ignored; the read keeps close frames and pings flowing.
  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return finish();
    buffer_.consume(buffer_.size());
    ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
  }

  void enqueue(std::string text) {
    if (done_) return;
    queue_.push_back(std::move(text));
    if (accepted_ && queue_.size() == 1) write_next();
  }

  void write_next() {
    ws_.text(true);
    ws_.async_write(net::buffer(queue_.front()), beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) return finish();
    queue_.pop_front();
    if (!queue_.empty()) write_next();
  }

  void finish() {
    done_ = true;
    queue_.clear();
    sub_.reset();
  }

  websocket::stream<beast::tcp_stream> ws_;
  Service& svc_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  Subscription sub_;
  bool accepted_ = false;
  bool done_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, Service& svc) : stream_(std::move(socket)), svc_(svc) {}

  void run() { net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::read, shared_from_this())); }

 private:
  void read() {
    parser_.emplace();
    parser_->body_limit(64 * 1024);
    stream_.expires_after(std::chrono::seconds(60));
    http::async_read(stream_, buffer_, *parser_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) return shutdown();
    if (ec == http::error::body_limit) return respond_error(413, "request body too large", 11, false);
    if (ec) return;
    auto req = parser_->release();

    if (websocket::is_upgrade(req)) {
      const auto target = parse_target(std::string_view(req.target().data(), req.target().size()));
      const auto id = stream_session(target.path);
      if (!id) return respond_error(404, "no stream at " + target.path, req.version(), false);
      std::uint64_t from = 1;
      try {
        from = query_seq(target, "from", 1);
      } catch (const ValidationError& e) {
        return respond_error(400, e.what(), req.version(), false);
      }
      if (!svc_.has_session(*id)) return respond_error(404, "unknown session '" + *id + "'", req.version(), false);
      stream_.expires_never();
      std::make_shared<WsSession>(stream_.release_socket(), svc_)->run(std::move(req), *id, from);
      return;
    }

    const std::string_view method(req.method_string().data(), req.method_string().size());
    const std::string_view target(req.target().data(), req.target().size());
    auto res = std::make_shared<http::response<http::string_body>>();
    res->version(req.version());
    res->keep_alive(req.keep_alive());
    if (method == "OPTIONS") {
      res->result(http::status::no_content);
    } else {
      const auto result = handle_http(svc_, method, target, req.body());
      res->result(static_cast<http::status>(result.status));
      res->set(http::field::content_type, "application/json");
      res->body() = result.body.dump();
    }
    send(std::move(res));
  }

  void respond_error(int status, const std::string& message, unsigned version, bool keep_alive) {
    auto res = std::make_shared<http::response<http::string_body>>();
    res->version(version);
    res->keep_alive(keep_alive);
    res->result(static_cast<http::status>(status));
    res->set(http::field::content_type, "application/json");
    res->body() = json{{"error", message}}.dump();
    send(std::move(res));
  }

  void send(std::shared_ptr<http::response<http::string_body>> res) {
    res->set(http::field::server, "fsup");
    res->set(http::field::access_control_allow_origin, "*");
    res->set(http::field::access_control_allow_headers, "Content-Type");
    res->set(http::field::access_control_allow_methods, "GET, POST, OPTIONS");
    res->prepare_payload();
    const bool close = res->need_eof();
    http::async_write(stream_, *res, [self = shared_from_this(), res, close](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (close) return self->shutdown();
      self->read();
    });
  }

  void shutdown() {
    beast::error_code ec;
    stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
  }

  beast::tcp_stream stream_;
  Service& svc_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
};

}  // namespace

struct Server::Impl {
  Impl(std::shared_ptr<Service> s, std::string h, std::uint16_t p, int t)
      : service(std::move(s)), host(std::move(h)), port(p), threads(std::max(1, t)), ioc(threads) {}

  void accept() {
    acceptor->async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec == net::error::operation_aborted) return;
      if (!ec) std::make_shared<HttpSession>(std::move(socket), *service)->run();
      if (acceptor->is_open()) accept();
    });
  }

  std::shared_ptr<Service> service;
  std::string host;
  std::uint16_t port;
  int threads;
  net::io_context ioc;
  std::optional<tcp::acceptor> acceptor;
  std::optional<net::executor_work_guard<net::io_context::executor_type>> work;
  std::vector<std::thread> pool;
  std::mutex mu;
  bool stopped = false;
};

Server::Server(std::shared_ptr<Service> service, std::string host, std::uint16_t port, int threads)
    : impl_(std::make_unique<Impl>(std::move(service), std::move(host), port, threads)) {}

Server::~Server() { stop(); }

void Server::start() {
  auto& im = *impl_;
  beast::error_code ec;
  const auto address = net::ip::make_address(im.host, ec);
  if (ec) throw ConfigError("invalid listen address '" + im.host + "'");
  const tcp::endpoint endpoint(address, im.port);
  im.acceptor.emplace(im.ioc);
  im.acceptor->open(endpoint.protocol(), ec);
  if (!ec) im.acceptor->set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) im.acceptor->bind(endpoint, ec);
  if (!ec) im.acceptor->listen(net::socket_base::max_listen_connections, ec);
  if (ec) throw ConfigError("cannot listen on " + im.host + ":" + std::to_string(im.port) + ": " + ec.message());
  bound_port_ = im.acceptor->local_endpoint().port();
  im.work.emplace(net::make_work_guard(im.ioc));
  im.accept();
  for (int i = 0; i < im.threads; ++i) im.pool.emplace_back([&im] { im.ioc.run(); });
}

void Server::stop() {
  auto& im = *impl_;
  {
    std::lock_guard lock(im.mu);
    if (im.stopped) return;
    im.stopped = true;
  }
  net::post(im.ioc, [&im] {
    beast::error_code ec;
    if (im.acceptor) im.acceptor->close(ec);
  });
  im.work.reset();
  im.ioc.stop();
  for (auto& t : im.pool) {
    if (t.joinable() && t.get_id() != std::this_thread::get_id()) t.join();
  }
}

void Server::wait() {
  for (auto& t : impl_->pool) {
    if (t.joinable()) t.join();
  }
}

}  // namespace fsup::gateway
