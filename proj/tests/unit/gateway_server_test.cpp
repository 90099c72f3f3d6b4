#include <gtest/gtest.h>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <httplib.h>

#include "assets.hpp"
#include "fsup/gateway/server.hpp"
#include "fsup/supervisor/transcript.hpp"

using namespace fsup;
using namespace fsup::gateway;
using nlohmann::json;
namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;

namespace {

class LiveServer : public ::testing::Test {
 protected:
  void SetUp() override {
    service_ = std::make_shared<Service>(supervisor::Supervisor::with_defaults(),
                                         scenario::load_scenario_dir(testing_assets::path("scenarios")),
                                         std::make_shared<store::MemorySessionStore>(),
                                         [] { return parse_timestamp("2025-04-02T13:59:00Z"); });
    server_ = std::make_unique<Server>(service_, "127.0.0.1", 0, 2);
    server_->start();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", server_->port());
  }
  void TearDown() override { server_->stop(); }

  std::string create() {
    auto res = client_->Post("/sessions", R"({"scenario_id": "chest_pain"})", "application/json");
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, 201);
    return json::parse(res->body)["session_id"];
  }

  std::shared_ptr<Service> service_;
  std::unique_ptr<Server> server_;
  std::unique_ptr<httplib::Client> client_;
};

std::vector<std::string> escalation() {
  std::vector<std::string> out;
  for (const auto& e : supervisor::load_transcript(testing_assets::path("transcripts/chest_pain_escalation.jsonl"))) {
    out.push_back(scenario::to_json(e).dump());
  }
  return out;
}

struct WsClient {
  net::io_context ioc;
  websocket::stream<beast::tcp_stream> ws{ioc};

  WsClient(std::uint16_t port, const std::string& target) {
    net::ip::tcp::resolver resolver(ioc);
    beast::get_lowest_layer(ws).connect(*resolver.resolve("127.0.0.1", std::to_string(port)).begin());
    beast::get_lowest_layer(ws).expires_after(std::chrono::seconds(10));
    ws.handshake("127.0.0.1", target);
  }

  json next() {
    beast::flat_buffer buf;
    ws.read(buf);
    return json::parse(beast::buffers_to_string(buf.data()));
  }
};

}  // namespace

TEST_F(LiveServer, HealthAndCors) {
  auto res = client_->Get("/health");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
  auto pre = client_->Options("/sessions");
  ASSERT_TRUE(pre);
  EXPECT_EQ(pre->status, 204);
}

TEST_F(LiveServer, FullSessionOverHttp) {
  const auto id = create();
  const auto events = escalation();
  json last;
  for (const auto& e : events) {
    auto res = client_->Post("/sessions/" + id + "/messages", e, "application/json");
    ASSERT_TRUE(res);
    ASSERT_EQ(res->status, 200) << res->body;
    last = json::parse(res->body);
  }
  EXPECT_EQ(last["decision"]["metrics"]["event_count"], 9);
  auto closed = client_->Post("/sessions/" + id + "/close", "", "application/json");
  ASSERT_TRUE(closed);
  EXPECT_EQ(closed->status, 200);
  auto report = client_->Get("/sessions/" + id + "/report");
  ASSERT_TRUE(report);
  EXPECT_TRUE(json::parse(report->body)["final"]);
  auto again = client_->Post("/sessions/" + id + "/messages", events[0], "application/json");
  ASSERT_TRUE(again);
  EXPECT_EQ(again->status, 409);
}

TEST_F(LiveServer, OversizeBodyIs413) {
  const auto id = create();
  const json body{{"target", "patient"}, {"text", std::string(70 * 1024, 'a')}};
  auto res = client_->Post("/sessions/" + id + "/messages", body.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 413);
}

TEST_F(LiveServer, OversizeTextIs400) {
  const auto id = create();
  const json body{{"target", "patient"}, {"text", std::string(9 * 1024, 'a')}};
  auto res = client_->Post("/sessions/" + id + "/messages", body.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
}

TEST_F(LiveServer, StreamBackfillsThenFollows) {
  const auto id = create();
  const auto events = escalation();
  client_->Post("/sessions/" + id + "/messages", events[0], "application/json");

  WsClient ws(server_->port(), "/sessions/" + id + "/stream?from=1");
  EXPECT_EQ(ws.next()["kind"], "agent_reply");
  EXPECT_EQ(ws.next()["kind"], "decision");
  EXPECT_EQ(ws.next()["kind"], "metrics");

  client_->Post("/sessions/" + id + "/messages", events[1], "application/json");
  const auto reply = ws.next();
  EXPECT_EQ(reply["kind"], "agent_reply");
  EXPECT_EQ(reply["payload"]["role"], "patient");
  const auto decision = ws.next();
  EXPECT_EQ(decision["kind"], "decision");
  EXPECT_GT(decision["seq"].get<int>(), 4);
  EXPECT_EQ(ws.next()["kind"], "metrics");

  client_->Post("/sessions/" + id + "/close", "", "application/json");
  EXPECT_EQ(ws.next()["kind"], "report");
  ws.ws.close(websocket::close_code::normal);
}

TEST_F(LiveServer, StreamUnknownSessionRejected) {
  net::io_context ioc;
  websocket::stream<beast::tcp_stream> ws{ioc};
  net::ip::tcp::resolver resolver(ioc);
  beast::get_lowest_layer(ws).connect(*resolver.resolve("127.0.0.1", std::to_string(server_->port())).begin());
  beast::error_code ec;
  ws.handshake("127.0.0.1", "/sessions/missing/stream", ec);
  EXPECT_EQ(ec, websocket::error::upgrade_declined);

  const httplib::Headers upgrade{{"Connection", "Upgrade"},
                                 {"Upgrade", "websocket"},
                                 {"Sec-WebSocket-Version", "13"},
                                 {"Sec-WebSocket-Key", "dGhlIHNhbXBsZSBub25jZQ=="}};
  auto res = client_->Get("/sessions/missing/stream", upgrade);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
}

TEST_F(LiveServer, ConcurrentSessions) {
  const auto events = escalation();
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      httplib::Client c("127.0.0.1", server_->port());
      auto res = c.Post("/sessions", R"({"scenario_id": "chest_pain"})", "application/json");
      if (!res || res->status != 201) return;
      const std::string id = json::parse(res->body)["session_id"];
      for (const auto& e : events) {
        auto r = c.Post("/sessions/" + id + "/messages", e, "application/json");
        if (!r || r->status != 200) return;
      }
      ++ok;
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok, 4);
}
