#include <chrono>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "coarsekit/game_service.hpp"

using namespace coarsekit;

namespace {

json post(GameService& svc, const std::string& path, const json& body, int want) {
  const auto out = svc.handle("POST", path, body.dump());
  CHECK(out.status == want);
  return out.body;
}

}  // namespace

TEST_CASE("session lifecycle through the dispatcher") {
  GameService svc;
  auto created = post(svc, "/sessions", {{"fixture", "line100"}, {"bound", 5}, {"max_turns", 16}}, 201);
  CHECK(created["id"] == 1);
  CHECK(created["status"] == "InProgress");
  CHECK(created["strategy"] == "net_then_grave");

  auto after = post(svc, "/sessions/1/challenge", {{"r", 2}}, 200);
  CHECK(after["status"] == "DefenderWon");
  CHECK(after["turn_count"] == 1);
  CHECK(after["turns"][0]["mesh"].get<double>() <= 5.0);

  CHECK(svc.handle("GET", "/sessions/1", "").body == after);
  post(svc, "/sessions/1/challenge", {{"r", 2}}, 409);
  CHECK(svc.handle("DELETE", "/sessions/1", "").status == 200);
  CHECK(svc.handle("GET", "/sessions/1", "").status == 404);
  CHECK(svc.handle("DELETE", "/sessions/1", "").status == 404);

  auto second = post(svc, "/sessions", {{"fixture", "line8"}, {"bound", 0}}, 201);
  CHECK(second["id"] == 2);
}

TEST_CASE("dispatcher errors") {
  GameService svc;
  CHECK(svc.handle("POST", "/sessions", "{not json").status == 400);
  CHECK(post(svc, "/sessions", {{"fixture", "nowhere"}}, 422)["code"] == "InvalidInput");
  CHECK(post(svc, "/sessions", {{"bound", 1}}, 422)["code"] == "InvalidInput");
  CHECK(post(svc, "/sessions", {{"fixture", "line8"}, {"strategy", "greedy"}}, 422)["code"] == "InvalidInput");
  post(svc, "/sessions", {{"fixture", "line8"}, {"bound", 0}, {"strategy", "singletons"}}, 201);
  CHECK(post(svc, "/sessions/1/challenge", {{"r", -1}}, 422)["code"] == "InvalidInput");
  CHECK(post(svc, "/sessions/1/challenge", json::object(), 422)["code"] == "InvalidInput");
  post(svc, "/sessions/7/challenge", {{"r", 1}}, 404);
  CHECK(svc.handle("PUT", "/sessions/1", "").status == 405);
  CHECK(svc.handle("GET", "/elsewhere", "").status == 404);

  auto stuck = post(svc, "/sessions/1/challenge", {{"r", 1}}, 200);
  CHECK(stuck["status"] == "DefenderStuck");
  CHECK_FALSE(stuck["reason"].get<std::string>().empty());
}

TEST_CASE("families with inline spaces") {
  GameService svc;
  json space = {{"id", "tri"}, {"type", "matrix"}, {"matrix", {{0, 1, 2}, {1, 0, 1}, {2, 1, 0}}}};
  json family = {{"id", "F"}, {"members", {{{"space", "tri"}, {"points", {0, 1, 2}}}}}};
  auto s = post(svc, "/sessions", {{"family", family}, {"spaces", {space}}, {"bound", 0}, {"strategy", "singletons"}},
                201);
  CHECK(s["initial"]["members"][0]["space"] == "tri");
  auto won = post(svc, "/sessions/1/challenge", {{"r", 0.5}}, 200);
  CHECK(won["status"] == "DefenderWon");
}

TEST_CASE("fixture listing") {
  GameService svc;
  const auto out = svc.handle("GET", "/fixtures", "");
  CHECK(out.status == 200);
  bool seen = false;
  for (const auto& f : out.body["fixtures"]) seen = seen || (f["name"] == "line8" && f["points"] == 8);
  CHECK(seen);
}

TEST_CASE("concurrent challenges on distinct sessions") {
  GameService svc;
  for (int k = 0; k < 4; ++k) post(svc, "/sessions", {{"fixture", "line64"}, {"bound", 0.5}, {"max_turns", 3}}, 201);
  std::vector<std::thread> threads;
  std::vector<int> statuses(8, 0);
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      const auto path = "/sessions/" + std::to_string(1 + t % 4) + "/challenge";
      statuses[t] = svc.handle("POST", path, R"({"r": 1})").status;
    });
  }
  for (auto& th : threads) th.join();
  for (int s : statuses) CHECK((s == 200 || s == 409));
  const auto snap = svc.snapshot();
  REQUIRE(snap["sessions"].size() == 4);
  for (const auto& s : snap["sessions"]) CHECK(s["turn_count"] == 2);
}

TEST_CASE("HTTP server on an ephemeral port") {
  GameService svc;
  std::thread server([&] { svc.serve("127.0.0.1", 0); });
  for (int k = 0; k < 500 && (!svc.running() || svc.bound_port() <= 0); ++k)
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  REQUIRE(svc.running());
  httplib::Client cli("127.0.0.1", svc.bound_port());

  auto res = cli.Post("/sessions", R"({"fixture": "line100", "bound": 5})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 201);
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");
  CHECK(json::parse(res->body)["status"] == "InProgress");

  res = cli.Post("/sessions/1/challenge", R"({"r": 2})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body)["status"] == "DefenderWon");

  res = cli.Get("/sessions/1");
  REQUIRE(res);
  CHECK(json::parse(res->body)["turn_count"] == 1);

  res = cli.Options("/sessions");
  REQUIRE(res);
  CHECK(res->status == 204);

  res = cli.Get("/sessions/99");
  REQUIRE(res);
  CHECK(res->status == 404);

  svc.stop();
  server.join();
}
