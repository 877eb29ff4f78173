#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "coarsekit/game.hpp"
#include "coarsekit/io.hpp"

namespace coarsekit {

struct ServiceResponse {
  int status = 200;
  json body;
};

// In-memory session store behind the HTTP API. Ids are monotonic integers
// starting at 1. The store mutex guards the map; each session has its own
// mutex so challenges to one session are serialized while distinct sessions
// proceed independently. There is no authentication.
class GameService {
 public:
  explicit GameService(std::string fixture_dir = {});

  // POST /sessions {"fixture" | "family" (+ "spaces"), "bound", "strategy", "max_turns", "options"}
  ServiceResponse create_session(const json& body);
  // GET /sessions/{id}
  ServiceResponse get_session(std::uint64_t id);
  // POST /sessions/{id}/challenge {"r"}
  ServiceResponse challenge_session(std::uint64_t id, const json& body);
  // DELETE /sessions/{id}
  ServiceResponse delete_session(std::uint64_t id);
  // GET /fixtures
  ServiceResponse list_fixtures() const;

  // Raw dispatch used by the HTTP layer and by tests.
  ServiceResponse handle(const std::string& method, const std::string& path, const std::string& body);

  // Blocks serving HTTP/1.1 until stop() is called from another thread.
  bool serve(const std::string& host, int port);
  void stop();
  bool running() const;
  int bound_port() const { return port_.load(); }

  json snapshot();

 private:
  struct Entry {
    std::mutex mutex;
    GameSession session;
  };

  std::shared_ptr<Entry> find(std::uint64_t id);
  SpacePtr load_fixture(const std::string& name) const;

  std::string fixture_dir_;
  std::mutex store_mutex_;
  std::map<std::uint64_t, std::shared_ptr<Entry>> sessions_;
  std::uint64_t next_id_ = 1;
  struct Server;
  std::shared_ptr<Server> server_;
  std::atomic<int> port_{0};
};

}  // namespace coarsekit
