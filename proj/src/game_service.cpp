#include "coarsekit/game_service.hpp"

#include <filesystem>
#include <fstream>
#include <regex>

#include "httplib.h"
#include "coarsekit/fixtures.hpp"

namespace coarsekit {

struct GameService::Server {
  httplib::Server http;
};

namespace {

ServiceResponse error_response(int status, const std::string& code, const std::string& message) {
  return {status, {{"code", code}, {"message", message}}};
}

ServiceResponse error_response(int status, const Error& e) {
  return {status, {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}};
}

}  // namespace

GameService::GameService(std::string fixture_dir)
    : fixture_dir_(std::move(fixture_dir)), server_(std::make_shared<Server>()) {}

SpacePtr GameService::load_fixture(const std::string& name) const {
  if (!fixture_dir_.empty()) {
    const auto path = std::filesystem::path(fixture_dir_) / (name + ".json");
    if (name.find('/') == std::string::npos && std::filesystem::exists(path)) {
      std::ifstream in(path);
      return space_from_json(json::parse(in));
    }
  }
  if (!fixtures::has(name)) throw Error(ErrorCode::InvalidInput, "unknown fixture '" + name + "'");
  return fixtures::load(name);
}

ServiceResponse GameService::create_session(const json& body) {
  try {
    if (!body.is_object()) throw Error(ErrorCode::InvalidInput, "body must be a JSON object");
    MetricFamily family;
    if (body.contains("fixture")) {
      family = single_space_family(load_fixture(body.at("fixture").get<std::string>()));
    } else if (body.contains("family")) {
      SpaceRegistry reg;
      if (body.contains("spaces")) reg.load(body.at("spaces"));
      family = family_from_json(body.at("family"), reg);
    } else {
      throw Error(ErrorCode::InvalidInput, "either 'fixture' or 'family' is required");
    }
    const double bound = number_from_json(body.value("bound", json(0.0)));
    const auto strategy = parse_strategy(body.value("strategy", std::string("net_then_grave")));
    const auto max_turns = body.value("max_turns", kDefaultMaxTurns);
    const auto options = options_from_json(body.value("options", json::object()));
    auto entry = std::make_shared<Entry>();
    entry->session = start_session(std::move(family), bound, strategy, max_turns, options);
    json state;
    {
      std::lock_guard lock(store_mutex_);
      entry->session.id = next_id_++;
      sessions_[entry->session.id] = entry;
      state = session_to_json(entry->session);
    }
    return {201, state};
  } catch (const Error& e) {
    return error_response(422, e);
  } catch (const json::exception& e) {
    return error_response(422, "InvalidInput", e.what());
  }
}

std::shared_ptr<GameService::Entry> GameService::find(std::uint64_t id) {
  std::lock_guard lock(store_mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

ServiceResponse GameService::get_session(std::uint64_t id) {
  auto entry = find(id);
  if (!entry) return error_response(404, "NotFound", "unknown session " + std::to_string(id));
  std::lock_guard lock(entry->mutex);
  return {200, session_to_json(entry->session)};
}

ServiceResponse GameService::challenge_session(std::uint64_t id, const json& body) {
  auto entry = find(id);
  if (!entry) return error_response(404, "NotFound", "unknown session " + std::to_string(id));
  double r = 0.0;
  try {
    if (!body.is_object() || !body.contains("r")) throw Error(ErrorCode::InvalidInput, "field 'r' is required");
    r = number_from_json(body.at("r"));
  } catch (const Error& e) {
    return error_response(422, e);
  }
  if (!(r > 0.0) || !std::isfinite(r)) return error_response(422, "InvalidInput", "r must be a positive number");
  std::lock_guard lock(entry->mutex);
  try {
    challenge(entry->session, r);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SessionFinished) return error_response(409, e);
    return error_response(422, e);
  }
  return {200, session_to_json(entry->session)};
}

ServiceResponse GameService::delete_session(std::uint64_t id) {
  std::lock_guard lock(store_mutex_);
  if (sessions_.erase(id) == 0) return error_response(404, "NotFound", "unknown session " + std::to_string(id));
  return {200, {{"deleted", id}}};
}

ServiceResponse GameService::list_fixtures() const {
  json list = json::array();
  for (const auto& name : fixtures::names()) {
    const auto space = fixtures::load(name);
    list.push_back({{"name", name}, {"points", space->size()}, {"diameter", space->diameter()}});
  }
  return {200, {{"fixtures", list}}};
}

json GameService::snapshot() {
  std::vector<std::shared_ptr<Entry>> entries;
  {
    std::lock_guard lock(store_mutex_);
    for (const auto& [_, e] : sessions_) entries.push_back(e);
  }
  json out = json::array();
  for (const auto& e : entries) {
    std::lock_guard lock(e->mutex);
    out.push_back(session_to_json(e->session));
  }
  return {{"sessions", out}};
}

ServiceResponse GameService::handle(const std::string& method, const std::string& path, const std::string& body) {
  static const std::regex session_re(R"(^/sessions/(\d+)$)");
  static const std::regex challenge_re(R"(^/sessions/(\d+)/challenge$)");
  auto parse_body = [&](json& out) -> bool {
    if (body.empty()) {
      out = json::object();
      return true;
    }
    out = json::parse(body, nullptr, false);
    return !out.is_discarded();
  };
  auto parse_id = [](const std::string& s, std::uint64_t& id) {
    try {
      id = std::stoull(s);
      return true;
    } catch (const std::exception&) {
      return false;
    }
  };
  std::smatch m;
  json j;
  std::uint64_t id = 0;
  if (path == "/fixtures" && method == "GET") return list_fixtures();
  if (path == "/sessions" && method == "POST") {
    if (!parse_body(j)) return error_response(400, "BadRequest", "body is not valid JSON");
    return create_session(j);
  }
  if (std::regex_match(path, m, challenge_re) && method == "POST") {
    if (!parse_id(m[1], id)) return error_response(404, "NotFound", "unknown session");
    if (!parse_body(j)) return error_response(400, "BadRequest", "body is not valid JSON");
    return challenge_session(id, j);
  }
  if (std::regex_match(path, m, session_re)) {
    if (!parse_id(m[1], id)) return error_response(404, "NotFound", "unknown session");
    if (method == "GET") return get_session(id);
    if (method == "DELETE") return delete_session(id);
    return error_response(405, "MethodNotAllowed", method + " " + path);
  }
  return error_response(404, "NotFound", "no route for " + method + " " + path);
}

bool GameService::serve(const std::string& host, int port) {
  auto& http = server_->http;
  auto bridge = [this](const httplib::Request& req, httplib::Response& res) {
    const auto out = handle(req.method, req.path, req.body);
    res.status = out.status;
    res.set_content(canonical(out.body), "application/json");
    res.set_header("Access-Control-Allow-Origin", "*");
  };
  http.Get(R"(/.*)", bridge);
  http.Post(R"(/.*)", bridge);
  http.Delete(R"(/.*)", bridge);
  http.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  if (port == 0) {
    port_ = http.bind_to_any_port(host);
    if (port_ < 0) return false;
  } else {
    if (!http.bind_to_port(host, port)) return false;
    port_ = port;
  }
  return http.listen_after_bind();
}

void GameService::stop() { server_->http.stop(); }

bool GameService::running() const { return server_->http.is_running(); }

}  // namespace coarsekit
