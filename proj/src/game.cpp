#include "coarsekit/game.hpp"

namespace coarsekit {

std::string_view to_string(GameStatus s) {
  switch (s) {
    case GameStatus::InProgress: return "InProgress";
    case GameStatus::DefenderWon: return "DefenderWon";
    case GameStatus::DefenderStuck: return "DefenderStuck";
  }
  return "unknown";
}

GameStatus parse_status(std::string_view name) {
  if (name == "InProgress") return GameStatus::InProgress;
  if (name == "DefenderWon") return GameStatus::DefenderWon;
  if (name == "DefenderStuck") return GameStatus::DefenderStuck;
  throw Error(ErrorCode::InvalidInput, "unknown session status '" + std::string(name) + "'");
}

const MetricFamily& GameSession::current() const {
  return turns.empty() ? initial : turns.back().certificate.target;
}

double GameSession::current_mesh() const { return turns.empty() ? mesh(initial) : turns.back().mesh; }

GameSession start_session(MetricFamily family, double bound, Strategy strategy, std::size_t max_turns,
                          DefendOptions options) {
  validate_family(family);
  if (!(bound >= 0.0)) throw Error(ErrorCode::InvalidInput, "bound must be nonnegative", {{"bound", bound}});
  if (max_turns == 0) throw Error(ErrorCode::InvalidInput, "max_turns must be positive");
  GameSession s;
  s.initial = std::move(family);
  s.bound = bound;
  s.strategy = strategy;
  s.options = options;
  s.max_turns = max_turns;
  if (tol::leq(mesh(s.initial), bound)) s.status = GameStatus::DefenderWon;
  return s;
}

void challenge(GameSession& session, double r) {
  if (session.status != GameStatus::InProgress) {
    throw Error(ErrorCode::SessionFinished, "session is finished",
                {{"status", std::string(to_string(session.status))}});
  }
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorCode::InvalidInput, "r must be a positive number");
  try {
    auto cert = defend(session.current(), r, session.strategy, session.options);
    const double m = mesh(cert.target);
    session.turns.push_back(GameTurn{r, std::move(cert), m});
  } catch (const Error& e) {
    if (e.code() != ErrorCode::StrategyFailed) throw;
    session.status = GameStatus::DefenderStuck;
    session.reason = e.what();
    return;
  }
  if (tol::leq(session.turns.back().mesh, session.bound)) {
    session.status = GameStatus::DefenderWon;
  } else if (session.turns.size() >= session.max_turns) {
    session.status = GameStatus::DefenderStuck;
    session.reason = "max_turns reached";
  }
}

std::vector<double> geometric_script(double first, double ratio, std::size_t turns) {
  std::vector<double> out;
  double r = first;
  for (std::size_t k = 0; k < turns; ++k, r *= ratio) out.push_back(r);
  return out;
}

std::vector<double> constant_script(double r, std::size_t turns) { return std::vector<double>(turns, r); }

void run_script(GameSession& session, const std::vector<double>& scales) {
  for (double r : scales) {
    if (session.status != GameStatus::InProgress) return;
    challenge(session, r);
  }
}

ReplayReport replay_transcript(const GameSession& session) {
  ReplayReport rep;
  if (session.turns.empty()) {
    rep.message = "no turns to compose";
    return rep;
  }
  rep.expected_r = kInfinity;
  std::size_t product = 1;
  for (const auto& t : session.turns) {
    rep.expected_r = std::min(rep.expected_r, t.certificate.r);
    product *= t.certificate.n + 1;
  }
  rep.expected_n = product - 1;
  DecompositionCertificate acc = session.turns.front().certificate;
  for (std::size_t k = 1; k < session.turns.size(); ++k) {
    try {
      acc = compose_certificates(acc, session.turns[k].certificate);
    } catch (const Error& e) {
      throw Error(ErrorCode::ComposeMismatch, std::string("turns do not chain: ") + e.what(), {{"turn", k}});
    }
  }
  const auto check = verify_certificate(acc);
  rep.r = acc.r;
  rep.n = acc.n;
  rep.target_mesh = mesh(acc.target);
  rep.valid = check.valid && acc.r == rep.expected_r && acc.n == rep.expected_n;
  rep.message = check.valid ? (rep.valid ? "composed certificate verifies" : "composed (r, n) differ from expected")
                            : check.message;
  rep.composed = std::move(acc);
  return rep;
}

}  // namespace coarsekit
