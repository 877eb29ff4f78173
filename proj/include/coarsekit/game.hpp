#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coarsekit/decomposition.hpp"

namespace coarsekit {

enum class GameStatus { InProgress, DefenderWon, DefenderStuck };

std::string_view to_string(GameStatus s);
GameStatus parse_status(std::string_view name);

struct GameTurn {
  double r = 0.0;
  DecompositionCertificate certificate;  // decomposes the previous family; target is Y_k
  double mesh = 0.0;                     // mesh(Y_k)
};

inline constexpr std::size_t kDefaultMaxTurns = 32;

struct GameSession {
  std::uint64_t id = 0;
  MetricFamily initial;
  double bound = 0.0;
  Strategy strategy = Strategy::NetThenGrave;
  DefendOptions options;
  std::size_t max_turns = kDefaultMaxTurns;
  std::vector<GameTurn> turns;
  GameStatus status = GameStatus::InProgress;
  std::string reason;  // why the defender is stuck

  const MetricFamily& current() const;
  double current_mesh() const;
};

// DefenderWon at once when mesh(family) <= B.
GameSession start_session(MetricFamily family, double bound, Strategy strategy,
                          std::size_t max_turns = kDefaultMaxTurns, DefendOptions options = {});

// One round: the defender answers scale r on the current family. A strategy
// failure ends the session with DefenderStuck and the reason; running out of
// turns does the same. Throws SessionFinished, InvalidInput (r <= 0).
void challenge(GameSession& session, double r);

// r_k = first * ratio^k for k = 0 .. turns-1.
std::vector<double> geometric_script(double first, double ratio, std::size_t turns);
std::vector<double> constant_script(double r, std::size_t turns);

// Challenges in order until the session finishes or the script runs out.
void run_script(GameSession& session, const std::vector<double>& scales);

struct ReplayReport {
  bool valid = false;
  std::string message;
  std::optional<DecompositionCertificate> composed;
  double r = 0.0;
  std::size_t n = 0;
  std::size_t expected_n = 0;  // prod (n_k + 1) - 1
  double expected_r = 0.0;     // min r_k
  double target_mesh = 0.0;
};

// Folds every turn certificate through compose_certificates and verifies the
// result. Throws ComposeMismatch when turns do not chain.
ReplayReport replay_transcript(const GameSession& session);

}  // namespace coarsekit
