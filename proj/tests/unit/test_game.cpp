#include "doctest.h"
#include "oracles.hpp"
#include "coarsekit/fixtures.hpp"
#include "coarsekit/game.hpp"

using namespace coarsekit;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidInput;
}

}  // namespace

TEST_CASE("status names round-trip") {
  for (auto s : {GameStatus::InProgress, GameStatus::DefenderWon, GameStatus::DefenderStuck})
    CHECK(parse_status(to_string(s)) == s);
  CHECK(code_of([] { parse_status("Draw"); }) == ErrorCode::InvalidInput);
}

TEST_CASE("scripts") {
  CHECK(geometric_script(1, 2, 3) == std::vector<double>{1, 2, 4});
  CHECK(constant_script(0.5, 2) == std::vector<double>{0.5, 0.5});
}

TEST_CASE("a family already below the bound is won at once") {
  auto s = start_session(single_space_family(fixtures::line(4)), 3, Strategy::NetThenGrave);
  CHECK(s.status == GameStatus::DefenderWon);
  CHECK(code_of([&] { challenge(s, 1); }) == ErrorCode::SessionFinished);
}

TEST_CASE("net covers win on the long line in one round") {
  auto s = start_session(single_space_family(fixtures::line(101)), 5, Strategy::NetThenGrave, 16);
  challenge(s, 2);
  REQUIRE(s.turns.size() == 1);
  CHECK(s.status == GameStatus::DefenderWon);
  CHECK(s.current_mesh() <= 5.0);
  CHECK(s.current().id == s.turns[0].certificate.target.id);
  const auto rep = replay_transcript(s);
  CHECK(rep.valid);
  CHECK(rep.r == 2.0);
  CHECK(rep.n == s.turns[0].certificate.n);
}

TEST_CASE("multi-round transcripts compose") {
  DefendOptions opt;
  opt.max_levels = 3;
  auto s = start_session(single_space_family(fixtures::line(64)), 0.5, Strategy::NetThenGrave, 3, opt);
  run_script(s, geometric_script(1, 0.5, 5));
  CHECK(s.turns.size() >= 2);
  CHECK(s.status != GameStatus::InProgress);
  if (s.status == GameStatus::DefenderStuck) CHECK_FALSE(s.reason.empty());
  const auto rep = replay_transcript(s);
  CHECK(rep.valid);
  CHECK(rep.n == rep.expected_n);
  CHECK(rep.r == rep.expected_r);
  REQUIRE(rep.composed);
  auto line = s.initial.members[0].space;
  CHECK(oracle::is_decomposition(*line, line->all_points(), rep.composed->members[0].levels, rep.r));
}

TEST_CASE("strategy failure leaves the defender stuck") {
  auto s = start_session(single_space_family(fixtures::line(8)), 0, Strategy::Singletons);
  challenge(s, 0.5);
  CHECK(s.status == GameStatus::DefenderWon);  // singletons have mesh 0

  auto t = start_session(single_space_family(fixtures::line(8)), 0, Strategy::Singletons);
  challenge(t, 1);
  CHECK(t.status == GameStatus::DefenderStuck);
  CHECK(t.reason.find("singletons") != std::string::npos);
  CHECK(t.turns.empty());
}

TEST_CASE("running out of turns") {
  auto s = start_session(single_space_family(fixtures::line(64)), 0.5, Strategy::NetThenGrave, 1);
  challenge(s, 4);
  CHECK(s.status == GameStatus::DefenderStuck);
  CHECK(s.reason == "max_turns reached");
}

TEST_CASE("bad challenges and bad sessions") {
  auto s = start_session(single_space_family(fixtures::line(64)), 0.5, Strategy::NetThenGrave);
  CHECK(code_of([&] { challenge(s, 0); }) == ErrorCode::InvalidInput);
  CHECK(code_of([&] { challenge(s, -1); }) == ErrorCode::InvalidInput);
  CHECK(s.status == GameStatus::InProgress);
  CHECK(code_of([] { start_session(single_space_family(fixtures::line(4)), -1, Strategy::Singletons); }) ==
        ErrorCode::InvalidInput);
}

TEST_CASE("replay rejects turns that do not chain") {
  auto s = start_session(single_space_family(fixtures::line(64)), 0.5, Strategy::NetThenGrave, 4);
  challenge(s, 1);
  challenge(s, 1);
  REQUIRE(s.turns.size() == 2);
  s.turns[1].certificate.source = s.initial;
  CHECK(code_of([&] { replay_transcript(s); }) == ErrorCode::ComposeMismatch);
}
