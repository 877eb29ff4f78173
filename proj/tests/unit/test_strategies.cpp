#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "coarsekit/decomposition.hpp"
#include "coarsekit/fixtures.hpp"

using namespace coarsekit;

namespace {

PointSet range(PointId a, PointId b) {
  PointSet p;
  for (PointId x = a; x <= b; ++x) p.push_back(x);
  return p;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidInput;
}

// Random cover by unions of balls, deduplicated.
Cover random_ball_cover(const SpacePtr& s, std::mt19937_64& rng) {
  Cover c{whole_space(s), {}};
  std::vector<bool> hit(s->size(), false);
  const double diam = s->diameter();
  for (PointId x = 0; x < s->size(); ++x) {
    if (hit[x]) continue;
    const double radius = 1.0 + double(rng() % 100) / 100.0 * diam / 2.0;
    PointSet e;
    for (PointId y = 0; y < s->size(); ++y)
      if (s->dist(x, y) < radius) {
        e.push_back(y);
        hit[y] = true;
      }
    c.elements.push_back(e);
  }
  return deduplicate(c);
}

}  // namespace

TEST_CASE("interior-shrinking construction on two overlapping intervals") {
  auto line = fixtures::line(10);
  Cover c{whole_space(line), {range(0, 5), range(3, 9)}};
  auto cert = grave_construct(c, 1, 1);
  REQUIRE(verify_certificate(cert).valid);
  CHECK(cert.members[0].levels[0] == std::vector<PointSet>{range(0, 3), range(5, 9)});
  CHECK(cert.members[0].levels[1] == std::vector<PointSet>{{4}});
}

TEST_CASE("interior-shrinking preconditions") {
  auto line = fixtures::line(10);
  Cover c{whole_space(line), {range(0, 5), range(3, 9)}};
  CHECK(code_of([&] { grave_construct(c, 1.5, 1); }) == ErrorCode::PreconditionFailed);  // L = 2 < 3
  Cover triple{whole_space(line), {range(0, 5), range(3, 9), range(2, 6)}};
  CHECK(code_of([&] { grave_construct(triple, 0.5, 1); }) == ErrorCode::PreconditionFailed);  // multiplicity 3
  CHECK(code_of([&] { grave_construct(c, 0, 1); }) == ErrorCode::InvalidInput);
}

TEST_CASE("interior-shrinking agrees with the subset enumeration") {
  std::mt19937_64 rng(31);
  int checked = 0;
  for (int trial = 0; trial < 120; ++trial) {
    SpacePtr s = trial % 3 == 0   ? fixtures::line(12 + trial % 9)
                 : trial % 3 == 1 ? fixtures::grid(4, 4)
                                  : fixtures::random_metric(9, rng, 5);
    auto c = random_ball_cover(s, rng);
    const std::size_t mult = multiplicity(c);
    const double L = lebesgue_number(c);
    if (std::isinf(L) || mult > 4) continue;
    const std::size_t n = mult - 1;
    const double r = 0.9 * L / double(n + 1);
    auto cert = grave_construct(c, r, n);
    CHECK(verify_certificate(cert).valid);
    auto want = oracle::literal_grave(*s, s->all_points(), c.elements, r, n);
    REQUIRE(cert.members[0].levels.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(cert.members[0].levels[i] == want[i]);
    // Every part lies inside some cover element.
    for (const auto& level : cert.members[0].levels)
      for (const auto& part : level) {
        bool inside = false;
        for (const auto& e : c.elements) inside = inside || std::includes(e.begin(), e.end(), part.begin(), part.end());
        CHECK(inside);
      }
    ++checked;
  }
  CHECK(checked > 40);
}

TEST_CASE("net covers") {
  std::mt19937_64 rng(37);
  auto cloud = fixtures::random_cloud(60, 2, rng);
  for (double s : {0.5, 1.0, 2.0}) {
    const auto nc = net_cover(whole_space(cloud), s);
    for (PointId a : nc.net)
      for (PointId b : nc.net)
        if (a != b) CHECK(cloud->dist(a, b) >= 2 * s - 1e-9);
    CHECK(nc.multiplicity == multiplicity(nc.cover));
    CHECK(nc.lebesgue == lebesgue_number(nc.cover));
    CHECK(nc.lebesgue >= 2 * s);
    validate_cover(nc.cover);
    for (const auto& e : nc.cover.elements) CHECK(diameter(*cloud, e) <= 8 * s + 1e-9);
  }
}

TEST_CASE("exhaustive oracle on the eight-point line") {
  auto line = fixtures::line(8);
  auto v = exhaustive_decompose(whole_space(line), 1, 1, 1);
  CHECK(v.decomposable);
  CHECK(v.min_worst_diameter == 0.0);  // alternating levels give singletons
  REQUIRE(v.witness);
  CHECK(verify_certificate(*v.witness).valid);
  auto none = exhaustive_decompose(whole_space(line), 1, 0, 3);
  CHECK_FALSE(none.decomposable);
  CHECK(none.min_worst_diameter == 7.0);
  CHECK_FALSE(none.witness);
}

TEST_CASE("exhaustive oracle matches brute force on random metrics") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    auto s = fixtures::random_metric(7, rng, 5);
    const double r = double(1 + rng() % 3);
    const std::size_t n = rng() % 2;
    const double want = oracle::min_worst_diameter(*s, s->all_points(), r, n);
    const double D = double(rng() % 6);
    auto v = exhaustive_decompose(whole_space(s), r, n, D);
    CHECK(v.min_worst_diameter == want);
    CHECK(v.decomposable == (want <= D));
    if (v.witness) {
      CHECK(verify_certificate(*v.witness).valid);
      CHECK(mesh(v.witness->target) <= D);
    }
  }
}

TEST_CASE("exhaustive oracle refuses large inputs") {
  auto line = fixtures::line(20);
  CHECK(code_of([&] { exhaustive_decompose(whole_space(line), 1, 1, 5); }) == ErrorCode::TooLarge);
}

TEST_CASE("strategy names round-trip") {
  for (auto s : {Strategy::NetThenGrave, Strategy::Singletons, Strategy::OracleSmall})
    CHECK(parse_strategy(to_string(s)) == s);
  CHECK(code_of([] { parse_strategy("greedy"); }) == ErrorCode::InvalidInput);
}

TEST_CASE("defending with singletons") {
  auto X = single_space_family(fixtures::line(8));
  auto c = defend(X, 0.5, Strategy::Singletons);
  CHECK(c.n == 0);
  CHECK(mesh(c.target) == 0.0);
  CHECK(code_of([&] { defend(X, 1, Strategy::Singletons); }) == ErrorCode::StrategyFailed);
}

TEST_CASE("defending with the exhaustive oracle") {
  DefendOptions opt;
  opt.n = 1;
  opt.diameter_bound = 1;
  auto c = defend(single_space_family(fixtures::line(8)), 1, Strategy::OracleSmall, opt);
  CHECK(verify_certificate(c).valid);
  CHECK(c.n == 1);
  CHECK(mesh(c.target) <= 1.0);
  CHECK(code_of([&] { defend(single_space_family(fixtures::line(30)), 1, Strategy::OracleSmall, opt); }) ==
        ErrorCode::StrategyFailed);
}

TEST_CASE("defending with net covers and interior shrinking") {
  for (auto s : {fixtures::line(100), fixtures::grid(8, 8), fixtures::binary_tree(4)}) {
    auto X = single_space_family(s);
    for (double r : {0.5, 1.0, 2.0}) {
      auto c = defend(X, r, Strategy::NetThenGrave);
      CHECK(verify_certificate(c).valid);
      CHECK(oracle::is_decomposition(*s, s->all_points(), c.members[0].levels, r));
      CHECK(mesh(c.target) < s->diameter() + 1e-9);
    }
  }
}
