#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "coarsekit/covers.hpp"
#include "coarsekit/fixtures.hpp"

using namespace coarsekit;

namespace {

Cover cover_of(const SpacePtr& s, std::vector<PointSet> elements) { return Cover{whole_space(s), std::move(elements)}; }

PointSet range(PointId a, PointId b) {
  PointSet p;
  for (PointId x = a; x <= b; ++x) p.push_back(x);
  return p;
}

Cover random_cover(const SpacePtr& s, std::mt19937_64& rng, std::size_t elements) {
  Cover c{whole_space(s), std::vector<PointSet>(elements)};
  for (PointId x = 0; x < s->size(); ++x) {
    c.elements[rng() % elements].push_back(x);
    for (std::size_t e = 0; e < elements; ++e)
      if (rng() % 4 == 0) c.elements[e].push_back(x);
  }
  for (auto& e : c.elements) e = make_point_set(e);
  c.elements.erase(std::remove_if(c.elements.begin(), c.elements.end(), [](const PointSet& e) { return e.empty(); }),
                   c.elements.end());
  return c;
}

}  // namespace

TEST_CASE("multiplicity") {
  auto line = fixtures::line(5);
  CHECK(multiplicity(cover_of(line, {{0, 1}, {2, 3, 4}})) == 1);
  CHECK(multiplicity(cover_of(line, {{0, 1, 2}, {2, 3, 4}})) == 2);
}

TEST_CASE("d-multiplicity uses open balls that meet elements") {
  auto line = fixtures::line(7);
  auto c = cover_of(line, {{0, 1, 2}, {3}, {4, 5, 6}});
  CHECK(d_multiplicity(c, 0.5) == multiplicity(c));
  auto spaced = cover_of(line, {{0, 1, 2, 3}, {4, 5, 6}});
  CHECK(d_multiplicity(spaced, 1.0) == 1);  // B_1(x) = {x}
  auto no3 = Cover{Subspace{line, {0, 1, 2, 4, 5, 6}, ""}, {{0, 1, 2}, {4, 5, 6}}};
  CHECK(d_multiplicity(no3, 2.5) == 2);  // B_2.5(2) = {0, 1, 2, 4}
  CHECK(d_multiplicity(no3, 2.0) == 1);  // distance 2 is outside the open ball
  CHECK(d_multiplicity(c, 8.0) == 3);
}

TEST_CASE("Lebesgue number") {
  auto five = fixtures::line(5);
  CHECK(std::isinf(lebesgue_number(cover_of(five, {range(0, 4)}))));
  CHECK(lebesgue_number(cover_of(five, {{0, 1, 2}, {2, 3, 4}})) == 1.0);
  auto ten = fixtures::line(10);
  CHECK(lebesgue_number(cover_of(ten, {range(0, 4), range(5, 9)})) == 1.0);
  CHECK(lebesgue_number(cover_of(ten, {range(0, 5), range(3, 9)})) == 2.0);
}

TEST_CASE("enlargement") {
  auto ten = fixtures::line(10);
  auto e = enlarge(cover_of(ten, {{0}, {9}, range(0, 9)}), 4);
  CHECK(e.elements[0] == range(0, 4));
  CHECK(e.elements[1] == range(5, 9));
  auto same = enlarge(cover_of(ten, {range(0, 4), range(5, 9)}), 0.5);
  CHECK(same.elements == std::vector<PointSet>{range(0, 4), range(5, 9)});
}

TEST_CASE("statistics agree with scans on random covers") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    auto s = trial % 2 ? fixtures::random_metric(10, rng) : fixtures::random_cloud(10, 2, rng);
    auto c = random_cover(s, rng, 2 + trial % 4);
    const auto pts = s->all_points();
    CHECK(multiplicity(c) == oracle::multiplicity(pts, c.elements));
    const double L = lebesgue_number(c);
    const double want = oracle::lebesgue(*s, pts, c.elements);
    if (std::isinf(want)) {
      CHECK(std::isinf(L));
    } else {
      CHECK(L == doctest::Approx(want));
    }
    std::size_t prev = 0;
    for (double d : {0.5, 1.0, 2.0, 3.5, 6.0, 12.0}) {
      const auto dm = d_multiplicity(c, d);
      CHECK(dm == oracle::d_multiplicity(*s, pts, c.elements, d));
      CHECK(dm >= multiplicity(c));
      CHECK(dm >= prev);
      prev = dm;
      const auto big = enlarge(c, d);
      // Closed enlargement sits between the open d-ball count and a slightly larger one.
      CHECK(multiplicity(big) >= dm);
      CHECK(multiplicity(big) <= d_multiplicity(c, d + 1e-6));
      CHECK(lebesgue_number(big) >= d - 1e-9);
    }
    // Every open ball of radius L fits in some element.
    if (!std::isinf(L)) {
      for (PointId x : pts) {
        bool fits = false;
        for (const auto& e : c.elements) {
          bool inside = true;
          for (PointId y : pts)
            if (s->dist(x, y) < L - 1e-9 && !oracle::in(e, y)) inside = false;
          fits = fits || inside;
        }
        CHECK(fits);
      }
    }
  }
}

TEST_CASE("invalid covers are rejected") {
  auto five = fixtures::line(5);
  CHECK_THROWS_AS(validate_cover(cover_of(five, {{0, 1}, {3, 4}})), Error);
  CHECK_THROWS_AS(validate_cover(cover_of(five, {{0, 1, 2, 3, 4}, {}})), Error);
  CHECK_THROWS_AS(validate_cover(cover_of(five, {{0, 1, 2, 3, 4, 7}})), Error);
}

TEST_CASE("deduplicate keeps first occurrences") {
  auto five = fixtures::line(5);
  auto d = deduplicate(cover_of(five, {{0, 1, 2}, {2, 3, 4}, {0, 1, 2}}));
  CHECK(d.elements == std::vector<PointSet>{{0, 1, 2}, {2, 3, 4}});
}
