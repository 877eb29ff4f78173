// One line per acceptance criterion: PASS or FAIL, the measured quantities,
// and wall time against the budget. Exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "coarsekit/doubling.hpp"
#include "coarsekit/embedding.hpp"
#include "coarsekit/fixtures.hpp"
#include "coarsekit/game.hpp"
#include "coarsekit/nerve.hpp"

using namespace coarsekit;

namespace {

// Tolerances.
constexpr double kLipschitzRelTol = 1e-9;
constexpr double kPigeonholeTol = 1e-12;
constexpr double kNormTol = 1e-9;
constexpr double kVariationRelTol = 1e-9;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void run(const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = Outcome{false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < budget_s;
  const bool pass = out.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s %-24s %s [%.2fs / %.0fs]\n", pass ? "PASS" : "FAIL", name, out.detail.c_str(), secs, budget_s);
  std::fflush(stdout);
}

PointSet range(PointId a, PointId b) {
  PointSet p;
  for (PointId x = a; x <= b; ++x) p.push_back(x);
  return p;
}

std::vector<std::size_t> random_coloring(std::size_t size, std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> c(size);
  for (auto& x : c) x = rng() % (n + 1);
  return c;
}

bool levels_decompose(const DecompositionCertificate& c) {
  for (std::size_t m = 0; m < c.members.size(); ++m) {
    const auto& member = c.source.members[m];
    if (!oracle::is_decomposition(*member.space, member.points, c.members[m].levels, c.r)) return false;
  }
  return true;
}

Outcome composition() {
  std::mt19937_64 rng(101);
  const double scales[] = {0.5, 1, 2, 3};
  int ok = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t size = 2 + rng() % 29;
    auto s = trial % 2 ? fixtures::random_metric(size, rng, 8) : fixtures::random_cloud(size, 2, rng);
    const double r1 = scales[rng() % 4], r2 = scales[rng() % 4];
    const std::size_t n1 = rng() % 3, n2 = rng() % 3;
    auto outer = coloring_certificate(single_space_family(s), r1, n1, {random_coloring(size, n1, rng)});
    std::vector<std::vector<std::size_t>> inner_colors;
    for (const auto& m : outer.target.members) inner_colors.push_back(random_coloring(m.size(), n2, rng));
    auto inner = coloring_certificate(outer.target, r2, n2, inner_colors);
    if (!verify_certificate(outer).valid || !verify_certificate(inner).valid) continue;
    auto c = compose_certificates(outer, inner);
    const bool exact = c.r == std::min(r1, r2) && c.n == (n1 + 1) * (n2 + 1) - 1;
    if (exact && verify_certificate(c).valid && levels_decompose(c)) ++ok;
  }
  std::ostringstream os;
  os << ok << "/200 composed chains verify with exact (r, n)";
  return {ok == 200, os.str()};
}

// Cover by open balls around uncovered points with random radii.
Cover random_ball_cover(const SpacePtr& s, std::mt19937_64& rng) {
  Cover c{whole_space(s), {}};
  std::vector<bool> hit(s->size(), false);
  for (PointId x = 0; x < s->size(); ++x) {
    if (hit[x]) continue;
    const double radius = double(1 + rng() % 8);
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

bool contained(const Cover& c, const DecompositionCertificate& cert) {
  for (const auto& level : cert.members[0].levels)
    for (const auto& part : level) {
      bool inside = false;
      for (const auto& e : c.elements) inside = inside || std::includes(e.begin(), e.end(), part.begin(), part.end());
      if (!inside) return false;
    }
  return true;
}

// Half of the covers use r strictly below L / (n + 1), half use r equal to it.
Outcome grave() {
  std::mt19937_64 rng(103);
  int strict_total = 0, strict_ok = 0, boundary_total = 0, boundary_ok = 0, literal_checked = 0, literal_ok = 0;
  std::string first_failure;
  int covers = 0;
  while (covers < 100) {
    SpacePtr s = rng() % 2 ? fixtures::line(10 + rng() % 51) : fixtures::grid(3 + rng() % 5, 3 + rng() % 5);
    auto c = random_ball_cover(s, rng);
    const double L = lebesgue_number(c);
    if (std::isinf(L)) continue;
    const std::size_t n = multiplicity(c) - 1 + rng() % 2;
    const bool boundary = covers % 2 == 1;
    const double r = boundary ? L / double(n + 1) : L / double(n + 1) * (0.3 + 0.69 * double(rng() % 1000) / 1000.0);
    ++covers;
    (boundary ? boundary_total : strict_total)++;
    bool ok = false;
    try {
      auto cert = grave_construct(c, r, n);
      ok = verify_certificate(cert).valid && contained(c, cert) && levels_decompose(cert);
      if (ok && s->size() <= 25) {
        ++literal_checked;
        const auto want = oracle::literal_grave(*s, s->all_points(), c.elements, r, n);
        literal_ok += cert.members[0].levels == want ? 1 : 0;
      }
    } catch (const Error& e) {
      if (first_failure.empty()) {
        std::ostringstream os;
        os << s->id() << " n=" << n << " r=" << r << ": " << e.what();
        first_failure = os.str();
      }
    }
    (boundary ? boundary_ok : strict_ok) += ok ? 1 : 0;
  }
  // Equality case with no valid answer at all: the two halves of line10
  // have L = 1 = (0 + 1) * 1, but they are only 1 apart, and the exhaustive
  // oracle finds no (1, 0) decomposition into parts of diameter <= 4.
  auto line10 = fixtures::load("line10");
  const bool no_answer = !exhaustive_decompose(whole_space(line10), 1, 0, 4).decomposable &&
                         lebesgue_number(Cover{whole_space(line10), {range(0, 4), range(5, 9)}}) == 1.0;
  std::ostringstream os;
  if (no_answer) os << "{[0..4],[5..9]} on line10 with n=0, r=1 admits no contained certificate; ";
  os << "L>(n+1)r: " << strict_ok << "/" << strict_total << " valid+contained; L=(n+1)r: " << boundary_ok << "/"
     << boundary_total << "; subset enumeration agrees " << literal_ok << "/" << literal_checked;
  if (!first_failure.empty()) os << "; first failure " << first_failure;
  return {strict_ok == strict_total && boundary_ok == boundary_total && literal_ok == literal_checked, os.str()};
}

Outcome oracle_agreement() {
  std::mt19937_64 rng(107);
  const double rs[] = {1, 2, 3};
  const double Ds[] = {1, 3};
  int cases = 0, agree = 0;
  for (int trial = 0; trial < 50; ++trial) {
    auto s = fixtures::random_metric(3 + rng() % 6, rng, 5);
    const auto X = single_space_family(s);
    for (double r : rs)
      for (std::size_t n : {0u, 1u})
        for (double D : Ds) {
          ++cases;
          const auto verdict = exhaustive_decompose(X.members[0], r, n, D);
          const double brute = oracle::min_worst_diameter(*s, s->all_points(), r, n);
          DefendOptions opt;
          opt.n = n;
          opt.diameter_bound = D;
          bool defended = false, consistent = true;
          try {
            auto c = defend(X, r, Strategy::OracleSmall, opt);
            defended = true;
            consistent = c.n == n && mesh(c.target) <= D && verify_certificate(c).valid && verdict.witness &&
                         c.members[0].levels == verdict.witness->members[0].levels;
          } catch (const Error& e) {
            if (e.code() != ErrorCode::StrategyFailed) throw;
          }
          if (defended == verdict.decomposable && consistent && verdict.min_worst_diameter == brute &&
              verdict.decomposable == (brute <= D))
            ++agree;
        }
  }
  std::ostringstream os;
  os << agree << "/" << cases << " (space, r, n, D) cases agree";
  return {agree == cases, os.str()};
}

Outcome partition_of_unity() {
  struct Case {
    std::string fixture;
    std::vector<PointSet> elements;
  };
  std::vector<PointSet> strips(2);
  for (PointId p = 0; p < 64; ++p) {
    if (p / 8 <= 4) strips[0].push_back(p);
    if (p / 8 >= 3) strips[1].push_back(p);
  }
  const std::vector<Case> cases{{"line40x10", {range(0, 27), range(12, 39)}}, {"grid8x50", strips}};
  bool pass = true;
  std::ostringstream os;
  for (const auto& cs : cases) {
    const Cover cover{whole_space(fixtures::load(cs.fixture)), cs.elements};
    for (auto [n, eps] : {std::pair<std::size_t, double>{1, 1.0}, {2, 0.5}}) {
      auto phi = partition_of_unity_map(cover, eps, n);
      // Independent scan of d1(phi x, phi y) / d(x, y) over all pairs.
      double worst = 0.0;
      const auto& pts = cover.domain.points;
      for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b)
          worst = std::max(worst, l1_distance(phi.values[a], phi.values[b]) / cover.domain.dist(pts[a], pts[b]));
      const bool ok = worst <= eps * (1 + kLipschitzRelTol);
      pass = pass && ok;
      os << cs.fixture << "(n=" << n << ",eps=" << eps << ",L=" << lebesgue_number(cover) << "): " << worst << "; ";
    }
  }
  return {pass, os.str()};
}

Outcome pigeonhole() {
  std::mt19937_64 rng(109);
  std::exponential_distribution<double> expo(1.0);
  double worst_margin = kInfinity;
  std::size_t tested = 0;
  bool pass = true;
  for (std::size_t d = 0; d <= 4; ++d) {
    // Random facets of dimension at most d on 9 vertices, one of dimension d.
    std::vector<std::vector<VertexId>> simplices;
    for (int f = 0; f < 6; ++f) {
      const std::size_t size = f == 0 ? d + 1 : 1 + rng() % (d + 1);
      std::vector<VertexId> verts(9);
      for (VertexId v = 0; v < 9; ++v) verts[v] = v;
      std::shuffle(verts.begin(), verts.end(), rng);
      verts.resize(size);
      std::sort(verts.begin(), verts.end());
      simplices.push_back(verts);
    }
    const auto k = make_complex(9, simplices);
    std::vector<ComplexPoint> points;
    for (const auto& s : all_simplices(k)) points.push_back(barycenter(s));
    std::vector<ComplexPoint> extra;
    for (int q = 0; q < 1000; ++q) {
      const auto& facet = k.facets[rng() % k.facets.size()];
      ComplexPoint p;
      double total = 0.0;
      for (VertexId v : facet) {
        const double w = expo(rng);
        p.coords.emplace_back(v, w);
        total += w;
      }
      for (auto& [_, w] : p.coords) w /= total;
      extra.push_back(p);
      points.push_back(p);
    }
    const double need = 1.0 / double(d + 1) - kPigeonholeTol;
    for (const auto& p : points) {
      double mx = 0.0;
      for (const auto& [_, w] : p.coords) mx = std::max(mx, w);
      worst_margin = std::min(worst_margin, mx - 1.0 / double(d + 1));
      pass = pass && mx >= need;
    }
    tested += points.size();
    const auto rep = star_cover(k, d, extra);
    pass = pass && rep.pass;
  }
  std::ostringstream os;
  os << tested << " points on complexes of dim 0..4, min(max coordinate - 1/(n+1)) = " << worst_margin;
  return {pass, os.str()};
}

Outcome multiplicity_bound() {
  bool pass = true;
  std::ostringstream os;
  for (const char* name : {"line64", "grid16"}) {
    auto s = fixtures::load(name);
    const auto grid = dyadic_grid(1, s->diameter());
    auto dc = certify_doubling(s, s->all_points(), 1, grid);
    pass = pass && verify_doubling(dc).valid;
    os << name << " N=" << dc.N << " bound=" << dc.N * dc.N * dc.N * dc.N << " multiplicities";
    for (double lambda : grid) {
      try {
        auto rep = doubling_to_asdim_cover(single_space_family(s), {dc}, lambda);
        const auto measured = oracle::multiplicity(s->all_points(), rep.covers[0].cover.elements);
        pass = pass && measured <= rep.bound && measured == rep.max_multiplicity;
        os << " " << measured;
      } catch (const Error& e) {
        pass = false;
        os << " [" << e.what() << "]";
      }
    }
    os << "; ";
  }
  return {pass, os.str()};
}

Outcome subspace_transfer() {
  std::mt19937_64 rng(113);
  int ok = 0;
  std::size_t worst_ratio_num = 0, worst_ratio_den = 1;
  for (int trial = 0; trial < 20; ++trial) {
    auto host = trial % 2 ? fixtures::load("line64") : fixtures::load("grid16");
    PointSet Y;
    const auto keep = 2 + rng() % 5;
    for (PointId p = 0; p < host->size(); ++p)
      if (rng() % keep == 0) Y.push_back(p);
    if (Y.empty()) Y.push_back(0);
    const auto cert = certify_doubling(host, Y, 1, dyadic_grid(1, 32));
    const auto sub = subspace_doubling(cert);
    bool good = verify_doubling(cert).valid && sub.intrinsic && sub.R == 2 * cert.R && sub.N <= cert.N * cert.N;
    // Exhaustive open-ball coverage at every center of Y and every scale.
    for (double r : sub.scales)
      for (PointId y : Y) {
        const auto* w = sub.find(y, r);
        good = good && w && w->balls.size() <= sub.N && oracle::covers_double_ball(*host, Y, y, r, w->balls);
        if (w)
          for (PointId b : w->balls) good = good && oracle::in(Y, b);
      }
    if (sub.N * worst_ratio_den > worst_ratio_num * cert.N * cert.N) {
      worst_ratio_num = sub.N;
      worst_ratio_den = cert.N * cert.N;
    }
    ok += good ? 1 : 0;
  }
  std::ostringstream os;
  os << ok << "/20 subset certificates verify; largest N'/N^2 = " << worst_ratio_num << "/" << worst_ratio_den;
  return {ok == 20, os.str()};
}

Outcome pushforward() {
  bool pass = true;
  std::ostringstream os;
  for (std::size_t k = 0; k <= 3; ++k) {
    const std::size_t top = 31u << k;
    auto host = fixtures::line(top + 1, "host" + std::to_string(top));
    PointMap T;
    for (PointId p = 0; p <= top; ++p)
      T.image.push_back(2 * p <= top ? std::optional<PointId>(2 * p) : std::nullopt);
    const MetricFamily X{"X", {Subspace{host, range(0, 15), ""}}};
    const auto cert = defend(X, 1, Strategy::NetThenGrave);
    const auto pushed = pushforward_expansion(host, T, 2, cert, k);
    const double scale = double(1u << k);
    bool ok = pushed.r == scale * cert.r && verify_certificate(pushed).valid && levels_decompose(pushed);
    for (std::size_t i = 0; i < cert.members[0].levels.size() && ok; ++i) {
      const auto& before = cert.members[0].levels[i];
      const auto& after = pushed.members[0].levels[i];
      ok = before.size() == after.size();
      for (std::size_t j = 0; j < before.size() && ok; ++j) {
        PointSet image;
        for (PointId p : before[j]) image.push_back(PointId(p << k));
        ok = after[j] == image && oracle::diam(*host, after[j]) == scale * oracle::diam(*host, before[j]);
      }
    }
    pass = pass && ok;
    os << "k=" << k << (ok ? " ok" : " bad") << " (r=" << pushed.r << "); ";
  }
  return {pass, os.str()};
}

Outcome gluing() {
  auto line = fixtures::line(30);
  GlueInput in;
  in.domain = whole_space(line);
  in.parts = {range(0, 19), range(10, 29)};
  in.weights = distance_weights(in.domain, in.parts);
  in.R = 1;
  in.epsilon = 1;
  const double theta = in.epsilon / (2 * in.R);
  in.xis = {rotation_map(*line, line->all_points(), 0, theta), rotation_map(*line, line->all_points(), 29, theta)};
  in.S_grid = {1, 5, 10, 20};
  const auto out = glue_embeddings(in);
  double worst_norm = 0.0, worst_var = 0.0;
  for (PointId x = 0; x < 30; ++x) {
    worst_norm = std::max(worst_norm, std::abs(norm(*out.eta.find(x)) - 1.0));
    for (PointId y = 0; y < 30; ++y)
      if (line->dist(x, y) <= in.R) worst_var = std::max(worst_var, distance(*out.eta.find(x), *out.eta.find(y)));
  }
  std::ostringstream os;
  os << "max | |eta| - 1 | = " << worst_norm << ", max R-close variation = " << worst_var << " (eps " << in.epsilon
     << ")";
  return {worst_norm <= kNormTol && worst_var <= in.epsilon * (1 + kVariationRelTol), os.str()};
}

Outcome game() {
  auto s = start_session(single_space_family(fixtures::load("line100")), 5, Strategy::NetThenGrave, 16);
  run_script(s, constant_script(2, 16));
  const auto rep = replay_transcript(s);
  std::size_t product = 1;
  for (const auto& t : s.turns) product *= t.certificate.n + 1;
  std::ostringstream os;
  os << to_string(s.status) << " after " << s.turns.size() << " turns, mesh " << s.current_mesh() << "; replay "
     << (rep.valid ? "verifies" : "fails") << " with n+1 = " << rep.n + 1 << " (product " << product << ")";
  const bool pass = s.status == GameStatus::DefenderWon && s.current_mesh() <= 5 && rep.valid &&
                    rep.n + 1 == product && rep.composed && levels_decompose(*rep.composed);
  return {pass, os.str()};
}

}  // namespace

int main() {
  run("composition_law", 10, composition);
  run("grave_construction", 30, grave);
  run("oracle_agreement", 60, oracle_agreement);
  run("partition_of_unity", 10, partition_of_unity);
  run("star_pigeonhole", 5, pigeonhole);
  run("net_multiplicity_bound", 30, multiplicity_bound);
  run("subspace_transfer", 30, subspace_transfer);
  run("expansion_pushforward", 5, pushforward);
  run("gluing_norm", 5, gluing);
  run("game_engine", 30, game);
  return failures;
}
