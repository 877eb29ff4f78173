#include <map>
#include <set>

#include "coarsekit/decomposition.hpp"

namespace coarsekit {

std::vector<std::vector<PointSet>> grave_levels(const Cover& raw, double r, std::size_t n) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidInput, "r must be positive");
  validate_cover(raw);
  const Cover cover = deduplicate(raw);
  const auto mult = multiplicity(cover);
  if (mult > n + 1) {
    throw Error(ErrorCode::PreconditionFailed, "cover multiplicity exceeds n + 1",
                {{"which", "multiplicity"}, {"measured", mult}, {"required", n + 1}});
  }
  const double L = lebesgue_number(cover);
  if (tol::lt(L, double(n + 1) * r)) {
    throw Error(ErrorCode::PreconditionFailed, "Lebesgue number is below (n + 1) r",
                {{"which", "lebesgue"}, {"measured", L}, {"required", double(n + 1) * r}});
  }

  const auto& dom = cover.domain;
  const std::size_t E = cover.elements.size();
  // depth[k][e] = d(x_k, U_e^c); zero when x_k is outside U_e.
  std::vector<std::vector<double>> depth(dom.points.size(), std::vector<double>(E, 0.0));
  for (std::size_t e = 0; e < E; ++e) {
    for (PointId x : cover.elements[e]) {
      const auto k = std::size_t(std::lower_bound(dom.points.begin(), dom.points.end(), x) - dom.points.begin());
      depth[k][e] = distance_to_complement(dom, cover.elements[e], x);
    }
  }
  // Interiors are taken with closed balls, Int_t(U) = {x : d(x, U^c) > t}.
  // With open balls two level-n pieces could sit at distance exactly r,
  // which is not r-disjoint. Int_t(U_0 n ... n U_i) = Int_t(U_0) n ... n
  // Int_t(U_i), so x lies in S_i exactly when at least i + 1 elements have x
  // in their (n + 1 - i) r-interior. A point of X_i has exactly i + 1 such
  // elements, and its piece Int(U_0 n ... n U_i) \ S_{i+1} is the set of
  // points of X_i sharing that index set.
  auto deep_elements = [&](std::size_t k, std::size_t i) {
    const double t = double(n + 1 - i) * r;
    std::vector<std::size_t> idx;
    for (std::size_t e = 0; e < E; ++e) {
      if (tol::gt(depth[k][e], t)) idx.push_back(e);
    }
    return idx;
  };

  std::vector<std::vector<PointSet>> levels(n + 1);
  std::vector<bool> covered(dom.points.size(), false);
  for (std::size_t i = 0; i <= n; ++i) {
    std::map<std::vector<std::size_t>, PointSet> pieces;
    for (std::size_t k = 0; k < dom.points.size(); ++k) {
      if (i < n && deep_elements(k, i + 1).size() >= i + 2) continue;  // x in S_{i+1}
      auto idx = deep_elements(k, i);
      if (idx.size() < i + 1) continue;  // x not in S_i
      covered[k] = true;
      pieces[std::move(idx)].push_back(dom.points[k]);
    }
    std::set<PointSet> distinct;
    for (auto& [_, piece] : pieces) distinct.insert(std::move(piece));
    levels[i].assign(distinct.begin(), distinct.end());
  }
  // Every point is covered when L > (n + 1) r. At L = (n + 1) r a point whose
  // deepest element has depth exactly (n + 1) r may fall in no S_i.
  for (std::size_t k = 0; k < dom.points.size(); ++k) {
    if (!covered[k]) {
      throw Error(ErrorCode::PreconditionFailed, "Lebesgue number attains (n + 1) r exactly and leaves a point uncovered",
                  {{"which", "lebesgue"}, {"measured", L}, {"required", double(n + 1) * r}, {"point", dom.points[k]}});
    }
  }
  return levels;
}

DecompositionCertificate grave_construct(const Cover& cover, double r, std::size_t n) {
  DecompositionCertificate cert;
  cert.source = MetricFamily{cover.domain.label.empty() ? cover.domain.space->id() : cover.domain.label,
                             {cover.domain}};
  cert.r = r;
  cert.n = n;
  cert.members.push_back(MemberDecomposition{grave_levels(cover, r, n)});
  canonicalize(cert);
  return cert;
}

NetCover net_cover(const Subspace& member, double s, double ball_factor) {
  NetCover out;
  out.net = max_separated_net(*member.space, member.points, 2.0 * s);
  Cover balls{member, {}};
  for (PointId z : out.net) {
    PointSet ball;
    for (PointId x : member.points) {
      if (tol::leq(member.dist(z, x), ball_factor * s)) ball.push_back(x);
    }
    balls.elements.push_back(std::move(ball));
  }
  out.cover = deduplicate(balls);
  out.multiplicity = multiplicity(out.cover);
  out.lebesgue = lebesgue_number(out.cover);
  return out;
}

std::vector<NetCover> net_cover_strategy(const MetricFamily& family, double r) {
  std::vector<NetCover> out;
  out.reserve(family.members.size());
  for (const auto& m : family.members) out.push_back(net_cover(m, r));
  return out;
}

namespace {

// Minimal part diameter search over level assignments of at most 24 points.
class ColoringSearch {
 public:
  ColoringSearch(const Subspace& member, double r, std::size_t n) : member_(member), n_(n), k_(member.size()) {
    adj_.assign(k_, 0);
    for (std::size_t a = 0; a < k_; ++a) {
      for (std::size_t b = 0; b < k_; ++b) {
        if (a != b && tol::leq(member.dist(member.points[a], member.points[b]), r)) adj_[a] |= 1U << b;
      }
    }
    diam_.assign(std::size_t{1} << k_, 0.0);
    for (std::uint32_t mask = 1; mask < diam_.size(); ++mask) {
      const auto low = std::uint32_t(__builtin_ctz(mask));
      const std::uint32_t rest = mask & (mask - 1);
      double d = diam_[rest];
      for (std::uint32_t m = rest; m; m &= m - 1) {
        const auto b = std::uint32_t(__builtin_ctz(m));
        d = std::max(d, member.dist(member.points[low], member.points[b]));
      }
      diam_[mask] = d;
    }
    colors_.assign(k_, 0);
  }

  void run() { descend(0, 0); }

  double best() const noexcept { return best_; }
  const std::vector<std::size_t>& best_coloring() const noexcept { return best_colors_; }

 private:
  double worst_component(std::uint32_t level_mask) const {
    double worst = 0.0;
    while (level_mask) {
      std::uint32_t comp = level_mask & (~level_mask + 1);
      std::uint32_t frontier = comp;
      while (frontier) {
        std::uint32_t next = 0;
        for (std::uint32_t f = frontier; f; f &= f - 1) next |= adj_[std::size_t(__builtin_ctz(f))];
        next &= level_mask & ~comp;
        comp |= next;
        frontier = next;
      }
      worst = std::max(worst, diam_[comp]);
      level_mask &= ~comp;
    }
    return worst;
  }

  void evaluate() {
    std::vector<std::uint32_t> masks(n_ + 1, 0);
    for (std::size_t i = 0; i < k_; ++i) masks[colors_[i]] |= 1U << i;
    double worst = 0.0;
    for (auto mask : masks) {
      worst = std::max(worst, worst_component(mask));
      if (worst >= best_) return;
    }
    best_ = worst;
    best_colors_ = colors_;
  }

  // Restricted growth strings: levels are interchangeable, so point i may
  // only open level max(previous) + 1. Enumeration is in lexicographic order.
  void descend(std::size_t i, std::size_t used) {
    if (i == k_) {
      evaluate();
      return;
    }
    const std::size_t limit = std::min(n_, i == 0 ? 0 : used + 1);
    for (std::size_t c = 0; c <= limit; ++c) {
      colors_[i] = c;
      descend(i + 1, std::max(used, c));
    }
  }

  const Subspace& member_;
  std::size_t n_;
  std::size_t k_;
  std::vector<std::uint32_t> adj_;
  std::vector<double> diam_;
  std::vector<std::size_t> colors_;
  std::vector<std::size_t> best_colors_;
  double best_ = kInfinity;
};

}  // namespace

OracleVerdict exhaustive_decompose(const Subspace& member, double r, std::size_t n, double D,
                                   std::size_t max_points) {
  if (member.points.empty()) throw Error(ErrorCode::InvalidInput, "empty member");
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidInput, "r must be positive");
  if (member.size() > std::min<std::size_t>(max_points, 24)) {
    throw Error(ErrorCode::TooLarge, "too many points for the exhaustive oracle",
                {{"points", member.size()}, {"max", max_points}});
  }
  ColoringSearch search(member, r, n);
  search.run();
  OracleVerdict verdict;
  verdict.min_worst_diameter = search.best();
  verdict.decomposable = tol::leq(search.best(), D);
  if (verdict.decomposable) {
    MetricFamily fam{member.label.empty() ? member.space->id() : member.label, {member}};
    verdict.witness = coloring_certificate(fam, r, n, {search.best_coloring()});
  }
  return verdict;
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::NetThenGrave: return "net_then_grave";
    case Strategy::Singletons: return "singletons";
    case Strategy::OracleSmall: return "oracle_small";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "net_then_grave") return Strategy::NetThenGrave;
  if (name == "singletons") return Strategy::Singletons;
  if (name == "oracle_small") return Strategy::OracleSmall;
  throw Error(ErrorCode::InvalidInput, "unknown strategy '" + std::string(name) + "'");
}

namespace {

std::vector<std::vector<PointSet>> defend_member(const Subspace& member, double r, Strategy policy,
                                                 const DefendOptions& opt) {
  switch (policy) {
    case Strategy::Singletons: {
      const double gap = [&] {
        double g = kInfinity;
        for (std::size_t a = 0; a < member.size(); ++a) {
          for (std::size_t b = a + 1; b < member.size(); ++b) g = std::min(g, member.dist(member.points[a], member.points[b]));
        }
        return g;
      }();
      if (!tol::gt(gap, r)) {
        throw Error(ErrorCode::StrategyFailed, "singletons need r below the smallest gap",
                    {{"reason", "r >= minimum gap"}, {"gap", gap}, {"r", r}});
      }
      std::vector<PointSet> parts;
      for (PointId p : member.points) parts.push_back({p});
      return {parts};
    }
    case Strategy::OracleSmall: {
      if (member.size() > opt.max_oracle_points) {
        throw Error(ErrorCode::StrategyFailed, "member too large for the exhaustive oracle",
                    {{"reason", "TooLarge"}, {"points", member.size()}});
      }
      auto verdict = exhaustive_decompose(member, r, opt.n, opt.diameter_bound, opt.max_oracle_points);
      if (!verdict.decomposable) {
        throw Error(ErrorCode::StrategyFailed, "no decomposition within the diameter bound",
                    {{"reason", "not decomposable"}, {"min_worst_diameter", verdict.min_worst_diameter}});
      }
      return verdict.witness->members.front().levels;
    }
    case Strategy::NetThenGrave: {
      if (member.size() == 1) return {{member.points}};
      const double cap = opt.scale_cap.value_or(std::max(2.0 * diameter(member), r));
      double s = opt.start_factor * r;
      std::string last;
      while (true) {
        const auto nc = net_cover(member, s);
        const auto m = nc.multiplicity;
        const bool levels_ok = !opt.max_levels || m - 1 <= *opt.max_levels;
        if (levels_ok && tol::geq(nc.lebesgue, double(m) * r)) {
          try {
            return grave_levels(nc.cover, r, m - 1);
          } catch (const Error& e) {
            if (e.code() != ErrorCode::PreconditionFailed) throw;
          }
        }
        if (s > cap) {
          throw Error(ErrorCode::StrategyFailed, "Lebesgue precondition unreachable below the scale cap",
                      {{"reason", "lebesgue precondition unreachable"},
                       {"scale", s},
                       {"multiplicity", m},
                       {"lebesgue", nc.lebesgue}});
        }
        s *= opt.growth_factor;
      }
    }
  }
  throw Error(ErrorCode::StrategyFailed, "unknown strategy");
}

}  // namespace

DecompositionCertificate defend(const MetricFamily& family, double r, Strategy policy, const DefendOptions& options) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidInput, "r must be positive");
  validate_family(family);
  DecompositionCertificate cert;
  cert.source = family;
  cert.r = r;
  cert.n = policy == Strategy::OracleSmall ? options.n : 0;
  for (const auto& member : family.members) {
    auto levels = defend_member(member, r, policy, options);
    while (levels.size() > 1 && levels.back().empty()) levels.pop_back();
    cert.n = std::max(cert.n, levels.size() - 1);
    cert.members.push_back(MemberDecomposition{std::move(levels)});
  }
  canonicalize(cert);
  const auto report = verify_certificate(cert);
  if (!report.valid) {
    throw Error(ErrorCode::StrategyFailed, "strategy produced an invalid certificate: " + report.message,
                {{"reason", report.violation}});
  }
  return cert;
}

}  // namespace coarsekit
