#include <map>
#include <set>
#include <sstream>

#include "coarsekit/decomposition.hpp"

namespace coarsekit {

namespace {

using PartKey = std::pair<std::string, PointSet>;

PartKey key_of(const Subspace& s) { return {s.space->id(), s.points}; }

std::string describe(const PointSet& part) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < part.size(); ++i) os << (i ? "," : "") << part[i];
  os << "}";
  return os.str();
}

}  // namespace

MetricFamily parts_family(const DecompositionCertificate& cert, std::string id) {
  MetricFamily out{std::move(id), {}};
  for (std::size_t m = 0; m < cert.members.size(); ++m) {
    std::set<PointSet> parts;
    for (const auto& level : cert.members[m].levels) {
      for (const auto& part : level) parts.insert(part);
    }
    for (const auto& part : parts) out.members.push_back(Subspace{cert.source.members[m].space, part, {}});
  }
  return out;
}

void canonicalize(DecompositionCertificate& cert, std::string target_id) {
  for (auto& member : cert.members) {
    member.levels.resize(std::max(member.levels.size(), cert.n + 1));
    for (auto& level : member.levels) {
      for (auto& part : level) part = make_point_set(std::move(part));
      level.erase(std::remove_if(level.begin(), level.end(), [](const PointSet& p) { return p.empty(); }),
                  level.end());
      std::sort(level.begin(), level.end());
      level.erase(std::unique(level.begin(), level.end()), level.end());
    }
  }
  if (target_id.empty()) target_id = cert.target.id.empty() ? cert.source.id + "/parts" : cert.target.id;
  cert.target = parts_family(cert, std::move(target_id));
}

std::size_t part_count(const DecompositionCertificate& cert) {
  std::size_t count = 0;
  for (const auto& m : cert.members) {
    for (const auto& level : m.levels) count += level.size();
  }
  return count;
}

CertificateReport verify_certificate(const DecompositionCertificate& cert) {
  auto fail = [](std::string kind, std::string msg, json details) {
    return CertificateReport{false, std::move(kind), std::move(msg), std::move(details)};
  };
  if (!(cert.r > 0.0)) return fail("BadScale", "r must be positive", {{"r", cert.r}});
  if (cert.members.size() != cert.source.members.size()) {
    return fail("MemberCount", "one decomposition per source member is required",
                {{"members", cert.members.size()}, {"source_members", cert.source.members.size()}});
  }
  std::set<PartKey> target_keys;
  for (const auto& t : cert.target.members) target_keys.insert(key_of(t));

  for (std::size_t m = 0; m < cert.members.size(); ++m) {
    const auto& member = cert.source.members[m];
    const auto& levels = cert.members[m].levels;
    if (levels.size() > cert.n + 1) {
      return fail("TooManyLevels", "member uses more than n + 1 levels",
                  {{"member", m}, {"levels", levels.size()}, {"n", cert.n}});
    }
    PointSet covered;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const auto& parts = levels[i];
      for (std::size_t j = 0; j < parts.size(); ++j) {
        const auto& part = parts[j];
        if (part.empty()) return fail("EmptyPart", "empty part", {{"member", m}, {"level", i}, {"part", j}});
        if (!std::is_sorted(part.begin(), part.end()) ||
            std::adjacent_find(part.begin(), part.end()) != part.end()) {
          return fail("MalformedPart", "part ids must be sorted and distinct",
                      {{"member", m}, {"level", i}, {"part", j}});
        }
        if (!is_subset(part, member.points)) {
          return fail("PointOutsideMember", "part " + describe(part) + " leaves its member",
                      {{"member", m}, {"level", i}, {"part", j}});
        }
        if (!target_keys.count({member.space->id(), part})) {
          return fail("PartNotInTarget", "part " + describe(part) + " is not a member of the target family",
                      {{"member", m}, {"level", i}, {"part", j}});
        }
        covered = set_union(covered, part);
      }
      for (std::size_t a = 0; a < parts.size(); ++a) {
        for (std::size_t b = a + 1; b < parts.size(); ++b) {
          for (PointId p : parts[a]) {
            for (PointId q : parts[b]) {
              const double d = member.dist(p, q);
              if (!tol::gt(d, cert.r)) {
                std::ostringstream msg;
                msg << "parts at level " << i << " are not r-disjoint: d(" << p << "," << q << ") = " << d
                    << " <= r = " << cert.r;
                return fail("NotRDisjoint", msg.str(),
                            {{"member", m}, {"level", i}, {"p", p}, {"q", q}, {"distance", d}});
              }
            }
          }
        }
      }
    }
    if (covered != member.points) {
      const PointId x = set_difference(member.points, covered).front();
      return fail("UncoveredPoint", "point " + std::to_string(x) + " is not covered by any level",
                  {{"member", m}, {"point", x}});
    }
  }
  return CertificateReport{true, "", "ok", json::object()};
}

DecompositionCertificate compose_certificates(const DecompositionCertificate& outer,
                                              const DecompositionCertificate& inner) {
  if (inner.source.members.size() != outer.target.members.size()) {
    throw Error(ErrorCode::SourceMismatch, "inner source does not match outer target",
                {{"inner_members", inner.source.members.size()}, {"outer_target", outer.target.members.size()}});
  }
  for (std::size_t t = 0; t < outer.target.members.size(); ++t) {
    if (!same_subspace(inner.source.members[t], outer.target.members[t])) {
      throw Error(ErrorCode::SourceMismatch, "inner source member differs from outer target member",
                  {{"member", t}});
    }
  }
  std::map<PartKey, std::size_t> index;
  for (std::size_t t = 0; t < outer.target.members.size(); ++t) index.try_emplace(key_of(outer.target.members[t]), t);

  const std::size_t inner_levels = inner.n + 1;
  DecompositionCertificate out;
  out.source = outer.source;
  out.r = std::min(outer.r, inner.r);
  out.n = (outer.n + 1) * inner_levels - 1;
  out.members.resize(outer.members.size());
  for (std::size_t m = 0; m < outer.members.size(); ++m) {
    auto& levels = out.members[m].levels;
    levels.assign(out.n + 1, {});
    const auto& space = outer.source.members[m].space;
    for (std::size_t i = 0; i < outer.members[m].levels.size(); ++i) {
      for (const auto& part : outer.members[m].levels[i]) {
        auto it = index.find({space->id(), part});
        if (it == index.end()) {
          throw Error(ErrorCode::SourceMismatch, "outer part " + describe(part) + " is missing from its target",
                      {{"member", m}, {"level", i}});
        }
        const auto& sub = inner.members[it->second].levels;
        for (std::size_t j = 0; j < sub.size(); ++j) {
          auto& dest = levels[i * inner_levels + j];
          dest.insert(dest.end(), sub[j].begin(), sub[j].end());
        }
      }
    }
    for (auto& level : levels) std::sort(level.begin(), level.end());
  }
  out.target = inner.target;
  return out;
}

DecompositionCertificate pullback_certificate(const FamilyMap& map, const DecompositionCertificate& cert,
                                              double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidInput, "r must be positive");
  const double needed = map.rho(r);
  if (tol::lt(cert.r, needed)) {
    throw Error(ErrorCode::ScaleTooSmall, "certificate scale is below rho(r)", {{"cert_r", cert.r}, {"rho_r", needed}});
  }
  if (cert.source.members.size() != map.target.members.size()) {
    throw Error(ErrorCode::InvalidInput, "certificate does not decompose the map's target family");
  }
  for (std::size_t t = 0; t < map.target.members.size(); ++t) {
    if (!same_subspace(cert.source.members[t], map.target.members[t])) {
      throw Error(ErrorCode::InvalidInput, "certificate does not decompose the map's target family",
                  {{"member", t}});
    }
  }
  verify_family_map(map);  // throws UnmappedPoint on partial maps
  for (std::size_t m = 0; m < map.source.members.size(); ++m) {
    const auto& src = map.source.members[m];
    const auto& mm = map.maps[m];
    const auto& tgt = map.target.members[mm.target_member];
    for (std::size_t a = 0; a < src.points.size(); ++a) {
      for (std::size_t b = a + 1; b < src.points.size(); ++b) {
        const double d = src.dist(src.points[a], src.points[b]);
        if (tol::gt(tgt.dist(mm.images[a], mm.images[b]), map.rho(d))) {
          throw Error(ErrorCode::InvalidInput, "map violates its rho bound",
                      {{"member", m}, {"p", src.points[a]}, {"q", src.points[b]}});
        }
      }
    }
  }

  DecompositionCertificate out;
  out.source = map.source;
  out.r = r;
  out.n = cert.n;
  out.members.resize(map.source.members.size());
  for (std::size_t m = 0; m < map.source.members.size(); ++m) {
    const auto& src = map.source.members[m];
    const auto& mm = map.maps[m];
    const auto& levels = cert.members[mm.target_member].levels;
    auto& dest = out.members[m].levels;
    dest.assign(cert.n + 1, {});
    for (std::size_t i = 0; i < levels.size(); ++i) {
      for (const auto& part : levels[i]) {
        PointSet pre;
        for (std::size_t k = 0; k < src.points.size(); ++k) {
          if (contains(part, mm.images[k])) pre.push_back(src.points[k]);
        }
        if (!pre.empty()) dest[i].push_back(std::move(pre));
      }
    }
  }
  canonicalize(out, map.source.id + "/pullback");
  return out;
}

void check_expansion(const FiniteMetricSpace& space, const PointMap& T, double lambda) {
  if (!(lambda > 1.0)) throw Error(ErrorCode::NotAnExpansion, "expansion factor must exceed 1", {{"lambda", lambda}});
  if (T.image.size() != space.size()) {
    throw Error(ErrorCode::InvalidInput, "point map must list one entry per host point");
  }
  std::vector<PointId> domain;
  for (PointId p = 0; p < T.image.size(); ++p) {
    if (T.image[p]) {
      if (*T.image[p] >= space.size()) throw Error(ErrorCode::ImageEscapesSpace, "image outside the host", {{"point", p}});
      domain.push_back(p);
    }
  }
  double worst = 0.0;
  std::optional<std::pair<PointId, PointId>> worst_pair;
  for (std::size_t a = 0; a < domain.size(); ++a) {
    for (std::size_t b = a + 1; b < domain.size(); ++b) {
      const PointId x = domain[a], y = domain[b];
      const double want = lambda * space.dist(x, y);
      const double got = space.dist(*T.image[x], *T.image[y]);
      if (!tol::eq(got, want) && std::abs(got - want) > worst) {
        worst = std::abs(got - want);
        worst_pair = {x, y};
      }
    }
  }
  if (worst_pair) {
    throw Error(ErrorCode::NotAnExpansion, "map does not scale distances uniformly",
                {{"p", worst_pair->first}, {"q", worst_pair->second}, {"error", worst}});
  }
}

DecompositionCertificate pushforward_expansion(const SpacePtr& space, const PointMap& T, double lambda,
                                               const DecompositionCertificate& cert, std::size_t k) {
  check_expansion(*space, T, lambda);
  if (k == 0) return cert;
  auto apply = [&](const PointSet& set) {
    std::vector<PointId> cur(set.begin(), set.end());
    for (std::size_t step = 0; step < k; ++step) {
      for (auto& p : cur) {
        if (!T.image[p]) {
          throw Error(ErrorCode::ImageEscapesSpace, "T^k leaves the host space",
                      {{"point", p}, {"step", step}});
        }
        p = *T.image[p];
      }
    }
    return make_point_set(std::move(cur));
  };
  DecompositionCertificate out;
  out.source.id = cert.source.id + "/T^" + std::to_string(k);
  for (const auto& m : cert.source.members) {
    if (m.space->id() != space->id()) {
      throw Error(ErrorCode::InvalidInput, "certificate member does not live in the host space");
    }
    out.source.members.push_back(Subspace{space, apply(m.points), m.label});
  }
  out.r = std::pow(lambda, double(k)) * cert.r;
  out.n = cert.n;
  out.members.resize(cert.members.size());
  for (std::size_t m = 0; m < cert.members.size(); ++m) {
    for (const auto& level : cert.members[m].levels) {
      auto& dest = out.members[m].levels.emplace_back();
      for (const auto& part : level) dest.push_back(apply(part));
    }
  }
  canonicalize(out, cert.target.id + "/T^" + std::to_string(k));
  return out;
}

DecompositionCertificate coloring_certificate(const MetricFamily& family, double r, std::size_t n,
                                              const std::vector<std::vector<std::size_t>>& colorings) {
  if (colorings.size() != family.members.size()) {
    throw Error(ErrorCode::InvalidInput, "one coloring per member is required");
  }
  DecompositionCertificate cert;
  cert.source = family;
  cert.r = r;
  cert.n = n;
  cert.members.resize(family.members.size());
  for (std::size_t m = 0; m < family.members.size(); ++m) {
    const auto& member = family.members[m];
    const auto& colors = colorings[m];
    if (colors.size() != member.points.size()) throw Error(ErrorCode::InvalidInput, "coloring size mismatch");
    std::vector<PointSet> by_level(n + 1);
    for (std::size_t k = 0; k < colors.size(); ++k) {
      if (colors[k] > n) throw Error(ErrorCode::InvalidInput, "coloring uses a level above n");
      by_level[colors[k]].push_back(member.points[k]);
    }
    auto& levels = cert.members[m].levels;
    levels.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      if (!by_level[i].empty()) levels[i] = r_components(*member.space, by_level[i], r);
    }
  }
  canonicalize(cert);
  return cert;
}

}  // namespace coarsekit
