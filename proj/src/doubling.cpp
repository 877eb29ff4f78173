#include "coarsekit/doubling.hpp"

#include <bit>
#include <set>

namespace coarsekit {
namespace {

using Bits = std::vector<std::uint64_t>;

std::size_t popcount_and(const Bits& a, const Bits& b) {
  std::size_t c = 0;
  for (std::size_t w = 0; w < a.size(); ++w) c += std::size_t(std::popcount(a[w] & b[w]));
  return c;
}

bool any(const Bits& a) {
  for (auto w : a) {
    if (w) return true;
  }
  return false;
}

// Bitmask over the indices of `subset` of the open ball B_radius(center).
Bits ball_bits(const FiniteMetricSpace& space, const PointSet& subset, PointId center, double radius) {
  Bits bits((subset.size() + 63) / 64, 0);
  for (std::size_t k = 0; k < subset.size(); ++k) {
    if (tol::lt(space.dist(center, subset[k]), radius)) bits[k / 64] |= std::uint64_t{1} << (k % 64);
  }
  return bits;
}

const PointSet& center_set(const DoublingCertificate& cert, PointSet& storage) {
  if (cert.intrinsic) return cert.subset;
  storage = cert.space->all_points();
  return storage;
}

}  // namespace

const DoublingWitness* DoublingCertificate::find(PointId center, double scale) const {
  for (const auto& w : witnesses) {
    if (w.center == center && tol::eq(w.scale, scale)) return &w;
  }
  return nullptr;
}

std::vector<double> dyadic_grid(double R, double max_scale) {
  if (!(R > 0.0)) throw Error(ErrorCode::InvalidInput, "R must be positive");
  std::vector<double> grid{R};
  while (tol::leq(grid.back() * 2.0, max_scale)) grid.push_back(grid.back() * 2.0);
  return grid;
}

DoublingCertificate certify_doubling(const SpacePtr& space, const PointSet& subset, double R,
                                     const std::vector<double>& scales, bool intrinsic) {
  if (subset.empty()) throw Error(ErrorCode::InvalidInput, "empty subset");
  if (!(R > 0.0)) throw Error(ErrorCode::InvalidInput, "R must be positive");
  for (PointId p : subset) {
    if (p >= space->size()) throw Error(ErrorCode::InvalidInput, "subset point outside the space", {{"point", p}});
  }
  DoublingCertificate cert;
  cert.space = space;
  cert.subset = subset;
  cert.intrinsic = intrinsic;
  cert.R = R;
  cert.scales = scales;
  std::sort(cert.scales.begin(), cert.scales.end());
  for (double r : cert.scales) {
    if (tol::lt(r, R)) throw Error(ErrorCode::InvalidInput, "scale below R", {{"scale", r}, {"R", R}});
  }
  PointSet storage;
  const PointSet& centers = center_set(cert, storage);
  for (double r : cert.scales) {
    std::vector<Bits> balls;
    balls.reserve(centers.size());
    for (PointId c : centers) balls.push_back(ball_bits(*space, subset, c, r));
    for (PointId x : centers) {
      Bits remaining = ball_bits(*space, subset, x, 2.0 * r);
      DoublingWitness w{x, r, {}};
      while (any(remaining)) {
        std::size_t best = 0;
        std::size_t gain = 0;
        for (std::size_t c = 0; c < centers.size(); ++c) {
          const auto g = popcount_and(balls[c], remaining);
          if (g > gain) {
            gain = g;
            best = c;
          }
        }
        w.balls.push_back(centers[best]);
        for (std::size_t k = 0; k < remaining.size(); ++k) remaining[k] &= ~balls[best][k];
      }
      std::sort(w.balls.begin(), w.balls.end());
      cert.N = std::max(cert.N, w.balls.size());
      cert.witnesses.push_back(std::move(w));
    }
  }
  return cert;
}

DoublingReport verify_doubling(const DoublingCertificate& cert) {
  DoublingReport rep;
  auto fail = [&](std::string msg, json details) {
    rep.valid = false;
    rep.message = std::move(msg);
    rep.details = std::move(details);
    return rep;
  };
  if (!cert.space || cert.subset.empty()) return fail("certificate has no subset", {});
  PointSet storage;
  const PointSet& centers = center_set(cert, storage);
  const auto& X = *cert.space;
  for (double r : cert.scales) {
    if (tol::lt(r, cert.R)) return fail("scale below R", {{"scale", r}, {"R", cert.R}});
    for (PointId x : centers) {
      const auto* w = cert.find(x, r);
      if (!w) return fail("missing witness", {{"center", x}, {"scale", r}});
      if (w->balls.size() > cert.N) {
        return fail("witness uses more than N balls", {{"center", x}, {"scale", r}, {"count", w->balls.size()}});
      }
      for (PointId c : w->balls) {
        if (c >= X.size() || (cert.intrinsic && !contains(cert.subset, c))) {
          return fail("ball center not allowed", {{"center", x}, {"scale", r}, {"ball", c}});
        }
      }
      for (PointId y : cert.subset) {
        if (!tol::lt(X.dist(x, y), 2.0 * r)) continue;
        const bool covered = std::any_of(w->balls.begin(), w->balls.end(),
                                         [&](PointId c) { return tol::lt(X.dist(c, y), r); });
        if (!covered) return fail("point not covered", {{"center", x}, {"scale", r}, {"point", y}});
      }
    }
  }
  return rep;
}

DoublingCertificate subspace_doubling(const DoublingCertificate& cert) {
  const auto check = verify_doubling(cert);
  if (!check.valid) {
    throw Error(ErrorCode::InvalidInput, "input doubling certificate does not verify: " + check.message,
                check.details);
  }
  DoublingCertificate out;
  out.space = cert.space;
  out.subset = cert.subset;
  out.intrinsic = true;
  out.R = 2.0 * cert.R;
  const auto& X = *cert.space;
  for (double r : cert.scales) {
    if (tol::lt(r, out.R)) continue;
    const bool has_half = std::any_of(cert.scales.begin(), cert.scales.end(),
                                      [&](double s) { return tol::eq(s, r / 2.0); });
    if (!has_half) continue;
    out.scales.push_back(r);
    for (PointId x : cert.subset) {
      // B_{2r}(x) n Y lies in the r-balls of the first witness, and each
      // B_r(c) n Y = B_{2(r/2)}(c) n Y lies in the r/2-balls of a second.
      std::set<PointId> small;
      for (PointId c : cert.find(x, r)->balls) {
        const auto* w = cert.find(c, r / 2.0);
        if (!w) {
          throw Error(ErrorCode::InvalidInput, "no half-scale witness for a ball center",
                      {{"center", c}, {"scale", r / 2.0}});
        }
        small.insert(w->balls.begin(), w->balls.end());
      }
      // Keep the r/2-balls meeting Y and recenter each at its lowest point
      // u in Y; B_{r/2}(x_i) lies inside B_r(u).
      std::set<PointId> recentered;
      for (PointId xi : small) {
        for (PointId u : cert.subset) {
          if (tol::lt(X.dist(xi, u), r / 2.0)) {
            recentered.insert(u);
            break;
          }
        }
      }
      DoublingWitness w{x, r, PointSet(recentered.begin(), recentered.end())};
      out.N = std::max(out.N, w.balls.size());
      out.witnesses.push_back(std::move(w));
    }
  }
  if (out.scales.empty()) {
    throw Error(ErrorCode::InvalidInput, "grid has no scale r >= 2R with r / 2 also in the grid");
  }
  return out;
}

std::size_t max_net_crowding(const Subspace& member, const PointSet& net, double r) {
  std::size_t worst = 0;
  for (PointId x : net) {
    std::size_t c = 0;
    for (PointId z : net) c += tol::lt(member.dist(x, z), 8.0 * r) ? 1 : 0;
    worst = std::max(worst, c);
  }
  return worst;
}

AsdimCoverReport doubling_to_asdim_cover(const MetricFamily& family, const std::vector<DoublingCertificate>& certs,
                                         double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidInput, "lambda must be positive");
  validate_family(family);
  if (certs.size() != family.members.size()) {
    throw Error(ErrorCode::InvalidInput, "one doubling certificate per member is required",
                {{"members", family.members.size()}, {"certificates", certs.size()}});
  }
  AsdimCoverReport rep;
  rep.lambda = lambda;
  for (std::size_t i = 0; i < certs.size(); ++i) {
    const auto& m = family.members[i];
    if (certs[i].space->id() != m.space->id() || certs[i].subset != m.points) {
      throw Error(ErrorCode::InvalidInput, "doubling certificate is for a different subset", {{"member", i}});
    }
    rep.N = std::max(rep.N, certs[i].N);
    rep.R = std::max(rep.R, certs[i].R);
  }
  rep.bound = rep.N * rep.N * rep.N * rep.N;
  rep.scale = std::max(lambda, rep.R);
  for (std::size_t i = 0; i < family.members.size(); ++i) {
    auto nc = net_cover(family.members[i], rep.scale);
    if (nc.multiplicity > rep.bound) {
      throw Error(ErrorCode::MultiplicityBoundViolated, "net-ball cover multiplicity exceeds N^4",
                  {{"member", i}, {"measured", nc.multiplicity}, {"bound", rep.bound}});
    }
    if (tol::lt(nc.lebesgue, lambda)) {
      throw Error(ErrorCode::PreconditionFailed, "net-ball cover Lebesgue number below lambda",
                  {{"member", i}, {"measured", nc.lebesgue}, {"required", lambda}});
    }
    rep.max_multiplicity = std::max(rep.max_multiplicity, nc.multiplicity);
    rep.min_lebesgue = std::min(rep.min_lebesgue, nc.lebesgue);
    rep.covers.push_back(std::move(nc));
  }
  const std::size_t M = rep.max_multiplicity;
  auto& cert = rep.certificate;
  cert.source = family;
  cert.r = lambda / double(M);
  cert.n = M - 1;
  for (const auto& nc : rep.covers) cert.members.push_back(MemberDecomposition{grave_levels(nc.cover, cert.r, cert.n)});
  canonicalize(cert);
  return rep;
}

std::vector<UnionDoublingReport> check_finite_unions(const MetricFamily& family,
                                                     const std::vector<std::vector<std::size_t>>& unions, double R,
                                                     const std::vector<double>& scales) {
  std::vector<UnionDoublingReport> out;
  for (const auto& u : unions) {
    if (u.empty()) throw Error(ErrorCode::InvalidInput, "empty union");
    PointSet pts;
    SpacePtr space;
    for (std::size_t i : u) {
      if (i >= family.members.size()) throw Error(ErrorCode::InvalidInput, "member index out of range", {{"index", i}});
      const auto& m = family.members[i];
      if (space && space->id() != m.space->id()) {
        throw Error(ErrorCode::InvalidInput, "union of members from different spaces");
      }
      space = m.space;
      pts = set_union(pts, m.points);
    }
    const auto cert = certify_doubling(space, pts, R, scales);
    out.push_back(UnionDoublingReport{u, cert.N, verify_doubling(cert).valid});
  }
  return out;
}

}  // namespace coarsekit
