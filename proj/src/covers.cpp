#include "coarsekit/covers.hpp"

#include <set>

namespace coarsekit {

void validate_cover(const Cover& cover) {
  if (!cover.domain.space) throw Error(ErrorCode::InvalidInput, "cover without a space");
  PointSet covered;
  for (std::size_t i = 0; i < cover.elements.size(); ++i) {
    const auto& e = cover.elements[i];
    if (e.empty()) throw Error(ErrorCode::InvalidInput, "empty cover element", {{"element", i}});
    if (!std::is_sorted(e.begin(), e.end()) || std::adjacent_find(e.begin(), e.end()) != e.end()) {
      throw Error(ErrorCode::InvalidInput, "cover elements must be sorted and distinct", {{"element", i}});
    }
    if (!is_subset(e, cover.domain.points)) {
      throw Error(ErrorCode::InvalidInput, "cover element leaves the domain", {{"element", i}});
    }
    covered = set_union(covered, e);
  }
  if (covered != cover.domain.points) {
    const auto missing = set_difference(cover.domain.points, covered);
    throw Error(ErrorCode::InvalidInput, "cover misses point " + std::to_string(missing.front()),
                {{"point", missing.front()}});
  }
}

std::size_t multiplicity(const Cover& cover) {
  std::size_t best = 0;
  for (PointId x : cover.domain.points) {
    std::size_t count = 0;
    for (const auto& e : cover.elements) count += contains(e, x) ? 1 : 0;
    best = std::max(best, count);
  }
  return best;
}

std::size_t d_multiplicity(const Cover& cover, double d) {
  const auto& dom = cover.domain;
  std::size_t best = 0;
  for (PointId x : dom.points) {
    std::size_t count = 0;
    for (const auto& e : cover.elements) {
      for (PointId y : e) {
        if (tol::lt(dom.dist(x, y), d)) {
          ++count;
          break;
        }
      }
    }
    best = std::max(best, count);
  }
  return best;
}

double distance_to_complement(const Subspace& domain, const PointSet& element, PointId x) {
  double best = kInfinity;
  auto it = element.begin();
  for (PointId y : domain.points) {
    while (it != element.end() && *it < y) ++it;
    if (it != element.end() && *it == y) continue;
    best = std::min(best, domain.dist(x, y));
  }
  return best;
}

double lebesgue_number(const Cover& cover) {
  double worst = kInfinity;
  for (PointId x : cover.domain.points) {
    double best = 0.0;
    for (const auto& e : cover.elements) best = std::max(best, distance_to_complement(cover.domain, e, x));
    worst = std::min(worst, best);
  }
  return worst;
}

Cover enlarge(const Cover& cover, double lambda) {
  Cover out{cover.domain, {}};
  out.elements.reserve(cover.elements.size());
  for (const auto& e : cover.elements) {
    PointSet grown;
    for (PointId x : cover.domain.points) {
      for (PointId v : e) {
        if (tol::leq(cover.domain.dist(x, v), lambda)) {
          grown.push_back(x);
          break;
        }
      }
    }
    out.elements.push_back(std::move(grown));
  }
  return out;
}

Cover deduplicate(const Cover& cover) {
  Cover out{cover.domain, {}};
  std::set<PointSet> seen;
  for (const auto& e : cover.elements) {
    if (seen.insert(e).second) out.elements.push_back(e);
  }
  return out;
}

PointSet interior(const Subspace& domain, const PointSet& element, double d) {
  PointSet out;
  for (PointId x : element) {
    if (tol::geq(distance_to_complement(domain, element, x), d)) out.push_back(x);
  }
  return out;
}

}  // namespace coarsekit
