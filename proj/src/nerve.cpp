#include "coarsekit/nerve.hpp"

#include <map>
#include <set>
#include <sstream>

namespace coarsekit {

double ComplexPoint::operator[](VertexId v) const {
  auto it = std::lower_bound(coords.begin(), coords.end(), v,
                             [](const auto& c, VertexId key) { return c.first < key; });
  return it != coords.end() && it->first == v ? it->second : 0.0;
}

double ComplexPoint::max_coordinate() const {
  double m = 0.0;
  for (const auto& [_, w] : coords) m = std::max(m, w);
  return m;
}

ComplexPoint vertex_point(VertexId v) { return ComplexPoint{{{v, 1.0}}}; }

ComplexPoint barycenter(const std::vector<VertexId>& simplex) {
  ComplexPoint p;
  const double w = 1.0 / double(simplex.size());
  for (VertexId v : simplex) p.coords.emplace_back(v, w);
  std::sort(p.coords.begin(), p.coords.end());
  return p;
}

double l1_distance(const ComplexPoint& a, const ComplexPoint& b) {
  double sum = 0.0;
  auto i = a.coords.begin();
  auto j = b.coords.begin();
  while (i != a.coords.end() || j != b.coords.end()) {
    if (j == b.coords.end() || (i != a.coords.end() && i->first < j->first)) {
      sum += std::abs(i++->second);
    } else if (i == a.coords.end() || j->first < i->first) {
      sum += std::abs(j++->second);
    } else {
      sum += std::abs(i++->second - j++->second);
    }
  }
  return sum;
}

std::size_t UniformComplex::dim() const {
  std::size_t d = 0;
  for (const auto& f : facets) d = std::max(d, f.size() - 1);
  return d;
}

bool UniformComplex::has_simplex(std::vector<VertexId> simplex) const {
  std::sort(simplex.begin(), simplex.end());
  simplex.erase(std::unique(simplex.begin(), simplex.end()), simplex.end());
  for (const auto& f : facets) {
    if (std::includes(f.begin(), f.end(), simplex.begin(), simplex.end())) return true;
  }
  return false;
}

UniformComplex make_complex(std::size_t vertex_count, std::vector<std::vector<VertexId>> simplices) {
  for (auto& s : simplices) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (VertexId v : s) {
      if (v >= vertex_count) throw Error(ErrorCode::InvalidInput, "simplex vertex out of range", {{"vertex", v}});
    }
  }
  std::set<std::vector<VertexId>> unique(simplices.begin(), simplices.end());
  unique.erase(std::vector<VertexId>{});
  UniformComplex out;
  out.vertex_count = vertex_count;
  std::vector<bool> seen(vertex_count, false);
  for (const auto& s : unique) {
    bool maximal = true;
    for (const auto& t : unique) {
      if (t.size() > s.size() && std::includes(t.begin(), t.end(), s.begin(), s.end())) {
        maximal = false;
        break;
      }
    }
    if (maximal) {
      out.facets.push_back(s);
      for (VertexId v : s) seen[v] = true;
    }
  }
  for (VertexId v = 0; v < vertex_count; ++v) {
    if (!seen[v]) out.facets.push_back({v});
  }
  std::sort(out.facets.begin(), out.facets.end());
  return out;
}

std::vector<std::vector<VertexId>> all_simplices(const UniformComplex& complex) {
  std::set<std::vector<VertexId>> faces;
  for (const auto& f : complex.facets) {
    if (f.size() > 20) throw Error(ErrorCode::TooLarge, "facet too large to enumerate faces", {{"size", f.size()}});
    for (std::uint32_t mask = 1; mask < (1U << f.size()); ++mask) {
      std::vector<VertexId> face;
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (mask & (1U << i)) face.push_back(f[i]);
      }
      faces.insert(std::move(face));
    }
  }
  return {faces.begin(), faces.end()};
}

UniformComplex nerve_of_cover(const Cover& cover) {
  validate_cover(cover);
  std::vector<std::vector<VertexId>> per_point;
  for (PointId x : cover.domain.points) {
    std::vector<VertexId> s;
    for (std::size_t e = 0; e < cover.elements.size(); ++e) {
      if (contains(cover.elements[e], x)) s.push_back(VertexId(e));
    }
    per_point.push_back(std::move(s));
  }
  return make_complex(cover.elements.size(), std::move(per_point));
}

std::string to_dot(const UniformComplex& complex) {
  std::set<std::pair<VertexId, VertexId>> edges;
  for (const auto& f : complex.facets) {
    for (std::size_t a = 0; a < f.size(); ++a) {
      for (std::size_t b = a + 1; b < f.size(); ++b) edges.emplace(f[a], f[b]);
    }
  }
  std::ostringstream out;
  out << "graph nerve {\n";
  for (VertexId v = 0; v < complex.vertex_count; ++v) out << "  v" << v << ";\n";
  for (const auto& [a, b] : edges) out << "  v" << a << " -- v" << b << ";\n";
  out << "}\n";
  return out.str();
}

const ComplexPoint& ComplexMap::at(PointId p) const {
  auto it = std::lower_bound(domain.points.begin(), domain.points.end(), p);
  if (it == domain.points.end() || *it != p) {
    throw Error(ErrorCode::UnmappedPoint, "point outside the map domain", {{"point", p}});
  }
  return values[std::size_t(it - domain.points.begin())];
}

double required_lebesgue(double epsilon, std::size_t n) {
  return double(2 * n + 2) * double(2 * n + 3) / epsilon;
}

ComplexMap partition_of_unity_map_unchecked(const Cover& cover) {
  ComplexMap out;
  out.domain = cover.domain;
  out.complex = nerve_of_cover(cover);
  out.values.reserve(cover.domain.points.size());
  for (PointId x : cover.domain.points) {
    ComplexPoint p;
    double total = 0.0;
    bool whole = false;
    for (std::size_t e = 0; e < cover.elements.size(); ++e) {
      if (!contains(cover.elements[e], x)) continue;
      const double d = distance_to_complement(cover.domain, cover.elements[e], x);
      if (std::isinf(d)) {
        // Only an element equal to the whole domain has infinite depth; it
        // absorbs all of the mass.
        if (!whole) p.coords.clear();
        whole = true;
        p.coords.emplace_back(VertexId(e), 1.0);
      } else if (!whole) {
        p.coords.emplace_back(VertexId(e), d);
        total += d;
      }
    }
    if (whole) {
      for (auto& c : p.coords) c.second = 1.0 / double(p.coords.size());
    } else {
      for (auto& c : p.coords) c.second /= total;
    }
    out.values.push_back(std::move(p));
  }
  return out;
}

ComplexMap partition_of_unity_map(const Cover& cover, double epsilon, std::size_t n) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidInput, "epsilon must be positive");
  validate_cover(cover);
  const auto mult = multiplicity(cover);
  if (mult > n + 1) {
    throw Error(ErrorCode::PreconditionFailed, "cover multiplicity exceeds n + 1",
                {{"which", "multiplicity"}, {"measured", mult}, {"required", n + 1}});
  }
  const double L = lebesgue_number(cover);
  const double need = required_lebesgue(epsilon, n);
  if (tol::lt(L, need)) {
    throw Error(ErrorCode::PreconditionFailed, "Lebesgue number below (2n+2)(2n+3)/epsilon",
                {{"which", "lebesgue"}, {"measured", L}, {"required", need}});
  }
  return partition_of_unity_map_unchecked(cover);
}

LipschitzReport measure_lipschitz(const ComplexMap& map) {
  LipschitzReport rep;
  const auto& pts = map.domain.points;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      const double ratio = l1_distance(map.values[a], map.values[b]) / map.domain.dist(pts[a], pts[b]);
      if (ratio > rep.constant) {
        rep.constant = ratio;
        rep.p = pts[a];
        rep.q = pts[b];
      }
    }
  }
  return rep;
}

StarCoverReport star_cover(const UniformComplex& complex, std::size_t n,
                           const std::vector<ComplexPoint>& extra_points) {
  StarCoverReport rep;
  rep.dim = complex.dim();
  if (rep.dim > n) {
    throw Error(ErrorCode::PreconditionFailed, "complex dimension exceeds n",
                {{"which", "dim"}, {"measured", rep.dim}, {"required", n}});
  }
  rep.required = 1.0 / double(n + 1);
  auto test = [&](const ComplexPoint& p) {
    rep.min_max_coordinate = std::min(rep.min_max_coordinate, p.max_coordinate());
    ++rep.tested;
  };
  for (const auto& s : all_simplices(complex)) test(barycenter(s));
  for (const auto& p : extra_points) test(p);
  rep.lebesgue_lower_bound = complex.vertex_count <= 1 ? kInfinity : 2.0 * rep.min_max_coordinate;
  rep.pass = rep.min_max_coordinate >= rep.required - 1e-12;
  return rep;
}

StarPullback pullback_star_cover(const ComplexMap& map, double r, std::size_t n) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidInput, "r must be positive");
  StarPullback out;
  out.lipschitz = measure_lipschitz(map).constant;
  const double allowed = 1.0 / (double(n + 1) * r);
  if (tol::gt(out.lipschitz, allowed)) {
    throw Error(ErrorCode::LipschitzTooLarge, "map is not 1/((n+1) r)-Lipschitz",
                {{"measured", out.lipschitz}, {"allowed", allowed}});
  }
  if (map.complex.dim() > n) {
    throw Error(ErrorCode::PreconditionFailed, "complex dimension exceeds n",
                {{"which", "dim"}, {"measured", map.complex.dim()}, {"required", n}});
  }
  std::map<VertexId, PointSet> stars;
  for (std::size_t k = 0; k < map.domain.points.size(); ++k) {
    for (const auto& [v, w] : map.values[k].coords) {
      if (w != 0.0) stars[v].push_back(map.domain.points[k]);
    }
  }
  out.cover.domain = map.domain;
  for (auto& [v, pts] : stars) {
    out.vertices.push_back(v);
    out.cover.elements.push_back(std::move(pts));
  }
  out.multiplicity = multiplicity(out.cover);
  out.lebesgue = lebesgue_number(out.cover);
  if (out.multiplicity > n + 1 || !tol::gt(out.lebesgue, r)) {
    throw Error(ErrorCode::PreconditionFailed, "star preimage cover misses its bounds",
                {{"multiplicity", out.multiplicity}, {"lebesgue", out.lebesgue}, {"r", r}});
  }
  return out;
}

}  // namespace coarsekit
