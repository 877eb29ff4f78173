#include "coarsekit/metric_space.hpp"

#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>

#include "coarsekit/union_find.hpp"

namespace coarsekit {

PointSet make_point_set(std::vector<PointId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

bool contains(const PointSet& set, PointId p) { return std::binary_search(set.begin(), set.end(), p); }

bool is_subset(const PointSet& inner, const PointSet& outer) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

PointSet set_intersection(const PointSet& a, const PointSet& b) {
  PointSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

PointSet set_union(const PointSet& a, const PointSet& b) {
  PointSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

PointSet set_difference(const PointSet& a, const PointSet& b) {
  PointSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::MetricViolation: return "MetricViolation";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::SourceMismatch: return "SourceMismatch";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::ScaleTooSmall: return "ScaleTooSmall";
    case ErrorCode::UnmappedPoint: return "UnmappedPoint";
    case ErrorCode::NotAnExpansion: return "NotAnExpansion";
    case ErrorCode::ImageEscapesSpace: return "ImageEscapesSpace";
    case ErrorCode::StrategyFailed: return "StrategyFailed";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::MultiplicityBoundViolated: return "MultiplicityBoundViolated";
    case ErrorCode::LipschitzTooLarge: return "LipschitzTooLarge";
    case ErrorCode::WeightAxiomViolated: return "WeightAxiomViolated";
    case ErrorCode::PartConditionViolated: return "PartConditionViolated";
    case ErrorCode::SessionFinished: return "SessionFinished";
    case ErrorCode::ComposeMismatch: return "ComposeMismatch";
  }
  return "Unknown";
}

FiniteMetricSpace::FiniteMetricSpace(SpaceSource source, std::size_t n, std::vector<double> dist)
    : source_(std::move(source)), n_(n), dist_(std::move(dist)) {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double d = dist_[i * n_ + j];
      diameter_ = std::max(diameter_, d);
      if (d > 0.0) min_positive_ = std::min(min_positive_, d);
    }
  }
}

PointSet FiniteMetricSpace::all_points() const {
  PointSet all(n_);
  std::iota(all.begin(), all.end(), PointId{0});
  return all;
}

namespace {

double norm_distance(const std::vector<double>& a, const std::vector<double>& b, Norm norm) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = std::abs(a[k] - b[k]);
    switch (norm) {
      case Norm::L1: acc += diff; break;
      case Norm::L2: acc += diff * diff; break;
      case Norm::LInf: acc = std::max(acc, diff); break;
    }
  }
  return norm == Norm::L2 ? std::sqrt(acc) : acc;
}

void require_distinct(const std::vector<double>& dist, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dist[i * n + j] <= 0.0) {
        throw Error(ErrorCode::InvalidInput,
                    "points " + std::to_string(i) + " and " + std::to_string(j) + " are at distance 0",
                    {{"p", i}, {"q", j}});
      }
    }
  }
}

std::vector<double> matrix_distances(const MatrixSource& src) {
  const std::size_t n = src.matrix.size();
  std::vector<double> dist(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (src.matrix[i].size() != n) {
      throw Error(ErrorCode::InvalidInput, "distance matrix is not square", {{"row", i}});
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double d = src.matrix[i][j];
      if (!std::isfinite(d) || d < 0.0) {
        throw Error(ErrorCode::InvalidInput, "distance entries must be finite and nonnegative",
                    {{"p", i}, {"q", j}});
      }
      dist[i * n + j] = d;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (dist[i * n + i] != 0.0) {
      throw Error(ErrorCode::InvalidInput, "nonzero diagonal entry", {{"p", i}});
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!tol::eq(dist[i * n + j], dist[j * n + i])) {
        throw Error(ErrorCode::InvalidInput, "distance matrix is not symmetric", {{"p", i}, {"q", j}});
      }
      dist[j * n + i] = dist[i * n + j];
    }
  }
  require_distinct(dist, n);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      for (std::size_t s = 0; s < n; ++s) {
        if (s == p || s == q) continue;
        if (tol::gt(dist[p * n + q], dist[p * n + s] + dist[s * n + q])) {
          std::ostringstream msg;
          msg << "triangle inequality fails: d(" << p << "," << q << ") > d(" << p << "," << s << ") + d("
              << s << "," << q << ")";
          throw Error(ErrorCode::MetricViolation, msg.str(), {{"p", p}, {"q", q}, {"s", s}});
        }
      }
    }
  }
  return dist;
}

std::vector<double> cloud_distances(const std::vector<std::vector<double>>& coords, Norm norm) {
  const std::size_t n = coords.size();
  for (const auto& c : coords) {
    if (c.size() != coords.front().size()) {
      throw Error(ErrorCode::InvalidInput, "point coordinates have inconsistent dimension");
    }
  }
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dist[i * n + j] = dist[j * n + i] = norm_distance(coords[i], coords[j], norm);
    }
  }
  require_distinct(dist, n);
  return dist;
}

std::vector<double> weighted_l1_distances(const WeightedL1Source& src) {
  const std::size_t n = src.tuples.size();
  const std::size_t k = n == 0 ? 0 : src.tuples.front().size();
  std::vector<double> weights = src.weights;
  if (weights.empty()) {
    for (std::size_t i = 0; i < k; ++i) weights.push_back(double(i + 1));
  }
  if (weights.size() != k) throw Error(ErrorCode::InvalidInput, "weight count does not match tuple length");
  for (double w : weights) {
    if (!(w > 0.0)) throw Error(ErrorCode::InvalidInput, "weights must be positive");
  }
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (src.tuples[i].size() != k) throw Error(ErrorCode::InvalidInput, "tuples have inconsistent length");
    for (std::size_t j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t c = 0; c < k; ++c) acc += weights[c] * std::abs(src.tuples[i][c] - src.tuples[j][c]);
      dist[i * n + j] = dist[j * n + i] = acc;
    }
  }
  require_distinct(dist, n);
  return dist;
}

std::vector<double> graph_distances(const GraphSource& src) {
  const std::size_t n = src.vertices;
  std::vector<std::vector<std::pair<PointId, double>>> adj(n);
  for (const auto& e : src.edges) {
    if (e.u >= n || e.v >= n) throw Error(ErrorCode::InvalidInput, "edge endpoint out of range");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw Error(ErrorCode::InvalidInput, "edge weights must be positive and finite");
    }
    adj[e.u].emplace_back(e.v, e.weight);
    adj[e.v].emplace_back(e.u, e.weight);
  }
  std::vector<double> dist(n * n, kInfinity);
  using Item = std::pair<double, PointId>;
  for (PointId s = 0; s < n; ++s) {
    double* row = &dist[std::size_t(s) * n];
    row[s] = 0.0;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.emplace(0.0, s);
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d > row[u]) continue;
      for (auto [v, w] : adj[u]) {
        if (d + w < row[v]) {
          row[v] = d + w;
          heap.emplace(row[v], v);
        }
      }
    }
    for (PointId v = 0; v < n; ++v) {
      if (std::isinf(row[v])) {
        throw Error(ErrorCode::DisconnectedGraph,
                    "no path between " + std::to_string(s) + " and " + std::to_string(v),
                    {{"p", s}, {"q", v}});
      }
    }
  }
  return dist;
}

std::size_t grid_size(const GridSource& grid) {
  std::size_t n = 1;
  for (auto d : grid.dims) n *= d;
  return n;
}

std::vector<double> grid_distances(const GridSource& grid) {
  if (grid.dims.empty()) throw Error(ErrorCode::InvalidInput, "grid needs at least one dimension");
  for (auto d : grid.dims) {
    if (d == 0) throw Error(ErrorCode::InvalidInput, "grid dimensions must be positive");
  }
  if (!(grid.spacing > 0.0)) throw Error(ErrorCode::InvalidInput, "grid spacing must be positive");
  const std::size_t n = grid_size(grid);
  std::vector<std::vector<double>> coords(n);
  for (std::size_t i = 0; i < n; ++i) coords[i] = grid_coordinates(grid, PointId(i));
  return cloud_distances(coords, grid.norm);
}

}  // namespace

std::vector<double> grid_coordinates(const GridSource& grid, PointId id) {
  std::vector<double> coords(grid.dims.size());
  std::size_t rest = id;
  for (std::size_t k = grid.dims.size(); k-- > 0;) {
    coords[k] = double(rest % grid.dims[k]) * grid.spacing;
    rest /= grid.dims[k];
  }
  return coords;
}

PointId grid_point(const GridSource& grid, const std::vector<std::size_t>& coords) {
  std::size_t id = 0;
  for (std::size_t k = 0; k < grid.dims.size(); ++k) id = id * grid.dims[k] + coords[k];
  return PointId(id);
}

SpacePtr build_space(const SpaceSource& source) {
  std::vector<double> dist;
  std::size_t n = 0;
  std::visit(
      [&](const auto& src) {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, MatrixSource>) {
          n = src.matrix.size();
          dist = matrix_distances(src);
        } else if constexpr (std::is_same_v<T, PointCloudSource>) {
          n = src.coords.size();
          dist = cloud_distances(src.coords, src.norm);
        } else if constexpr (std::is_same_v<T, WeightedL1Source>) {
          n = src.tuples.size();
          dist = weighted_l1_distances(src);
        } else if constexpr (std::is_same_v<T, GraphSource>) {
          n = src.vertices;
          dist = graph_distances(src);
        } else {
          n = grid_size(src);
          dist = grid_distances(src);
        }
      },
      source.kind);
  if (n == 0) throw Error(ErrorCode::InvalidInput, "a metric space needs at least one point");
  if (n > std::numeric_limits<PointId>::max()) throw Error(ErrorCode::TooLarge, "too many points");
  return std::make_shared<const FiniteMetricSpace>(source, n, std::move(dist));
}

Subspace whole_space(const SpacePtr& space) { return Subspace{space, space->all_points(), space->id()}; }

double diameter(const FiniteMetricSpace& space, const PointSet& points) {
  double best = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) best = std::max(best, space.dist(points[i], points[j]));
  }
  return best;
}

double diameter(const Subspace& subspace) { return diameter(*subspace.space, subspace.points); }

bool same_subspace(const Subspace& a, const Subspace& b) {
  return (a.space == b.space || a.space->id() == b.space->id()) && a.points == b.points;
}

MetricFamily single_space_family(const SpacePtr& space, std::string id) {
  if (id.empty()) id = space->id();
  return MetricFamily{std::move(id), {whole_space(space)}};
}

void validate_family(const MetricFamily& family) {
  for (std::size_t i = 0; i < family.members.size(); ++i) {
    const auto& m = family.members[i];
    if (!m.space) throw Error(ErrorCode::InvalidInput, "family member without a space", {{"member", i}});
    if (m.points.empty()) throw Error(ErrorCode::InvalidInput, "empty family member", {{"member", i}});
    if (!std::is_sorted(m.points.begin(), m.points.end()) ||
        std::adjacent_find(m.points.begin(), m.points.end()) != m.points.end()) {
      throw Error(ErrorCode::InvalidInput, "member points must be sorted and distinct", {{"member", i}});
    }
    if (m.points.back() >= m.space->size()) {
      throw Error(ErrorCode::InvalidInput, "member point outside its space", {{"member", i}});
    }
  }
}

std::vector<PointSet> r_components(const FiniteMetricSpace& space, const PointSet& subset, double r) {
  UnionFind uf(subset.size());
  for (std::size_t i = 0; i < subset.size(); ++i) {
    for (std::size_t j = i + 1; j < subset.size(); ++j) {
      if (tol::leq(space.dist(subset[i], subset[j]), r)) uf.unite(i, j);
    }
  }
  std::map<std::size_t, PointSet> by_root;
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    const auto root = uf.find(i);
    auto [it, inserted] = by_root.try_emplace(root);
    if (inserted) order.push_back(root);
    it->second.push_back(subset[i]);
  }
  std::vector<PointSet> classes;
  classes.reserve(order.size());
  for (auto root : order) classes.push_back(std::move(by_root[root]));
  return classes;
}

double mesh(const MetricFamily& family) {
  double best = 0.0;
  for (const auto& m : family.members) best = std::max(best, diameter(m));
  return best;
}

PointSet max_separated_net(const FiniteMetricSpace& space, const PointSet& subset, double L) {
  PointSet net;
  for (PointId p : subset) {
    bool separated = true;
    for (PointId z : net) {
      if (tol::lt(space.dist(p, z), L)) {
        separated = false;
        break;
      }
    }
    if (separated) net.push_back(p);
  }
  return net;
}

PiecewiseLinear::PiecewiseLinear(std::vector<std::pair<double, double>> samples) : samples_(std::move(samples)) {
  std::sort(samples_.begin(), samples_.end());
  if (samples_.empty()) throw Error(ErrorCode::InvalidInput, "piecewise-linear function needs samples");
}

PiecewiseLinear PiecewiseLinear::linear(double slope, double offset) {
  return PiecewiseLinear({{0.0, offset}, {1.0, offset + slope}});
}

double PiecewiseLinear::operator()(double t) const {
  if (samples_.empty()) return 0.0;
  if (samples_.size() == 1 || t <= samples_.front().first) return samples_.front().second;
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    const auto [t0, v0] = samples_[i - 1];
    const auto [t1, v1] = samples_[i];
    if (t <= t1) return t1 == t0 ? v1 : v0 + (v1 - v0) * (t - t0) / (t1 - t0);
  }
  const auto [t0, v0] = samples_[samples_.size() - 2];
  const auto [t1, v1] = samples_.back();
  const double slope = t1 == t0 ? 0.0 : (v1 - v0) / (t1 - t0);
  return v1 + slope * (t - t1);
}

bool PiecewiseLinear::nondecreasing() const {
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    if (samples_[i].second < samples_[i - 1].second) return false;
  }
  return true;
}

namespace {

void check_member_map(const FamilyMap& map, std::size_t i) {
  const auto& src = map.source.members[i];
  const auto& mm = map.maps[i];
  if (mm.target_member >= map.target.members.size()) {
    throw Error(ErrorCode::UnmappedPoint, "member map points at a missing target member", {{"member", i}});
  }
  if (mm.images.size() != src.points.size()) {
    throw Error(ErrorCode::UnmappedPoint, "member map is not total on its source member", {{"member", i}});
  }
  const auto& tgt = map.target.members[mm.target_member];
  for (std::size_t k = 0; k < mm.images.size(); ++k) {
    if (!contains(tgt.points, mm.images[k])) {
      throw Error(ErrorCode::UnmappedPoint,
                  "image of point " + std::to_string(src.points[k]) + " is outside the target member",
                  {{"member", i}, {"point", src.points[k]}});
    }
  }
}

}  // namespace

FamilyMapReport verify_family_map(const FamilyMap& map, const InverseMaps* inverse,
                                  std::optional<double> closeness_bound) {
  if (map.maps.size() != map.source.members.size()) {
    throw Error(ErrorCode::UnmappedPoint, "every source member needs a map");
  }
  FamilyMapReport report;
  if (!map.delta.nondecreasing() || !map.rho.nondecreasing()) {
    report.pass = false;
    report.message = "delta and rho must be nondecreasing";
  }
  for (const auto& [t, v] : map.delta.samples()) {
    if (tol::gt(v, map.rho(t))) {
      report.pass = false;
      report.message = "delta exceeds rho on the sample grid";
    }
  }

  std::vector<std::pair<double, double>> pairs;  // (source distance, image distance)
  for (std::size_t i = 0; i < map.source.members.size(); ++i) {
    check_member_map(map, i);
    const auto& src = map.source.members[i];
    const auto& mm = map.maps[i];
    const auto& tgt = map.target.members[mm.target_member];
    for (std::size_t a = 0; a < src.points.size(); ++a) {
      for (std::size_t b = a + 1; b < src.points.size(); ++b) {
        const double d = src.dist(src.points[a], src.points[b]);
        const double e = tgt.dist(mm.images[a], mm.images[b]);
        pairs.emplace_back(d, e);
        const double violation = std::max(map.delta(d) - e, e - map.rho(d));
        if (tol::gt(violation, 0.0) && violation > report.worst_violation) {
          report.worst_violation = violation;
          report.worst = PairWitness{i, src.points[a], src.points[b], d, e};
        }
      }
    }
  }
  if (report.worst) {
    report.pass = false;
    if (report.message.empty()) report.message = "coarse embedding bounds violated";
  }

  std::sort(pairs.begin(), pairs.end());
  std::vector<double> suffix_min(pairs.size() + 1, kInfinity);
  for (std::size_t k = pairs.size(); k-- > 0;) suffix_min[k] = std::min(suffix_min[k + 1], pairs[k].second);
  double running_max = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    running_max = std::max(running_max, pairs[k].second);
    const bool last_of_run = k + 1 == pairs.size() || pairs[k + 1].first != pairs[k].first;
    const bool first_of_run = k == 0 || pairs[k - 1].first != pairs[k].first;
    if (first_of_run) report.delta_hat.emplace_back(pairs[k].first, suffix_min[k]);
    if (last_of_run) report.rho_hat.emplace_back(pairs[k].first, running_max);
  }

  if (inverse) {
    if (inverse->images.size() != map.source.members.size()) {
      throw Error(ErrorCode::UnmappedPoint, "one inverse map per source member is required");
    }
    double closeness = 0.0;
    for (std::size_t i = 0; i < map.source.members.size(); ++i) {
      const auto& src = map.source.members[i];
      const auto& mm = map.maps[i];
      const auto& tgt = map.target.members[mm.target_member];
      const auto& g = inverse->images[i];
      if (g.size() != tgt.points.size()) {
        throw Error(ErrorCode::UnmappedPoint, "inverse map is not total on the target member", {{"member", i}});
      }
      auto f_of = [&](PointId x) {
        auto it = std::lower_bound(src.points.begin(), src.points.end(), x);
        if (it == src.points.end() || *it != x) {
          throw Error(ErrorCode::UnmappedPoint, "inverse image outside the source member", {{"member", i}});
        }
        return mm.images[std::size_t(it - src.points.begin())];
      };
      auto g_of = [&](PointId y) {
        auto it = std::lower_bound(tgt.points.begin(), tgt.points.end(), y);
        return g[std::size_t(it - tgt.points.begin())];
      };
      for (std::size_t k = 0; k < tgt.points.size(); ++k) {
        const PointId y = tgt.points[k];
        closeness = std::max(closeness, tgt.dist(y, f_of(g[k])));
      }
      for (std::size_t k = 0; k < src.points.size(); ++k) {
        const PointId x = src.points[k];
        closeness = std::max(closeness, src.dist(x, g_of(mm.images[k])));
      }
    }
    report.closeness = closeness;
    if (closeness_bound && tol::gt(closeness, *closeness_bound)) {
      report.pass = false;
      if (report.message.empty()) report.message = "composites are not uniformly close to the identity";
    }
  }
  if (report.pass) report.message = "ok";
  return report;
}

}  // namespace coarsekit
