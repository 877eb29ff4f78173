#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "coarsekit/core.hpp"

namespace coarsekit {

enum class Norm { L1, L2, LInf };

struct MatrixSource {
  std::vector<std::vector<double>> matrix;
};

struct PointCloudSource {
  std::vector<std::vector<double>> coords;
  Norm norm = Norm::L2;
};

// d(x, y) = sum_i w_i |x_i - y_i|. Empty weights mean w_i = i (1-based).
struct WeightedL1Source {
  std::vector<std::vector<double>> tuples;
  std::vector<double> weights;
};

struct GraphEdge {
  PointId u = 0;
  PointId v = 0;
  double weight = 1.0;
};

// Undirected weighted graph; the space carries the shortest-path metric.
struct GraphSource {
  std::size_t vertices = 0;
  std::vector<GraphEdge> edges;
};

// Integer lattice {0..dims[0]-1} x ... scaled by `spacing`. Point ids are
// row-major with the last coordinate varying fastest.
struct GridSource {
  std::vector<std::size_t> dims;
  Norm norm = Norm::L1;
  double spacing = 1.0;
};

struct SpaceSource {
  std::string id;
  std::string label;
  std::variant<MatrixSource, PointCloudSource, WeightedL1Source, GraphSource, GridSource> kind;
};

class FiniteMetricSpace {
 public:
  FiniteMetricSpace(SpaceSource source, std::size_t n, std::vector<double> dist);

  const std::string& id() const noexcept { return source_.id; }
  const std::string& label() const noexcept { return source_.label; }
  const SpaceSource& source() const noexcept { return source_; }

  std::size_t size() const noexcept { return n_; }
  double dist(PointId p, PointId q) const noexcept { return dist_[std::size_t(p) * n_ + q]; }

  PointSet all_points() const;
  double min_positive_distance() const noexcept { return min_positive_; }
  double diameter() const noexcept { return diameter_; }

 private:
  SpaceSource source_;
  std::size_t n_;
  std::vector<double> dist_;
  double min_positive_ = kInfinity;
  double diameter_ = 0.0;
};

using SpacePtr = std::shared_ptr<const FiniteMetricSpace>;

// Validates matrix input (symmetry, zero diagonal, positivity off the
// diagonal, triangle inequality on every triple). Generated sources are
// metric by construction. Throws MetricViolation / DisconnectedGraph /
// InvalidInput.
SpacePtr build_space(const SpaceSource& source);

std::vector<double> grid_coordinates(const GridSource& grid, PointId id);
PointId grid_point(const GridSource& grid, const std::vector<std::size_t>& coords);

// A subset of a parent space with the restricted metric. Family members and
// cover domains are subspaces; they reference the parent rather than copy it.
struct Subspace {
  SpacePtr space;
  PointSet points;
  std::string label;

  std::size_t size() const noexcept { return points.size(); }
  double dist(PointId p, PointId q) const noexcept { return space->dist(p, q); }
};

Subspace whole_space(const SpacePtr& space);
double diameter(const Subspace& subspace);
double diameter(const FiniteMetricSpace& space, const PointSet& points);
bool same_subspace(const Subspace& a, const Subspace& b);

struct MetricFamily {
  std::string id;
  std::vector<Subspace> members;
};

MetricFamily single_space_family(const SpacePtr& space, std::string id = {});

// Checks member invariants: nonempty, ids inside the parent space, canonical
// order. Throws InvalidInput.
void validate_family(const MetricFamily& family);

// Partition of `subset` into the classes of the transitive closure of
// {(p, q) : d(p, q) <= r}. Classes are sorted and ordered by smallest id.
std::vector<PointSet> r_components(const FiniteMetricSpace& space, const PointSet& subset, double r);

double mesh(const MetricFamily& family);

// Greedy maximal L-separated subset (pairwise distances >= L), scanning
// points in ascending id order.
PointSet max_separated_net(const FiniteMetricSpace& space, const PointSet& subset, double L);

// Nondecreasing function on [0, inf) given by samples (t_i, v_i) with
// linear interpolation; constant before the first sample and extended with
// the last slope after the final sample.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;
  explicit PiecewiseLinear(std::vector<std::pair<double, double>> samples);

  static PiecewiseLinear linear(double slope, double offset = 0.0);

  double operator()(double t) const;
  bool nondecreasing() const;
  const std::vector<std::pair<double, double>>& samples() const noexcept { return samples_; }

 private:
  std::vector<std::pair<double, double>> samples_;
};

// One point function per source member, landing in `target.members[target_member]`.
// `images[k]` is the image of `source.members[i].points[k]`.
struct MemberMap {
  std::size_t target_member = 0;
  std::vector<PointId> images;
};

struct FamilyMap {
  MetricFamily source;
  MetricFamily target;
  std::vector<MemberMap> maps;  // aligned with source.members
  PiecewiseLinear delta;
  PiecewiseLinear rho;
};

// Optional inverse maps for the coarse-equivalence closeness check: one per
// source member, mapping target member points (aligned with its point list)
// back into the source member's space.
struct InverseMaps {
  std::vector<std::vector<PointId>> images;
};

struct PairWitness {
  std::size_t member = 0;
  PointId p = 0;
  PointId q = 0;
  double source_distance = 0.0;
  double image_distance = 0.0;
};

struct FamilyMapReport {
  bool pass = true;
  std::string message;
  std::optional<PairWitness> worst;
  double worst_violation = 0.0;
  // Tightest nondecreasing bounds observed, sampled at every distinct
  // source distance t: delta_hat(t) = min image distance over pairs at
  // distance >= t, rho_hat(t) = max image distance over pairs at distance <= t.
  std::vector<std::pair<double, double>> delta_hat;
  std::vector<std::pair<double, double>> rho_hat;
  std::optional<double> closeness;  // measured uniform-closeness constant
};

// Throws UnmappedPoint when a member map is not total or lands outside its
// target member; every other defect is reported.
FamilyMapReport verify_family_map(const FamilyMap& map, const InverseMaps* inverse = nullptr,
                                  std::optional<double> closeness_bound = std::nullopt);

}  // namespace coarsekit
