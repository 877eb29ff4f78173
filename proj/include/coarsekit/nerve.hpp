#pragma once

#include <string>
#include <utility>
#include <vector>

#include "coarsekit/covers.hpp"

namespace coarsekit {

using VertexId = std::uint32_t;

// Barycentric coordinates, sparse: (vertex, weight) pairs sorted by vertex,
// no zero weights. Weights sum to 1.
struct ComplexPoint {
  std::vector<std::pair<VertexId, double>> coords;

  double operator[](VertexId v) const;
  double max_coordinate() const;
};

ComplexPoint vertex_point(VertexId v);
ComplexPoint barycenter(const std::vector<VertexId>& simplex);

// Global l1 metric sum_v |a_v - b_v| over the union of supports.
double l1_distance(const ComplexPoint& a, const ComplexPoint& b);

struct UniformComplex {
  std::size_t vertex_count = 0;
  std::vector<std::vector<VertexId>> facets;  // maximal simplices, sorted

  std::size_t dim() const;
  bool has_simplex(std::vector<VertexId> simplex) const;
};

// Facets from maximal lists of simplices; removes non-maximal ones.
UniformComplex make_complex(std::size_t vertex_count, std::vector<std::vector<VertexId>> simplices);

// All faces of every facet (each listed once), in lexicographic order.
std::vector<std::vector<VertexId>> all_simplices(const UniformComplex& complex);

// Vertex per cover element; a vertex set spans a simplex iff those elements
// share a point. The facets are the maximal per-point element sets.
UniformComplex nerve_of_cover(const Cover& cover);

std::string to_dot(const UniformComplex& complex);

struct ComplexMap {
  Subspace domain;
  std::vector<ComplexPoint> values;  // aligned with domain.points
  UniformComplex complex;

  const ComplexPoint& at(PointId p) const;
};

// phi_U(x) = d(x, U^c) / sum_V d(x, V^c) into the nerve. Requires
// multiplicity <= n + 1 and Lebesgue number >= (2n+2)(2n+3)/epsilon.
// Throws PreconditionFailed.
ComplexMap partition_of_unity_map(const Cover& cover, double epsilon, std::size_t n);

// The same map without the precondition, for experiments with small covers.
ComplexMap partition_of_unity_map_unchecked(const Cover& cover);

double required_lebesgue(double epsilon, std::size_t n);

struct LipschitzReport {
  double constant = 0.0;  // max over distinct pairs of d1(phi x, phi y) / d(x, y)
  PointId p = 0;
  PointId q = 0;
};

LipschitzReport measure_lipschitz(const ComplexMap& map);

struct StarCoverReport {
  std::size_t dim = 0;
  double required = 0.0;             // 1 / (n + 1)
  double min_max_coordinate = 1.0;   // over every tested point
  double lebesgue_lower_bound = 0.0; // exact star Lebesgue number at the worst tested point
  std::size_t tested = 0;
  bool pass = true;
};

// Exact distance from x to the complement of star(v) is 2 x_v when the
// complex has another vertex, so the star Lebesgue number at x is
// 2 max_v x_v. Tests every simplex barycenter plus the supplied points.
StarCoverReport star_cover(const UniformComplex& complex, std::size_t n,
                           const std::vector<ComplexPoint>& extra_points = {});

struct StarPullback {
  Cover cover;  // U_v = {x : phi(x)_v != 0}, empty preimages dropped
  std::vector<VertexId> vertices;  // vertex of each element
  std::size_t multiplicity = 0;
  double lebesgue = 0.0;
  double lipschitz = 0.0;
};

// Requires a 1/((n+1) r)-Lipschitz map into a complex of dimension <= n.
// Throws LipschitzTooLarge, PreconditionFailed.
StarPullback pullback_star_cover(const ComplexMap& map, double r, std::size_t n);

}  // namespace coarsekit
