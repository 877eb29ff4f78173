#pragma once

#include <optional>
#include <vector>

#include "coarsekit/metric_space.hpp"

namespace coarsekit {

// Euclidean feature vectors on a finite point set; vectors[k] belongs to
// points[k]. Every vector has length `dim`.
struct FeatureMap {
  PointSet points;
  std::size_t dim = 0;
  std::vector<std::vector<double>> vectors;

  const std::vector<double>* find(PointId p) const;
};

double norm(const std::vector<double>& v);
double distance(const std::vector<double>& a, const std::vector<double>& b);
double inner(const std::vector<double>& a, const std::vector<double>& b);

// (cos(theta x), sin(theta x)) along a line space given by point coordinates
// t(p) = d(p, base).
FeatureMap rotation_map(const FiniteMetricSpace& space, const PointSet& points, PointId base, double theta);

// For each S in the grid: sup |<xi(x), xi(y)>| over distinct pairs with
// d(x, y) >= S (0 when there is no such pair).
std::vector<std::pair<double, double>> decay_profile(const FiniteMetricSpace& space, const FeatureMap& map,
                                                     const std::vector<double>& S_grid);

struct DgReport {
  bool unit_norm = true;
  double worst_norm_error = 0.0;
  std::optional<PointId> worst_norm_point;
  bool variation_ok = true;
  double max_variation = 0.0;  // over pairs with d <= R
  std::optional<std::pair<PointId, PointId>> worst_pair;
  std::vector<std::pair<double, double>> profile;

  bool pass() const { return unit_norm && variation_ok; }
};

// Conditions (i) and (ii) checked exhaustively; (iii) reported as a decay
// profile with no pass/fail threshold.
DgReport check_dg_criterion(const FiniteMetricSpace& space, const FeatureMap& map, double R, double epsilon,
                            const std::vector<double>& S_grid);

struct GlueInput {
  Subspace domain;
  std::vector<PointSet> parts;                 // U_j
  std::vector<std::vector<double>> weights;    // weights[j][k] = phi_j(domain.points[k])
  std::vector<FeatureMap> xis;                 // xi_j, defined at least on U_j^R
  double R = 1.0;
  double epsilon = 1.0;
  std::vector<double> S_grid;
};

struct GlueResult {
  FeatureMap eta;                       // blocks concatenated in part order
  std::vector<std::size_t> offsets;     // start of block j
  std::vector<PointSet> enlarged;       // U_j^R
  double max_norm_error = 0.0;          // | ||eta(x)|| - 1 |
  double max_variation = 0.0;           // over R-close pairs
  double max_weight_variation = 0.0;    // sum_j |phi_j(x) - phi_j(y)| over R-close pairs
  bool norm_ok = true;
  bool variation_ok = true;
  std::vector<std::pair<double, double>> profile;
};

// eta_j(x) = sqrt(phi_j(x)) xi_j(x) on U_j^R and 0 elsewhere. Checks the
// weight axioms (a) sum = 1, (b) support in U_j, (c) R-close pairs vary by at
// most epsilon^2 / 4, and the part conditions (unit norm and variation at
// most epsilon / 2 on U_j^R). Throws WeightAxiomViolated, PartConditionViolated.
GlueResult glue_embeddings(const GlueInput& input);

// The distance-to-complement partition of unity of a cover, laid out as
// GlueInput weights.
std::vector<std::vector<double>> distance_weights(const Subspace& domain, const std::vector<PointSet>& parts);

}  // namespace coarsekit
