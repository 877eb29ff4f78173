#pragma once

#include <vector>

#include "coarsekit/decomposition.hpp"

namespace coarsekit {

// One covering witness: B_{2r}(center) n Y is inside the union of the open
// balls B_r(c), c in `balls`.
struct DoublingWitness {
  PointId center = 0;
  double scale = 0.0;
  PointSet balls;
};

// Host variant: centers range over the whole host space and ball centers may
// be any host point. Intrinsic variant: Y is treated as a space of its own,
// so both centers and ball centers lie in Y.
struct DoublingCertificate {
  SpacePtr space;
  PointSet subset;
  bool intrinsic = false;
  std::size_t N = 0;
  double R = 0.0;
  std::vector<double> scales;
  std::vector<DoublingWitness> witnesses;  // scale-major, then by center

  const DoublingWitness* find(PointId center, double scale) const;
};

// R, 2R, 4R, ... while the scale stays at most `max_scale` (always at least R).
std::vector<double> dyadic_grid(double R, double max_scale);

// Greedy cover of every B_{2r}(x) n Y: repeatedly takes the candidate center
// whose open r-ball covers the most uncovered points, lowest id on ties.
// N is the largest witness size.
DoublingCertificate certify_doubling(const SpacePtr& space, const PointSet& subset, double R,
                                     const std::vector<double>& scales, bool intrinsic = false);

struct DoublingReport {
  bool valid = true;
  std::string message;
  json details = json::object();
};

// Exhaustive coverage check at every center and scale of the grid.
DoublingReport verify_doubling(const DoublingCertificate& cert);

// The subspace transfer: from a host certificate with constants (N, R)
// builds an intrinsic certificate with constants at most (N^2, 2R) on the
// scales r of the grid with r / 2 also in the grid. Throws InvalidInput.
DoublingCertificate subspace_doubling(const DoublingCertificate& cert);

// |B_{8r}(x) n Z| for every x in a 2r-separated net Z; the maximum.
std::size_t max_net_crowding(const Subspace& member, const PointSet& net, double r);

struct AsdimCoverReport {
  std::size_t N = 0;
  double R = 0.0;
  double lambda = 0.0;
  double scale = 0.0;                    // max(lambda, R)
  std::size_t bound = 0;                 // N^4
  std::vector<NetCover> covers;          // per member
  std::size_t max_multiplicity = 0;
  double min_lebesgue = kInfinity;
  DecompositionCertificate certificate;  // at scale lambda / max_multiplicity
};

// Net-ball covers at scale max(lambda, R) for every member, checked against
// the N^4 multiplicity bound and fed to the interior-shrinking construction.
// Throws MultiplicityBoundViolated, InvalidInput.
AsdimCoverReport doubling_to_asdim_cover(const MetricFamily& family, const std::vector<DoublingCertificate>& certs,
                                         double lambda);

// Certifies each selected union of members (indices into family.members)
// and reports the resulting constants.
struct UnionDoublingReport {
  std::vector<std::size_t> members;
  std::size_t N = 0;
  bool valid = true;
};
std::vector<UnionDoublingReport> check_finite_unions(const MetricFamily& family,
                                                     const std::vector<std::vector<std::size_t>>& unions, double R,
                                                     const std::vector<double>& scales);

}  // namespace coarsekit
