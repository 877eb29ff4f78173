#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coarsekit/covers.hpp"
#include "coarsekit/metric_space.hpp"

namespace coarsekit {

// levels[i] lists the parts X_ij of level i. A point may sit in several
// levels (X = X_0 u ... u X_n is a union, not a partition), but within one
// level the parts are pairwise r-disjoint.
struct MemberDecomposition {
  std::vector<std::vector<PointSet>> levels;
};

struct DecompositionCertificate {
  MetricFamily source;
  double r = 0.0;
  std::size_t n = 0;
  std::vector<MemberDecomposition> members;  // aligned with source.members
  MetricFamily target;
};

// Sorts parts inside each level, pads members to n + 1 levels and rebuilds
// the target family from the parts: member by member, distinct parts in
// lexicographic order.
void canonicalize(DecompositionCertificate& cert, std::string target_id = {});

MetricFamily parts_family(const DecompositionCertificate& cert, std::string id);

std::size_t part_count(const DecompositionCertificate& cert);

struct CertificateReport {
  bool valid = true;
  std::string violation;  // empty when valid
  std::string message;
  json details = json::object();
};

// Exhaustive check of every certificate invariant; reports the first
// violation found.
CertificateReport verify_certificate(const DecompositionCertificate& cert);

// Outer decomposes X over Y, inner decomposes Y (= outer.target) over Z.
// Result decomposes X over Z at min(r, s) with (m+1)(n+1)-1 levels; a point
// at outer level i and inner level j lands on level i (n_inner + 1) + j.
// Throws SourceMismatch when inner.source differs from outer.target.
DecompositionCertificate compose_certificates(const DecompositionCertificate& outer,
                                              const DecompositionCertificate& inner);

// The shrunken-interior construction turning a cover with multiplicity at
// most n + 1 and Lebesgue number at least (n + 1) r into an (r, n)
// decomposition of the cover's domain. Throws PreconditionFailed.
DecompositionCertificate grave_construct(const Cover& cover, double r, std::size_t n);

// Levels only, for callers assembling multi-member certificates.
std::vector<std::vector<PointSet>> grave_levels(const Cover& cover, double r, std::size_t n);

// Pulls a decomposition of map.target (at scale >= rho(r)) back to an
// (r, n) decomposition of map.source over F^{-1}(parts).
// Throws ScaleTooSmall, UnmappedPoint, InvalidInput.
DecompositionCertificate pullback_certificate(const FamilyMap& map, const DecompositionCertificate& cert,
                                              double r);

// Partial self-map of a space: image[p] is T(p) or nullopt where T leaves the
// finite host.
struct PointMap {
  std::vector<std::optional<PointId>> image;
};

// Checks d(T x, T y) = lambda d(x, y) on every pair of the domain of T.
// Throws NotAnExpansion with the worst pair.
void check_expansion(const FiniteMetricSpace& space, const PointMap& T, double lambda);

// Pushes a certificate on {X} forward along T^k: parts become T^k(parts),
// the scale becomes lambda^k r. Throws NotAnExpansion, ImageEscapesSpace.
DecompositionCertificate pushforward_expansion(const SpacePtr& space, const PointMap& T, double lambda,
                                               const DecompositionCertificate& cert, std::size_t k);

// Builds a certificate from per-member level assignments: parts are the
// r-components of each level. colorings[m][k] is the level of the k-th point
// of member m.
DecompositionCertificate coloring_certificate(const MetricFamily& family, double r, std::size_t n,
                                              const std::vector<std::vector<std::size_t>>& colorings);

struct NetCover {
  PointSet net;
  Cover cover;
  std::size_t multiplicity = 0;
  double lebesgue = 0.0;
};

// Maximal 2s-separated net (greedy by id) and the closed balls of radius
// `ball_factor` * s around it, restricted to the member.
NetCover net_cover(const Subspace& member, double s, double ball_factor = 4.0);

// One net cover per member at scale r.
std::vector<NetCover> net_cover_strategy(const MetricFamily& family, double r);

struct OracleVerdict {
  bool decomposable = false;
  std::optional<DecompositionCertificate> witness;
  double min_worst_diameter = kInfinity;
};

inline constexpr std::size_t kMaxOraclePoints = 14;

// Enumerates all level assignments up to relabelling of levels; the parts of
// a level are its r-components. Reports the least achievable worst part
// diameter and, when it is <= D, the lexicographically smallest witness.
// Throws TooLarge above max_points.
OracleVerdict exhaustive_decompose(const Subspace& member, double r, std::size_t n, double D,
                                   std::size_t max_points = kMaxOraclePoints);

enum class Strategy { NetThenGrave, Singletons, OracleSmall };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

struct DefendOptions {
  // oracle_small: number of levels and diameter bound.
  std::size_t n = 1;
  double diameter_bound = kInfinity;
  std::size_t max_oracle_points = kMaxOraclePoints;
  // net_then_grave: the net scale starts at start_factor * r and grows by
  // growth_factor until the Lebesgue precondition holds or it exceeds
  // scale_cap (default: twice the member diameter).
  double start_factor = 0.5;
  double growth_factor = 1.5;
  std::optional<double> scale_cap;
  std::optional<std::size_t> max_levels;
};

// Answers a challenge at scale r with a verified certificate. Throws
// StrategyFailed with the reason.
DecompositionCertificate defend(const MetricFamily& family, double r, Strategy policy,
                                const DefendOptions& options = {});

}  // namespace coarsekit
