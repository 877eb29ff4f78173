#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace coarsekit {

using json = nlohmann::json;

using PointId = std::uint32_t;

// Sorted, duplicate-free list of point ids. Parts and cover elements are
// always stored in this canonical form.
using PointSet = std::vector<PointId>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

PointSet make_point_set(std::vector<PointId> ids);
bool contains(const PointSet& set, PointId p);
bool is_subset(const PointSet& inner, const PointSet& outer);
PointSet set_intersection(const PointSet& a, const PointSet& b);
PointSet set_union(const PointSet& a, const PointSet& b);
PointSet set_difference(const PointSet& a, const PointSet& b);

// Threshold comparisons. Every "<= r" / "> r" decision in the library goes
// through these so that non-integral metrics get the same slack everywhere.
namespace tol {

inline constexpr double kTau = 1e-9;

inline double slack(double a, double b) {
  return kTau * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool leq(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return a <= b;
  return a <= b + slack(a, b);
}
inline bool lt(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return a < b;
  return a < b - slack(a, b);
}
inline bool geq(double a, double b) { return leq(b, a); }
inline bool gt(double a, double b) { return lt(b, a); }
inline bool eq(double a, double b) { return leq(a, b) && leq(b, a); }

}  // namespace tol

enum class ErrorCode {
  InvalidInput,
  MetricViolation,
  DisconnectedGraph,
  SourceMismatch,
  PreconditionFailed,
  ScaleTooSmall,
  UnmappedPoint,
  NotAnExpansion,
  ImageEscapesSpace,
  StrategyFailed,
  TooLarge,
  MultiplicityBoundViolated,
  LipschitzTooLarge,
  WeightAxiomViolated,
  PartConditionViolated,
  SessionFinished,
  ComposeMismatch,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported with this exception. `details` carries
// the machine-readable payload (offending point ids, measured values, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, json details = json::object())
      : std::runtime_error(message), code_(code), details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  const json& details() const noexcept { return details_; }

 private:
  ErrorCode code_;
  json details_;
};

}  // namespace coarsekit
