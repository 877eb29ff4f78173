#pragma once

#include <vector>

#include "coarsekit/metric_space.hpp"

namespace coarsekit {

// A cover of `domain` (a whole space or a family member, with the restricted
// metric). Element ids are indices into `elements`.
struct Cover {
  Subspace domain;
  std::vector<PointSet> elements;
};

// Throws InvalidInput unless every element is a nonempty subset of the
// domain and the elements together cover it.
void validate_cover(const Cover& cover);

std::size_t multiplicity(const Cover& cover);

// max over x of the number of elements met by the open ball B_d(x).
std::size_t d_multiplicity(const Cover& cover, double d);

// Distance from x to the complement of `element` inside the domain;
// +infinity when the element is the whole domain.
double distance_to_complement(const Subspace& domain, const PointSet& element, PointId x);

// min over x of max over U of d(x, U^c). +infinity ("Unbounded") when some
// element is the whole domain.
double lebesgue_number(const Cover& cover);

// Each element V replaced by {x in domain : d(x, V) <= lambda}.
Cover enlarge(const Cover& cover, double lambda);

// Drops repeated elements (first occurrence kept).
Cover deduplicate(const Cover& cover);

// {x : B_d(x) is contained in U}, for the open ball inside the domain.
PointSet interior(const Subspace& domain, const PointSet& element, double d);

}  // namespace coarsekit
