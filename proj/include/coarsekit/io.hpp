#pragma once

#include <map>
#include <string>

#include "coarsekit/covers.hpp"
#include "coarsekit/decomposition.hpp"
#include "coarsekit/doubling.hpp"
#include "coarsekit/embedding.hpp"
#include "coarsekit/game.hpp"
#include "coarsekit/nerve.hpp"

namespace coarsekit {

// Sorted keys, shortest round-trip floats, two-space indent, trailing
// newline. Infinite values are written as the string "inf".
std::string canonical(const json& value);

json number_to_json(double v);
double number_from_json(const json& v);

// Spaces referenced by id. Lookups fall back to the bundled fixtures.
class SpaceRegistry {
 public:
  void add(const SpacePtr& space);
  void load(const json& spaces);  // array of space objects
  SpacePtr get(const std::string& id) const;
  json to_json() const;           // array, ordered by id

 private:
  std::map<std::string, SpacePtr> spaces_;
};

json space_to_json(const FiniteMetricSpace& space);
SpacePtr space_from_json(const json& j);

json family_to_json(const MetricFamily& family);
MetricFamily family_from_json(const json& j, const SpaceRegistry& spaces);
void collect_spaces(const MetricFamily& family, SpaceRegistry& out);

// Self-contained unless `embed_spaces` is false (used inside transcripts).
json certificate_to_json(const DecompositionCertificate& cert, bool embed_spaces = true);
DecompositionCertificate certificate_from_json(const json& j, const SpaceRegistry* outer = nullptr);

json cover_to_json(const Cover& cover);
Cover cover_from_json(const json& j, const SpaceRegistry* outer = nullptr);

json complex_to_json(const UniformComplex& complex);
UniformComplex complex_from_json(const json& j);

json complex_map_to_json(const ComplexMap& map);

json feature_map_to_json(const FeatureMap& map);
FeatureMap feature_map_from_json(const json& j);

json doubling_to_json(const DoublingCertificate& cert);
DoublingCertificate doubling_from_json(const json& j, const SpaceRegistry* outer = nullptr);

json options_to_json(const DefendOptions& options);
DefendOptions options_from_json(const json& j);

json session_to_json(const GameSession& session);
GameSession session_from_json(const json& j);

json error_to_json(const Error& e);

}  // namespace coarsekit
