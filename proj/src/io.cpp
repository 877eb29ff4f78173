#include "coarsekit/io.hpp"

#include "coarsekit/fixtures.hpp"

namespace coarsekit {
namespace {

std::string norm_name(Norm n) {
  switch (n) {
    case Norm::L1: return "l1";
    case Norm::L2: return "l2";
    case Norm::LInf: return "linf";
  }
  return "l2";
}

Norm parse_norm(const std::string& s) {
  if (s == "l1") return Norm::L1;
  if (s == "l2") return Norm::L2;
  if (s == "linf") return Norm::LInf;
  throw Error(ErrorCode::InvalidInput, "unknown norm '" + s + "'");
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::InvalidInput, std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("bad field '") + key + "': " + e.what());
  }
}

PointSet point_set_field(const json& j, const char* key) {
  auto ids = field<std::vector<PointId>>(j, key);
  return make_point_set(std::move(ids));
}

json subspace_to_json(const Subspace& s) {
  json m = {{"space", s.space->id()}, {"points", s.points}};
  if (!s.label.empty()) m["label"] = s.label;
  return m;
}

Subspace subspace_from_json(const json& j, const SpaceRegistry& spaces) {
  Subspace s;
  s.space = spaces.get(field<std::string>(j, "space"));
  s.points = j.contains("points") ? point_set_field(j, "points") : s.space->all_points();
  if (j.contains("label")) s.label = field<std::string>(j, "label");
  return s;
}

SpaceRegistry registry_for(const json& j, const SpaceRegistry* outer) {
  SpaceRegistry reg;
  if (outer) reg = *outer;
  if (j.contains("spaces")) reg.load(j.at("spaces"));
  return reg;
}

}  // namespace

std::string canonical(const json& value) { return value.dump(2) + "\n"; }

json number_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "Unbounded") return kInfinity;
    if (s == "-inf") return -kInfinity;
  }
  throw Error(ErrorCode::InvalidInput, "expected a number, got " + v.dump());
}

void SpaceRegistry::add(const SpacePtr& space) { spaces_[space->id()] = space; }

void SpaceRegistry::load(const json& spaces) {
  if (!spaces.is_array()) throw Error(ErrorCode::InvalidInput, "'spaces' must be an array");
  for (const auto& s : spaces) add(space_from_json(s));
}

SpacePtr SpaceRegistry::get(const std::string& id) const {
  if (auto it = spaces_.find(id); it != spaces_.end()) return it->second;
  if (fixtures::has(id)) return fixtures::load(id);
  throw Error(ErrorCode::InvalidInput, "unknown space '" + id + "'");
}

json SpaceRegistry::to_json() const {
  json arr = json::array();
  for (const auto& [_, s] : spaces_) arr.push_back(space_to_json(*s));
  return arr;
}

json space_to_json(const FiniteMetricSpace& space) {
  const auto& src = space.source();
  json j = {{"id", src.id}};
  if (!src.label.empty()) j["label"] = src.label;
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, MatrixSource>) {
          j["type"] = "matrix";
          j["matrix"] = k.matrix;
        } else if constexpr (std::is_same_v<K, PointCloudSource>) {
          j["type"] = "points";
          j["coords"] = k.coords;
          j["norm"] = norm_name(k.norm);
        } else if constexpr (std::is_same_v<K, WeightedL1Source>) {
          j["type"] = "weighted_l1";
          j["tuples"] = k.tuples;
          if (!k.weights.empty()) j["weights"] = k.weights;
        } else if constexpr (std::is_same_v<K, GraphSource>) {
          j["type"] = "graph";
          j["vertices"] = k.vertices;
          json edges = json::array();
          for (const auto& e : k.edges) edges.push_back(json::array({e.u, e.v, e.weight}));
          j["edges"] = edges;
        } else {
          j["type"] = "grid";
          j["dims"] = k.dims;
          j["norm"] = norm_name(k.norm);
          j["spacing"] = k.spacing;
        }
      },
      src.kind);
  return j;
}

SpacePtr space_from_json(const json& j) {
  SpaceSource src;
  src.id = field<std::string>(j, "id");
  if (j.contains("label")) src.label = field<std::string>(j, "label");
  const auto type = field<std::string>(j, "type");
  if (type == "matrix") {
    src.kind = MatrixSource{field<std::vector<std::vector<double>>>(j, "matrix")};
  } else if (type == "points") {
    src.kind = PointCloudSource{field<std::vector<std::vector<double>>>(j, "coords"),
                                parse_norm(j.value("norm", std::string("l2")))};
  } else if (type == "weighted_l1") {
    WeightedL1Source w{field<std::vector<std::vector<double>>>(j, "tuples"), {}};
    if (j.contains("weights")) w.weights = field<std::vector<double>>(j, "weights");
    src.kind = std::move(w);
  } else if (type == "graph") {
    GraphSource g{field<std::size_t>(j, "vertices"), {}};
    for (const auto& e : field<json>(j, "edges")) {
      if (!e.is_array() || e.size() < 2 || e.size() > 3) throw Error(ErrorCode::InvalidInput, "edge must be [u, v] or [u, v, w]");
      g.edges.push_back(GraphEdge{e[0].get<PointId>(), e[1].get<PointId>(), e.size() == 3 ? e[2].get<double>() : 1.0});
    }
    src.kind = std::move(g);
  } else if (type == "grid") {
    src.kind = GridSource{field<std::vector<std::size_t>>(j, "dims"), parse_norm(j.value("norm", std::string("l1"))),
                          j.value("spacing", 1.0)};
  } else {
    throw Error(ErrorCode::InvalidInput, "unknown space type '" + type + "'");
  }
  return build_space(src);
}

json family_to_json(const MetricFamily& family) {
  json members = json::array();
  for (const auto& m : family.members) members.push_back(subspace_to_json(m));
  return {{"id", family.id}, {"members", members}};
}

MetricFamily family_from_json(const json& j, const SpaceRegistry& spaces) {
  MetricFamily f;
  f.id = j.value("id", std::string());
  for (const auto& m : field<json>(j, "members")) f.members.push_back(subspace_from_json(m, spaces));
  validate_family(f);
  return f;
}

void collect_spaces(const MetricFamily& family, SpaceRegistry& out) {
  for (const auto& m : family.members) out.add(m.space);
}

json certificate_to_json(const DecompositionCertificate& cert, bool embed_spaces) {
  json members = json::array();
  for (std::size_t i = 0; i < cert.members.size(); ++i) {
    json m = {{"levels", cert.members[i].levels}};
    if (i < cert.source.members.size()) m["space"] = cert.source.members[i].space->id();
    members.push_back(m);
  }
  json j = {{"r", number_to_json(cert.r)},
            {"n", cert.n},
            {"source", family_to_json(cert.source)},
            {"members", members},
            {"target", cert.target.id},
            {"target_members", family_to_json(cert.target)["members"]}};
  if (embed_spaces) {
    SpaceRegistry reg;
    collect_spaces(cert.source, reg);
    collect_spaces(cert.target, reg);
    j["spaces"] = reg.to_json();
  }
  return j;
}

DecompositionCertificate certificate_from_json(const json& j, const SpaceRegistry* outer) {
  const auto reg = registry_for(j, outer);
  DecompositionCertificate cert;
  cert.r = number_from_json(field<json>(j, "r"));
  cert.n = field<std::size_t>(j, "n");
  cert.source = family_from_json(field<json>(j, "source"), reg);
  for (const auto& m : field<json>(j, "members")) {
    MemberDecomposition md;
    md.levels = field<std::vector<std::vector<PointSet>>>(m, "levels");
    cert.members.push_back(std::move(md));
  }
  cert.target.id = j.value("target", std::string());
  if (j.contains("target_members")) {
    for (const auto& m : j.at("target_members")) cert.target.members.push_back(subspace_from_json(m, reg));
  } else {
    cert.target = parts_family(cert, cert.target.id);
  }
  return cert;
}

json cover_to_json(const Cover& cover) {
  SpaceRegistry reg;
  reg.add(cover.domain.space);
  json j = {{"space", cover.domain.space->id()},
            {"elements", cover.elements},
            {"spaces", reg.to_json()}};
  if (cover.domain.points != cover.domain.space->all_points()) j["domain"] = cover.domain.points;
  return j;
}

Cover cover_from_json(const json& j, const SpaceRegistry* outer) {
  const auto reg = registry_for(j, outer);
  Cover c;
  c.domain.space = reg.get(field<std::string>(j, "space"));
  c.domain.points = j.contains("domain") ? point_set_field(j, "domain") : c.domain.space->all_points();
  for (const auto& e : field<json>(j, "elements")) c.elements.push_back(make_point_set(e.get<std::vector<PointId>>()));
  validate_cover(c);
  return c;
}

json complex_to_json(const UniformComplex& complex) {
  std::vector<VertexId> vertices(complex.vertex_count);
  for (VertexId v = 0; v < complex.vertex_count; ++v) vertices[v] = v;
  return {{"vertices", vertices}, {"facets", complex.facets}, {"dim", complex.dim()}};
}

UniformComplex complex_from_json(const json& j) {
  const auto vertices = field<std::vector<VertexId>>(j, "vertices");
  std::size_t count = 0;
  for (VertexId v : vertices) count = std::max<std::size_t>(count, std::size_t(v) + 1);
  return make_complex(count, field<std::vector<std::vector<VertexId>>>(j, "facets"));
}

json complex_map_to_json(const ComplexMap& map) {
  json values = json::object();
  for (std::size_t k = 0; k < map.domain.points.size(); ++k) {
    json coords = json::object();
    for (const auto& [v, w] : map.values[k].coords) coords[std::to_string(v)] = w;
    values[std::to_string(map.domain.points[k])] = coords;
  }
  return {{"complex", complex_to_json(map.complex)}, {"domain", subspace_to_json(map.domain)}, {"values", values}};
}

json feature_map_to_json(const FeatureMap& map) {
  json vectors = json::object();
  for (std::size_t k = 0; k < map.points.size(); ++k) vectors[std::to_string(map.points[k])] = map.vectors[k];
  return {{"dim", map.dim}, {"vectors", vectors}};
}

FeatureMap feature_map_from_json(const json& j) {
  FeatureMap m;
  m.dim = field<std::size_t>(j, "dim");
  std::vector<std::pair<PointId, std::vector<double>>> entries;
  const auto vectors = field<json>(j, "vectors");
  for (const auto& [key, vec] : vectors.items()) {
    std::size_t used = 0;
    unsigned long id = 0;
    try {
      id = std::stoul(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != key.size()) throw Error(ErrorCode::InvalidInput, "feature map key is not a point id: " + key);
    if (!vec.is_array()) throw Error(ErrorCode::InvalidInput, "feature vector must be an array", {{"point", key}});
    auto v = vec.get<std::vector<double>>();
    if (v.size() != m.dim) throw Error(ErrorCode::InvalidInput, "feature vector length differs from dim", {{"point", key}});
    entries.emplace_back(PointId(id), std::move(v));
  }
  std::sort(entries.begin(), entries.end());
  for (auto& [p, v] : entries) {
    m.points.push_back(p);
    m.vectors.push_back(std::move(v));
  }
  return m;
}

json doubling_to_json(const DoublingCertificate& cert) {
  json witnesses = json::array();
  for (const auto& w : cert.witnesses) {
    witnesses.push_back({{"center", w.center}, {"scale", w.scale}, {"balls", w.balls}});
  }
  SpaceRegistry reg;
  reg.add(cert.space);
  return {{"space", cert.space->id()}, {"subset", cert.subset},   {"intrinsic", cert.intrinsic},
          {"N", cert.N},               {"R", cert.R},             {"scales", cert.scales},
          {"witnesses", witnesses},    {"spaces", reg.to_json()}};
}

DoublingCertificate doubling_from_json(const json& j, const SpaceRegistry* outer) {
  const auto reg = registry_for(j, outer);
  DoublingCertificate c;
  c.space = reg.get(field<std::string>(j, "space"));
  c.subset = point_set_field(j, "subset");
  c.intrinsic = j.value("intrinsic", false);
  c.N = field<std::size_t>(j, "N");
  c.R = field<double>(j, "R");
  c.scales = field<std::vector<double>>(j, "scales");
  for (const auto& w : field<json>(j, "witnesses")) {
    c.witnesses.push_back(
        DoublingWitness{field<PointId>(w, "center"), field<double>(w, "scale"), point_set_field(w, "balls")});
  }
  return c;
}

json options_to_json(const DefendOptions& o) {
  json j = {{"n", o.n},
            {"diameter_bound", number_to_json(o.diameter_bound)},
            {"max_oracle_points", o.max_oracle_points},
            {"start_factor", o.start_factor},
            {"growth_factor", o.growth_factor}};
  if (o.scale_cap) j["scale_cap"] = *o.scale_cap;
  if (o.max_levels) j["max_levels"] = *o.max_levels;
  return j;
}

DefendOptions options_from_json(const json& j) {
  DefendOptions o;
  if (!j.is_object()) return o;
  o.n = j.value("n", o.n);
  if (j.contains("diameter_bound")) o.diameter_bound = number_from_json(j.at("diameter_bound"));
  o.max_oracle_points = j.value("max_oracle_points", o.max_oracle_points);
  o.start_factor = j.value("start_factor", o.start_factor);
  o.growth_factor = j.value("growth_factor", o.growth_factor);
  if (j.contains("scale_cap")) o.scale_cap = j.at("scale_cap").get<double>();
  if (j.contains("max_levels")) o.max_levels = j.at("max_levels").get<std::size_t>();
  if (!(o.growth_factor > 1.0) || !(o.start_factor > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "start_factor must be positive and growth_factor above 1");
  }
  return o;
}

json session_to_json(const GameSession& s) {
  SpaceRegistry reg;
  collect_spaces(s.initial, reg);
  json turns = json::array();
  for (const auto& t : s.turns) {
    turns.push_back({{"r", t.r},
                     {"n", t.certificate.n},
                     {"mesh", t.mesh},
                     {"part_count", t.certificate.target.members.size()},
                     {"certificate", certificate_to_json(t.certificate, false)}});
  }
  return {{"id", s.id},
          {"status", std::string(to_string(s.status))},
          {"reason", s.reason},
          {"bound", s.bound},
          {"strategy", std::string(to_string(s.strategy))},
          {"options", options_to_json(s.options)},
          {"max_turns", s.max_turns},
          {"turn_count", s.turns.size()},
          {"mesh", s.current_mesh()},
          {"part_count", s.current().members.size()},
          {"initial", family_to_json(s.initial)},
          {"turns", turns},
          {"spaces", reg.to_json()}};
}

GameSession session_from_json(const json& j) {
  const auto reg = registry_for(j, nullptr);
  GameSession s;
  s.id = field<std::uint64_t>(j, "id");
  s.status = parse_status(field<std::string>(j, "status"));
  s.reason = j.value("reason", std::string());
  s.bound = field<double>(j, "bound");
  s.strategy = parse_strategy(field<std::string>(j, "strategy"));
  s.options = options_from_json(j.value("options", json::object()));
  s.max_turns = field<std::size_t>(j, "max_turns");
  s.initial = family_from_json(field<json>(j, "initial"), reg);
  for (const auto& t : field<json>(j, "turns")) {
    GameTurn turn;
    turn.r = field<double>(t, "r");
    turn.certificate = certificate_from_json(field<json>(t, "certificate"), &reg);
    turn.mesh = field<double>(t, "mesh");
    s.turns.push_back(std::move(turn));
  }
  return s;
}

json error_to_json(const Error& e) {
  return {{"code", std::string(to_string(e.code()))}, {"message", e.what()}, {"details", e.details()}};
}

}  // namespace coarsekit
