#include "coarsekit/fixtures.hpp"

#include <functional>
#include <map>

namespace coarsekit::fixtures {

SpacePtr line(std::size_t n, std::string id, double spacing) {
  if (id.empty()) id = "line" + std::to_string(n);
  return build_space(SpaceSource{id, "integer segment", GridSource{{n}, Norm::L1, spacing}});
}

SpacePtr grid(std::size_t rows, std::size_t cols, std::string id, double spacing, Norm norm) {
  if (id.empty()) id = "grid" + std::to_string(rows) + "x" + std::to_string(cols);
  return build_space(SpaceSource{id, "integer grid", GridSource{{rows, cols}, norm, spacing}});
}

SpacePtr weighted_cube(std::size_t k, std::string id) {
  if (id.empty()) id = "cube" + std::to_string(k);
  WeightedL1Source src;
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    std::vector<double> t(k);
    for (std::size_t i = 0; i < k; ++i) t[i] = double((mask >> (k - 1 - i)) & 1U);
    src.tuples.push_back(std::move(t));
  }
  return build_space(SpaceSource{id, "weighted l1 cube", std::move(src)});
}

SpacePtr binary_tree(std::size_t depth, std::string id) {
  if (id.empty()) id = "tree" + std::to_string(depth);
  GraphSource g;
  g.vertices = (std::size_t{1} << (depth + 1)) - 1;
  for (std::size_t v = 1; v < g.vertices; ++v) g.edges.push_back({PointId((v - 1) / 2), PointId(v), 1.0});
  return build_space(SpaceSource{id, "binary tree", std::move(g)});
}

SpacePtr random_metric(std::size_t n, std::mt19937_64& rng, int max_weight, std::string id) {
  if (id.empty()) id = "random" + std::to_string(n);
  std::uniform_int_distribution<int> w(1, max_weight);
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) m[i][j] = m[j][i] = w(rng);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) m[i][j] = std::min(m[i][j], m[i][k] + m[k][j]);
    }
  }
  return build_space(SpaceSource{id, "random metric", MatrixSource{std::move(m)}});
}

SpacePtr random_cloud(std::size_t n, std::size_t dim, std::mt19937_64& rng, Norm norm, std::string id) {
  if (id.empty()) id = "cloud" + std::to_string(n);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  PointCloudSource src;
  src.norm = norm;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> c(dim);
    for (auto& x : c) x = u(rng);
    src.coords.push_back(std::move(c));
  }
  return build_space(SpaceSource{id, "random point cloud", std::move(src)});
}

namespace {

const std::map<std::string, std::function<SpacePtr()>>& registry() {
  static const std::map<std::string, std::function<SpacePtr()>> table = {
      {"singleton", [] { return line(1, "singleton"); }},
      {"line8", [] { return line(8); }},
      {"line10", [] { return line(10); }},
      {"line21", [] { return line(21); }},
      {"line30", [] { return line(30); }},
      {"line31", [] { return line(31); }},
      {"line40", [] { return line(40); }},
      {"line64", [] { return line(64); }},
      {"line100", [] { return line(101, "line100"); }},
      {"line40x10", [] { return line(40, "line40x10", 10.0); }},
      {"grid5", [] { return grid(5, 5, "grid5"); }},
      {"grid8", [] { return grid(8, 8, "grid8"); }},
      {"grid16", [] { return grid(16, 16, "grid16"); }},
      {"grid8x50", [] { return grid(8, 8, "grid8x50", 50.0); }},
      {"cube3", [] { return weighted_cube(3, "cube3"); }},
      {"tree4", [] { return binary_tree(4, "tree4"); }},
  };
  return table;
}

}  // namespace

std::vector<std::string> names() {
  std::vector<std::string> out;
  for (const auto& [name, _] : registry()) out.push_back(name);
  return out;
}

bool has(const std::string& name) { return registry().count(name) != 0; }

SpacePtr load(const std::string& name) {
  auto it = registry().find(name);
  if (it == registry().end()) throw Error(ErrorCode::InvalidInput, "unknown fixture '" + name + "'");
  return it->second();
}

}  // namespace coarsekit::fixtures
