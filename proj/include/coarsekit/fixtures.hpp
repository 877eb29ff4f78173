#pragma once

#include <random>
#include <string>
#include <vector>

#include "coarsekit/metric_space.hpp"

namespace coarsekit::fixtures {

// {0, 1, ..., n-1} with spacing 1 (or `spacing`) as a one-dimensional grid.
SpacePtr line(std::size_t n, std::string id = {}, double spacing = 1.0);
SpacePtr grid(std::size_t rows, std::size_t cols, std::string id = {}, double spacing = 1.0, Norm norm = Norm::L1);

// All tuples in {0, 1}^k with d(x, y) = sum_i i |x_i - y_i|.
SpacePtr weighted_cube(std::size_t k, std::string id = {});

// Complete binary tree of the given depth, unit edges, geodesic metric.
SpacePtr binary_tree(std::size_t depth, std::string id = {});

// Shortest-path closure of a random complete graph with integer weights in
// [1, max_weight]: an integral metric matrix.
SpacePtr random_metric(std::size_t n, std::mt19937_64& rng, int max_weight = 6, std::string id = {});

SpacePtr random_cloud(std::size_t n, std::size_t dim, std::mt19937_64& rng, Norm norm = Norm::L2,
                      std::string id = {});

// Named fixtures bundled with the CLI and the game service.
std::vector<std::string> names();
bool has(const std::string& name);
SpacePtr load(const std::string& name);

}  // namespace coarsekit::fixtures
