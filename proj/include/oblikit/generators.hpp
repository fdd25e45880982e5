#pragma once

#include <cstdint>
#include <random>

#include "oblikit/graph.hpp"

namespace oblikit {

enum class WeightRule { Unit, Random };

// Uniform integer in [lo, hi]; spelled out so seeded output does not depend
// on the standard library's distribution implementation.
inline std::int64_t draw(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

// rows x cols grid, node id r*cols + c. Random weights are drawn from [1,10].
// The outer face is the boundary cycle starting at node 0.
WeightedPlanarGraph gen_grid(int rows, int cols, WeightRule rule = WeightRule::Unit, std::uint64_t seed = 0);

// Maximal planar graph by repeated face splitting from the triangle 0,1,2,
// which stays the outer face. Weights are drawn from [1,10].
WeightedPlanarGraph gen_triangulated(int n, std::uint64_t seed);

// Small families used by tests and the oracle corpus. All unit weighted
// unless a seed is given; every node lies on the outer face except for the star.
WeightedPlanarGraph gen_path(int n);
WeightedPlanarGraph gen_cycle(int n);
WeightedPlanarGraph gen_star(int leaves);
// Polygon 0..n-1 with a fan of chords from node 0 (outerplanar).
WeightedPlanarGraph gen_fan(int n, std::uint64_t seed);

}  // namespace oblikit
