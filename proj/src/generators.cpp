#include "oblikit/generators.hpp"

#include <array>
#include <stdexcept>
#include <vector>

namespace oblikit {

WeightedPlanarGraph gen_grid(int rows, int cols, WeightRule rule, std::uint64_t seed) {
  if (rows < 2 || cols < 2) throw std::invalid_argument("grid needs rows, cols >= 2");
  std::mt19937_64 rng(seed);
  auto weight = [&]() -> Weight { return rule == WeightRule::Unit ? 1 : draw(rng, 1, 10); };
  auto id = [cols](int r, int c) { return static_cast<NodeId>(r * cols + c); };

  std::vector<Edge> edges;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1), weight()});
      if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c), weight()});
    }
  }
  std::vector<NodeId> outer;
  for (int c = 0; c < cols; ++c) outer.push_back(id(0, c));
  for (int r = 1; r < rows; ++r) outer.push_back(id(r, cols - 1));
  for (int c = cols - 2; c >= 0; --c) outer.push_back(id(rows - 1, c));
  for (int r = rows - 2; r >= 1; --r) outer.push_back(id(r, 0));
  return WeightedPlanarGraph(static_cast<NodeId>(rows * cols), std::move(edges), std::move(outer));
}

WeightedPlanarGraph gen_triangulated(int n, std::uint64_t seed) {
  if (n < 3) throw std::invalid_argument("triangulation needs n >= 3");
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges{{0, 1, draw(rng, 1, 10)}, {1, 2, draw(rng, 1, 10)}, {0, 2, draw(rng, 1, 10)}};
  std::vector<std::array<NodeId, 3>> faces{{0, 1, 2}};
  for (NodeId v = 3; v < n; ++v) {
    auto f = static_cast<std::size_t>(draw(rng, 0, static_cast<std::int64_t>(faces.size()) - 1));
    auto [a, b, c] = faces[f];
    for (NodeId corner : {a, b, c}) edges.push_back({corner, v, draw(rng, 1, 10)});
    faces[f] = {a, b, v};
    faces.push_back({b, c, v});
    faces.push_back({a, c, v});
  }
  return WeightedPlanarGraph(static_cast<NodeId>(n), std::move(edges), {0, 1, 2});
}

WeightedPlanarGraph gen_path(int n) {
  if (n < 1) throw std::invalid_argument("path needs n >= 1");
  std::vector<Edge> edges;
  for (NodeId v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1, 1});
  std::vector<NodeId> outer;
  for (NodeId v = 0; v < n; ++v) outer.push_back(v);
  return WeightedPlanarGraph(static_cast<NodeId>(n), std::move(edges), std::move(outer));
}

WeightedPlanarGraph gen_cycle(int n) {
  if (n < 3) throw std::invalid_argument("cycle needs n >= 3");
  std::vector<Edge> edges;
  std::vector<NodeId> outer;
  for (NodeId v = 0; v < n; ++v) {
    edges.push_back({v, static_cast<NodeId>((v + 1) % n), 1});
    outer.push_back(v);
  }
  return WeightedPlanarGraph(static_cast<NodeId>(n), std::move(edges), std::move(outer));
}

WeightedPlanarGraph gen_star(int leaves) {
  if (leaves < 1) throw std::invalid_argument("star needs at least one leaf");
  std::vector<Edge> edges;
  std::vector<NodeId> outer;
  for (NodeId v = 1; v <= leaves; ++v) {
    edges.push_back({0, v, 1});
    outer.push_back(v);
  }
  return WeightedPlanarGraph(static_cast<NodeId>(leaves + 1), std::move(edges), std::move(outer));
}

WeightedPlanarGraph gen_fan(int n, std::uint64_t seed) {
  if (n < 3) throw std::invalid_argument("fan needs n >= 3");
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  std::vector<NodeId> outer;
  for (NodeId v = 0; v < n; ++v) {
    edges.push_back({v, static_cast<NodeId>((v + 1) % n), draw(rng, 1, 10)});
    outer.push_back(v);
  }
  for (NodeId v = 2; v + 1 < n; ++v) edges.push_back({0, v, draw(rng, 1, 10)});
  return WeightedPlanarGraph(static_cast<NodeId>(n), std::move(edges), std::move(outer));
}

}  // namespace oblikit
