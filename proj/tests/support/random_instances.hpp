#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "cmapf/graph.hpp"

namespace cmapf::testing {

using Rng = std::mt19937_64;

inline std::uint32_t uniform(Rng& rng, std::uint32_t lo, std::uint32_t hi) {
  return std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

/// Random graph with a connected movement spanning tree plus extra random
/// movement and communication edges.
inline std::shared_ptr<const TopologicalGraph> random_graph(Rng& rng, std::uint32_t n,
                                                            double extra_mvt = 0.15,
                                                            double comm_density = 0.35) {
  std::vector<Edge> mvt, comm;
  for (VertexId v = 1; v < n; ++v) mvt.emplace_back(uniform(rng, 0, v - 1), v);
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) {
      if (coin(rng, extra_mvt)) mvt.emplace_back(u, v);
      if (coin(rng, comm_density)) comm.emplace_back(u, v);
    }
  }
  return std::make_shared<const TopologicalGraph>(n, uniform(rng, 0, n - 1), mvt, comm);
}

/// Random sight-moveable graph: communication starts as the movement relation
/// (trivially sight-moveable) and random extra links are kept only when the
/// graph stays sight-moveable.
inline std::shared_ptr<const TopologicalGraph> random_sm_graph(Rng& rng, std::uint32_t n,
                                                               double extra_mvt = 0.1,
                                                               int extra_comm_tries = 12) {
  std::vector<Edge> mvt;
  for (VertexId v = 1; v < n; ++v) mvt.emplace_back(uniform(rng, 0, v - 1), v);
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) {
      if (coin(rng, extra_mvt)) mvt.emplace_back(u, v);
    }
  }
  std::vector<Edge> comm = mvt;
  const VertexId base = uniform(rng, 0, n - 1);
  for (int i = 0; i < extra_comm_tries; ++i) {
    const VertexId u = uniform(rng, 0, n - 1), v = uniform(rng, 0, n - 1);
    if (u == v) continue;
    comm.emplace_back(u, v);
    if (!is_sight_moveable(TopologicalGraph(n, base, mvt, comm)).sight_moveable) comm.pop_back();
  }
  return std::make_shared<const TopologicalGraph>(n, base, mvt, comm);
}

/// Uniform connected configuration by rejection; nullopt after `tries` draws.
inline std::optional<Configuration> random_connected_config(Rng& rng, const TopologicalGraph& g,
                                                            std::size_t k, int tries = 2000) {
  Configuration c(k);
  for (int i = 0; i < tries; ++i) {
    for (auto& v : c) v = uniform(rng, 0, g.vertex_count() - 1);
    if (is_connected(g, c)) return c;
  }
  return std::nullopt;
}

inline std::optional<Instance> random_instance(Rng& rng, std::uint32_t n, std::size_t k) {
  auto g = random_graph(rng, n);
  auto s = random_connected_config(rng, *g, k);
  auto t = random_connected_config(rng, *g, k);
  if (!s || !t) return std::nullopt;
  return Instance{g, *s, *t};
}

}  // namespace cmapf::testing
