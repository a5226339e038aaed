#pragma once

#include <memory>
#include <vector>

#include "cmapf/graph.hpp"

namespace cmapf::fixtures {

// Seven-vertex example: B = 0, v1..v6 = 1..6. Not sight-moveable.
inline std::shared_ptr<const TopologicalGraph> example_graph() {
  const std::vector<Edge> mvt{{1, 2}, {2, 3}, {1, 4}, {4, 5}, {5, 6}};
  const std::vector<Edge> comm{{0, 4}, {0, 5}, {0, 6}, {4, 1}, {4, 2}, {6, 3}, {5, 3}};
  return std::make_shared<const TopologicalGraph>(7, 0, mvt, comm);
}

inline Instance example_instance() { return {example_graph(), {1, 4}, {3, 6}}; }

// Eight-vertex sight-moveable graph: B = 0, q1..q7 = 1..7.
inline std::shared_ptr<const TopologicalGraph> counterexample_graph() {
  const std::vector<Edge> mvt{{0, 1}, {1, 2}, {2, 3}, {0, 4}, {4, 5}, {5, 6},
                              {6, 0}, {4, 7}, {7, 5}, {7, 3}, {2, 6}};
  const std::vector<Edge> comm{{0, 1}, {0, 4}, {0, 5}, {0, 6}, {2, 6}, {3, 5},
                               {3, 4}, {5, 6}, {4, 5}, {7, 4}, {7, 3}, {7, 5}};
  return std::make_shared<const TopologicalGraph>(8, 0, mvt, comm);
}

inline Instance counterexample_instance() { return {counterexample_graph(), {4, 3}, {0, 0}}; }

}  // namespace cmapf::fixtures
