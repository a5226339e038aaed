#pragma once

#include <chrono>
#include <cstdint>
#include <optional>

#include "cmapf/ccbs.hpp"
#include "cmapf/graph.hpp"

namespace cmapf {

struct SearchLimits {
  std::optional<std::uint64_t> node_limit;
  std::optional<std::chrono::milliseconds> time_limit;
};

/// A* over the joint configuration space with operator decomposition: each
/// expansion commits the move of a single agent, and connectivity is checked
/// only once all agents have moved (full states).
///
/// Heuristic: max over agents of the BFS distance to the agent's goal, shifted
/// by one for agents that already moved in the current step. Ties at equal f
/// prefer deeper states.
Solution astar_od_solve(const Instance& instance, const SearchLimits& limits = {});

}  // namespace cmapf
