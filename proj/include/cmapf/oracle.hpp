#pragma once

#include <cstdint>
#include <optional>

#include "cmapf/graph.hpp"

namespace cmapf {

/// Largest joint state space (|V|^k) the oracle agrees to enumerate.
inline constexpr std::uint64_t kOracleStateBudget = 10'000'000;

enum class OracleStatus {
  solved,
  unsolvable,        // every reachable connected configuration was visited
  step_bound,        // no solution within max_steps
  refused,           // |V|^k exceeds the state budget
};

const char* to_string(OracleStatus status);

struct OracleResult {
  OracleStatus status = OracleStatus::refused;
  std::uint32_t cost = 0;
  std::optional<Execution> witness;
  std::uint64_t states_visited = 0;
};

/// Breadth-first search over connected joint configurations, all agents moving
/// simultaneously. Exact minimum makespan on small instances.
OracleResult oracle_solve(const Instance& instance, std::uint32_t max_steps = 0xFFFFFFFFu);

/// True when oracle_solve would accept the instance.
bool oracle_fits(const Instance& instance);

}  // namespace cmapf
