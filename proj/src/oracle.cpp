#include "cmapf/oracle.hpp"

#include <algorithm>
#include <unordered_map>

namespace cmapf {

const char* to_string(OracleStatus status) {
  switch (status) {
    case OracleStatus::solved: return "solved";
    case OracleStatus::unsolvable: return "unsolvable";
    case OracleStatus::step_bound: return "step_bound";
    case OracleStatus::refused: return "refused";
  }
  return "?";
}

bool oracle_fits(const Instance& instance) {
  const std::uint64_t n = instance.graph->vertex_count();
  std::uint64_t states = 1;
  for (std::size_t a = 0; a < instance.agent_count(); ++a) {
    states *= n;
    if (states > kOracleStateBudget) return false;
  }
  return true;
}

OracleResult oracle_solve(const Instance& instance, std::uint32_t max_steps) {
  OracleResult result;
  if (!oracle_fits(instance)) return result;
  require_valid_instance(instance);

  const TopologicalGraph& graph = *instance.graph;
  const std::size_t k = instance.agent_count();
  const std::uint64_t n = graph.vertex_count();

  auto encode = [&](const Configuration& c) {
    std::uint64_t code = 0;
    for (std::size_t a = k; a-- > 0;) code = code * n + c[a];
    return code;
  };
  auto decode = [&](std::uint64_t code) {
    Configuration c(k);
    for (std::size_t a = 0; a < k; ++a) {
      c[a] = static_cast<VertexId>(code % n);
      code /= n;
    }
    return c;
  };

  const std::uint64_t start = encode(instance.start);
  const std::uint64_t goal = encode(instance.goal);
  constexpr std::uint64_t kRoot = ~std::uint64_t{0};
  std::unordered_map<std::uint64_t, std::uint64_t> parent{{start, kRoot}};

  std::vector<std::uint64_t> layer{start};
  std::uint32_t depth = 0;
  bool found = start == goal;
  while (!found && !layer.empty()) {
    if (depth == max_steps) {
      result.status = OracleStatus::step_bound;
      result.states_visited = parent.size();
      return result;
    }
    std::vector<std::uint64_t> next_layer;
    for (std::uint64_t code : layer) {
      const Configuration from = decode(code);
      // Odometer over the cartesian product of movement neighbourhoods.
      std::vector<std::size_t> choice(k, 0);
      Configuration to(k);
      while (true) {
        for (std::size_t a = 0; a < k; ++a) to[a] = graph.movement_neighbors(from[a])[choice[a]];
        if (is_connected(graph, to)) {
          const std::uint64_t next = encode(to);
          if (parent.try_emplace(next, code).second) {
            next_layer.push_back(next);
            if (next == goal) found = true;
          }
        }
        std::size_t a = 0;
        while (a < k && ++choice[a] == graph.movement_neighbors(from[a]).size()) {
          choice[a] = 0;
          ++a;
        }
        if (a == k) break;
      }
    }
    layer = std::move(next_layer);
    ++depth;
  }
  result.states_visited = parent.size();
  if (!found) {
    result.status = OracleStatus::unsolvable;
    return result;
  }

  std::vector<Configuration> configs;
  for (std::uint64_t code = goal; code != kRoot; code = parent.at(code)) {
    configs.push_back(decode(code));
  }
  std::reverse(configs.begin(), configs.end());
  std::vector<Path> paths(k);
  for (const auto& c : configs) {
    for (std::size_t a = 0; a < k; ++a) paths[a].push_back(c[a]);
  }
  result.status = OracleStatus::solved;
  result.cost = static_cast<std::uint32_t>(configs.size() - 1);
  result.witness = Execution(std::move(paths));
  return result;
}

}  // namespace cmapf
