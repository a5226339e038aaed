#include <algorithm>
#include <deque>
#include <limits>

#include "cmapf/graph.hpp"

namespace cmapf {

namespace {

constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

// Hop distances to `to` over vertices that communicate with `to`.
std::vector<std::uint32_t> sight_distances(const TopologicalGraph& graph, VertexId to) {
  std::vector<std::uint32_t> dist(graph.vertex_count(), kUnreached);
  std::deque<VertexId> queue{to};
  dist[to] = 0;
  while (!queue.empty()) {
    const VertexId u = queue.front();
    queue.pop_front();
    for (VertexId w : graph.movement_neighbors(u)) {
      if (dist[w] != kUnreached || !graph.communicates(w, to)) continue;
      dist[w] = dist[u] + 1;
      queue.push_back(w);
    }
  }
  return dist;
}

bool has_sight_path(const TopologicalGraph& graph, VertexId from, VertexId to,
                    std::vector<std::uint32_t>& scratch) {
  // Forward search from `from`; only vertices seeing `to` may be entered.
  std::fill(scratch.begin(), scratch.end(), kUnreached);
  std::deque<VertexId> queue{from};
  scratch[from] = 0;
  while (!queue.empty()) {
    const VertexId u = queue.front();
    queue.pop_front();
    for (VertexId w : graph.movement_neighbors(u)) {
      if (w == to) return true;
      if (scratch[w] != kUnreached || !graph.communicates(w, to)) continue;
      scratch[w] = 0;
      queue.push_back(w);
    }
  }
  return false;
}

}  // namespace

std::optional<Path> sight_path(const TopologicalGraph& graph, VertexId from, VertexId to) {
  if (from == to) return Path{from};
  if (!graph.communicates(from, to)) return std::nullopt;
  const auto dist = sight_distances(graph, to);
  if (dist[from] == kUnreached) return std::nullopt;
  Path path{from};
  VertexId cur = from;
  while (cur != to) {
    for (VertexId w : graph.movement_neighbors(cur)) {  // ascending ids
      if (dist[w] != kUnreached && dist[w] + 1 == dist[cur]) {
        cur = w;
        break;
      }
    }
    path.push_back(cur);
  }
  return path;
}

std::vector<Edge> sight_moveable_violations(const TopologicalGraph& graph) {
  std::vector<Edge> out;
  std::vector<std::uint32_t> scratch(graph.vertex_count());
  for (VertexId v = 0; v < graph.vertex_count(); ++v) {
    for (VertexId target : graph.comm_neighbors(v)) {
      if (!has_sight_path(graph, v, target, scratch)) out.emplace_back(v, target);
    }
  }
  return out;
}

SightMoveableReport is_sight_moveable(const TopologicalGraph& graph) {
  std::vector<std::uint32_t> scratch(graph.vertex_count());
  for (VertexId v = 0; v < graph.vertex_count(); ++v) {
    for (VertexId target : graph.comm_neighbors(v)) {
      if (!has_sight_path(graph, v, target, scratch)) {
        return {false, Edge{v, target}};
      }
    }
  }
  return {};
}

SmPlan sm_construct_execution(const TopologicalGraph& graph, std::span<const VertexId> goal) {
  SmPlan plan;
  if (goal.empty()) {
    plan.error = "goal configuration is empty";
    return plan;
  }
  for (VertexId v : goal) {
    if (!graph.contains(v)) {
      plan.error = "goal vertex " + std::to_string(v) + " is not in the graph";
      return plan;
    }
  }
  if (!is_connected(graph, goal)) {
    plan.error = "goal configuration is disconnected";
    return plan;
  }

  // Tree nodes: the base plus the distinct goal vertices, ascending.
  std::vector<VertexId> nodes(goal.begin(), goal.end());
  nodes.push_back(graph.base());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  auto index_of = [&](VertexId v) {
    return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), v) -
                                    nodes.begin());
  };

  const std::size_t root = index_of(graph.base());
  std::vector<std::size_t> parent(nodes.size(), nodes.size());
  std::vector<std::size_t> order{root};
  parent[root] = root;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const VertexId u = nodes[order[head]];
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (parent[i] == nodes.size() && graph.communicates(u, nodes[i])) {
        parent[i] = order[head];
        order.push_back(i);
      }
    }
  }

  // in_subtree[a][i]: goal of agent a lies in the subtree rooted at node i.
  const std::size_t k = goal.size();
  std::vector<std::vector<char>> in_subtree(k, std::vector<char>(nodes.size(), 0));
  for (std::size_t a = 0; a < k; ++a) {
    std::size_t i = index_of(goal[a]);
    while (true) {
      in_subtree[a][i] = 1;
      if (i == root) break;
      i = parent[i];
    }
  }

  std::vector<Path> paths(k, Path{graph.base()});
  Configuration cur(k, graph.base());
  for (std::size_t step = 1; step < order.size(); ++step) {
    const std::size_t child = order[step];
    const VertexId from = nodes[parent[child]];
    const VertexId to = nodes[child];
    // Reversed witness: starts at the parent, every later vertex sees it.
    auto witness = sight_path(graph, to, from);
    if (!witness) {
      plan.error = "graph is not sight-moveable: no sight path from " + std::to_string(to) +
                   " to " + std::to_string(from);
      return plan;
    }
    std::reverse(witness->begin(), witness->end());
    for (std::size_t i = 1; i < witness->size(); ++i) {
      for (std::size_t a = 0; a < k; ++a) {
        if (in_subtree[a][child]) cur[a] = (*witness)[i];
        paths[a].push_back(cur[a]);
      }
    }
  }

  Execution exec(std::move(paths));
  for (std::size_t a = 0; a < k; ++a) {
    if (exec.path(a).back() != goal[a]) {
      plan.error = "internal error: agent did not reach its goal";
      return plan;
    }
  }
  if (!is_connected_execution(graph, exec)) {
    plan.error = "constructed execution is disconnected; graph is not sight-moveable";
    return plan;
  }
  plan.execution = std::move(exec);
  return plan;
}

}  // namespace cmapf
