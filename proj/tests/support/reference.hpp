#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "cmapf/graph.hpp"
#include "cmapf/low_level.hpp"

namespace cmapf::testing {

/// Feasibility of standing at `v` at step `t` for an agent with `c`.
inline bool allowed(const AgentConstraints& c, VertexId v, TimeStep t) {
  if (c.forbids(v, t)) return false;
  const auto landmark = c.landmark_at(t);
  return !landmark || *landmark == v;
}

/// Length (number of steps) of the shortest constraint-satisfying path, by a
/// layered reachability sweep over (time, vertex). A path of length L is
/// accepted when the agent can idle at the goal from L on. The horizon
/// last_time + |V| suffices: after the last constraint every reachable vertex
/// reaches the goal within |V| - 1 unconstrained steps.
inline std::optional<std::uint32_t> reference_shortest_length(const TopologicalGraph& g,
                                                              VertexId start, VertexId goal,
                                                              const AgentConstraints& c) {
  const TimeStep last = c.last_time();
  const TimeStep horizon = last + g.vertex_count() + 1;
  auto idle_ok = [&](TimeStep from) {
    for (TimeStep t = from; t <= last; ++t) {
      if (!allowed(c, goal, t)) return false;
    }
    return true;
  };
  std::vector<char> reach(g.vertex_count(), 0), next(g.vertex_count(), 0);
  if (!allowed(c, start, 0)) return std::nullopt;
  reach[start] = 1;
  for (TimeStep t = 0; t <= horizon; ++t) {
    if (reach[goal] && idle_ok(t)) return t;
    std::fill(next.begin(), next.end(), 0);
    bool any = false;
    for (VertexId u = 0; u < g.vertex_count(); ++u) {
      if (!reach[u]) continue;
      for (VertexId v : g.movement_neighbors(u)) {
        if (allowed(c, v, t + 1)) {
          next[v] = 1;
          any = true;
        }
      }
    }
    if (!any) return std::nullopt;
    reach.swap(next);
  }
  return std::nullopt;
}

/// Brute-force enumeration of every walk of up to `max_len` steps; returns the
/// shortest accepted length. Exponential: tiny graphs only.
inline std::optional<std::uint32_t> enumerate_shortest_length(const TopologicalGraph& g,
                                                              VertexId start, VertexId goal,
                                                              const AgentConstraints& c,
                                                              std::uint32_t max_len) {
  std::optional<std::uint32_t> best;
  Path walk{start};
  auto accepted = [&](const Path& p) {
    if (p.back() != goal) return false;
    const TimeStep until = std::max<TimeStep>(c.last_time(), static_cast<TimeStep>(p.size()));
    for (TimeStep t = 0; t <= until; ++t) {
      if (!allowed(c, t < p.size() ? p[t] : goal, t)) return false;
    }
    return true;
  };
  auto dfs = [&](auto&& self) -> void {
    const auto len = static_cast<std::uint32_t>(walk.size() - 1);
    if (best && len >= *best) return;
    if (accepted(walk)) {
      best = len;
      return;
    }
    if (len == max_len) return;
    for (VertexId v : g.movement_neighbors(walk.back())) {
      walk.push_back(v);
      self(self);
      walk.pop_back();
    }
  };
  dfs(dfs);
  return best;
}

}  // namespace cmapf::testing
