#include "cmapf/astar_od.hpp"

#include <algorithm>
#include <queue>
#include <unordered_map>

#include "cmapf/low_level.hpp"

namespace cmapf {

namespace {

struct StateKeyHash {
  std::size_t operator()(const std::vector<VertexId>& key) const noexcept {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL;
    for (VertexId v : key) {
      h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

struct State {
  std::uint32_t parent;
  std::uint32_t depth;
  std::uint32_t mover;
  std::uint32_t offset;  // into the position pool
};

// Lower f first, then more committed moves, then FIFO.
struct OpenEntry {
  std::uint32_t f;
  std::uint64_t moves;
  std::uint64_t ordinal;
  std::uint32_t state;
  bool operator>(const OpenEntry& o) const {
    if (f != o.f) return f > o.f;
    if (moves != o.moves) return moves < o.moves;
    return ordinal > o.ordinal;
  }
};

constexpr std::uint32_t kNone = 0xFFFFFFFFu;

}  // namespace

Solution astar_od_solve(const Instance& instance, const SearchLimits& limits) {
  require_valid_instance(instance);
  const auto started = std::chrono::steady_clock::now();
  const TopologicalGraph& graph = *instance.graph;
  const std::size_t k = instance.agent_count();

  Solution result;
  auto finish = [&](Outcome outcome) {
    result.outcome = outcome;
    result.stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
            .count();
    return result;
  };

  std::vector<std::vector<std::uint32_t>> dist;
  dist.reserve(k);
  for (std::size_t a = 0; a < k; ++a) dist.push_back(bfs_distances(graph, instance.goal[a]));
  for (std::size_t a = 0; a < k; ++a) {
    if (dist[a][instance.start[a]] == DistanceCache::unreachable) return finish(Outcome::exhausted);
  }

  std::vector<State> states;
  std::vector<VertexId> pool;
  std::unordered_map<std::vector<VertexId>, std::uint32_t, StateKeyHash> best_depth;
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;
  std::uint64_t ordinal = 0;

  auto estimate = [&](const VertexId* pos, std::uint32_t depth, std::uint32_t mover) {
    std::uint32_t f = depth + (mover > 0 ? 1 : 0);
    for (std::size_t a = 0; a < k; ++a) {
      const std::uint32_t t = depth + (a < mover ? 1 : 0);
      f = std::max(f, t + dist[a][pos[a]]);
    }
    return f;
  };

  std::vector<VertexId> key(k + 1);
  auto push = [&](const VertexId* pos, std::uint32_t parent, std::uint32_t depth,
                  std::uint32_t mover) {
    std::copy(pos, pos + k, key.begin());
    key[k] = mover;
    auto [it, inserted] = best_depth.try_emplace(key, depth);
    if (!inserted) {
      if (it->second <= depth) return;
      it->second = depth;
    }
    const auto id = static_cast<std::uint32_t>(states.size());
    states.push_back({parent, depth, mover, static_cast<std::uint32_t>(pool.size())});
    pool.insert(pool.end(), pos, pos + k);
    const std::uint64_t moves = static_cast<std::uint64_t>(depth) * k + mover;
    open.push({estimate(pos, depth, mover), moves, ordinal++, id});
    ++result.stats.nodes_generated;
  };

  push(instance.start.data(), kNone, 0, 0);
  std::vector<VertexId> next(k);
  while (!open.empty()) {
    if (limits.node_limit && result.stats.nodes_generated >= *limits.node_limit) {
      return finish(Outcome::limit_reached);
    }
    if (limits.time_limit && (result.stats.nodes_expanded & 0x3FF) == 0 &&
        std::chrono::steady_clock::now() - started >= *limits.time_limit) {
      return finish(Outcome::limit_reached);
    }
    const OpenEntry top = open.top();
    open.pop();
    const State s = states[top.state];
    const VertexId* pos = pool.data() + s.offset;
    // Skip stale entries superseded by a shallower copy of the same state.
    std::copy(pos, pos + k, key.begin());
    key[k] = s.mover;
    if (best_depth[key] < s.depth) continue;
    if (s.mover == 0) {
      if (std::equal(pos, pos + k, instance.goal.begin())) {
        std::vector<Path> paths(k);
        for (std::uint32_t i = top.state; i != kNone; i = states[i].parent) {
          if (states[i].mover != 0) continue;
          const VertexId* p = pool.data() + states[i].offset;
          for (std::size_t a = 0; a < k; ++a) paths[a].push_back(p[a]);
        }
        for (auto& p : paths) std::reverse(p.begin(), p.end());
        result.execution = Execution(std::move(paths));
        result.cost = s.depth;
        return finish(Outcome::solved);
      }
    }
    ++result.stats.nodes_expanded;
    std::copy(pos, pos + k, next.begin());
    const VertexId here = next[s.mover];
    const bool completes = s.mover + 1 == k;
    // `pool` may reallocate inside push, so neighbours are read from `next`.
    for (VertexId w : graph.movement_neighbors(here)) {
      next[s.mover] = w;
      if (completes) {
        if (!is_connected(graph, next)) continue;
        push(next.data(), top.state, s.depth + 1, 0);
      } else {
        push(next.data(), top.state, s.depth, s.mover + 1);
      }
    }
  }
  return finish(Outcome::exhausted);
}

}  // namespace cmapf
