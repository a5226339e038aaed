#include "cmapf/low_level.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <queue>
#include <tuple>
#include <unordered_set>

namespace cmapf {

AddResult AgentConstraints::add(VertexId vertex, TimeStep time, Sign sign) {
  const Landmark item{time, vertex};
  if (sign == Sign::positive) {
    auto it = std::lower_bound(positives_.begin(), positives_.end(), Landmark{time, 0});
    if (it != positives_.end() && it->time == time) {
      return it->vertex == vertex ? AddResult::duplicate : AddResult::contradictory;
    }
    if (std::binary_search(negatives_.begin(), negatives_.end(), item)) {
      return AddResult::contradictory;
    }
    positives_.insert(it, item);
    return AddResult::added;
  }
  auto it = std::lower_bound(negatives_.begin(), negatives_.end(), item);
  if (it != negatives_.end() && *it == item) return AddResult::duplicate;
  if (landmark_at(time) == vertex) return AddResult::contradictory;
  negatives_.insert(it, item);
  return AddResult::added;
}

bool AgentConstraints::contains(VertexId vertex, TimeStep time, Sign sign) const {
  const Landmark item{time, vertex};
  const auto& list = sign == Sign::positive ? positives_ : negatives_;
  return std::binary_search(list.begin(), list.end(), item);
}

bool AgentConstraints::forbids(VertexId vertex, TimeStep time) const {
  return std::binary_search(negatives_.begin(), negatives_.end(), Landmark{time, vertex});
}

std::optional<VertexId> AgentConstraints::landmark_at(TimeStep time) const {
  auto it = std::lower_bound(positives_.begin(), positives_.end(), Landmark{time, 0});
  if (it != positives_.end() && it->time == time) return it->vertex;
  return std::nullopt;
}

TimeStep AgentConstraints::last_time() const {
  TimeStep t = 0;
  if (!positives_.empty()) t = std::max(t, positives_.back().time);
  if (!negatives_.empty()) t = std::max(t, negatives_.back().time);
  return t;
}

std::optional<TimeStep> AgentConstraints::last_forbidden(VertexId vertex) const {
  for (auto it = negatives_.rbegin(); it != negatives_.rend(); ++it) {
    if (it->vertex == vertex) return it->time;
  }
  return std::nullopt;
}

AddResult ConstraintSet::add(const Constraint& c) {
  return per_agent_.at(c.agent).add(c.vertex, c.time, c.sign);
}

std::size_t ConstraintSet::size() const {
  std::size_t n = 0;
  for (const auto& a : per_agent_) n += a.size();
  return n;
}

bool satisfies(const Path& path, const AgentConstraints& constraints) {
  if (path.empty()) return false;
  for (const auto& lm : constraints.landmarks()) {
    if (position_at(path, lm.time) != lm.vertex) return false;
  }
  for (const auto& ng : constraints.forbidden()) {
    if (position_at(path, ng.time) == ng.vertex) return false;
  }
  return true;
}

bool satisfies(const Execution& exec, const ConstraintSet& constraints) {
  if (exec.agent_count() != constraints.agent_count()) return false;
  for (AgentId a = 0; a < exec.agent_count(); ++a) {
    if (!satisfies(exec.path(a), constraints.for_agent(a))) return false;
  }
  return true;
}

std::vector<std::uint32_t> bfs_distances(const TopologicalGraph& graph, VertexId target) {
  std::vector<std::uint32_t> dist(graph.vertex_count(), DistanceCache::unreachable);
  std::deque<VertexId> queue{target};
  dist[target] = 0;
  while (!queue.empty()) {
    const VertexId u = queue.front();
    queue.pop_front();
    for (VertexId w : graph.movement_neighbors(u)) {
      if (dist[w] == DistanceCache::unreachable) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

std::shared_ptr<const DistanceCache::Table> DistanceCache::to(VertexId target) {
  {
    std::shared_lock lock(mutex_);
    auto it = tables_.find(target);
    if (it != tables_.end()) return it->second;
  }
  auto table = std::make_shared<const Table>(bfs_distances(*graph_, target));
  std::unique_lock lock(mutex_);
  return tables_.try_emplace(target, std::move(table)).first->second;
}

namespace {

constexpr std::uint32_t kNoParent = 0xFFFFFFFFu;

struct SearchNode {
  VertexId vertex;
  TimeStep time;
  std::uint32_t parent;
};

// Open-list entry: lower f first, then lower g, then lower vertex id.
using OpenEntry = std::tuple<std::uint32_t, std::uint32_t, VertexId, std::uint32_t>;

class SegmentSearch {
 public:
  SegmentSearch(const TopologicalGraph& graph, const AgentConstraints& constraints,
                LowLevelStats* stats)
      : graph_(graph), constraints_(constraints), stats_(stats) {}

  // Path from (from, t0) to (to, deadline), both ends included.
  std::optional<Path> to_landmark(VertexId from, TimeStep t0, VertexId to, TimeStep deadline,
                                  const DistanceCache::Table& dist) {
    auto is_target = [&](const SearchNode& n) {
      return n.vertex == to && n.time == deadline;
    };
    auto heuristic = [&](VertexId v, TimeStep) { return dist[v]; };
    auto prune = [&](VertexId v, TimeStep t) {
      return dist[v] == DistanceCache::unreachable || t + dist[v] > deadline;
    };
    auto idx = run(from, t0, is_target, heuristic, prune);
    if (!idx) return std::nullopt;
    return unwind(*idx);
  }

  // Unbounded leg to the goal: ends at the earliest step after which idling at
  // `goal` is allowed.
  std::optional<Path> to_goal(VertexId from, TimeStep t0, VertexId goal,
                              const DistanceCache::Table& dist) {
    const TimeStep free_time = std::max(t0, constraints_.last_time());
    const auto last_block = constraints_.last_forbidden(goal);
    const TimeStep release = last_block ? *last_block + 1 : 0;

    bool descend = false;
    auto is_target = [&](const SearchNode& n) {
      if (n.vertex == goal && n.time >= release) return true;
      if (n.time >= free_time) {
        descend = true;  // nothing constrains the rest of the route
        return true;
      }
      return false;
    };
    auto heuristic = [&](VertexId v, TimeStep t) {
      const std::uint32_t wait = release > t ? release - t : 0;
      return std::max(dist[v], wait);
    };
    // Later landmarks all sit on the goal and must stay reachable in time.
    const auto& landmarks = constraints_.landmarks();
    auto prune = [&](VertexId v, TimeStep t) {
      if (dist[v] == DistanceCache::unreachable) return true;
      const auto next = std::upper_bound(
          landmarks.begin(), landmarks.end(), t,
          [](TimeStep time, const AgentConstraints::Landmark& lm) { return time < lm.time; });
      return next != landmarks.end() && t + dist[v] > next->time;
    };
    auto idx = run(from, t0, is_target, heuristic, prune);
    if (!idx) return std::nullopt;
    Path path = unwind(*idx);
    if (descend) {
      VertexId cur = path.back();
      while (dist[cur] != 0) {
        for (VertexId w : graph_.movement_neighbors(cur)) {
          if (dist[w] + 1 == dist[cur]) {
            cur = w;
            break;
          }
        }
        path.push_back(cur);
      }
    }
    return path;
  }

 private:
  template <class IsTarget, class Heuristic, class Prune>
  std::optional<std::uint32_t> run(VertexId from, TimeStep t0, IsTarget&& is_target,
                                   Heuristic&& heuristic, Prune&& prune) {
    nodes_.clear();
    std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;
    std::unordered_set<std::uint64_t> seen;
    auto key = [&](VertexId v, TimeStep t) {
      return static_cast<std::uint64_t>(t) * graph_.vertex_count() + v;
    };
    if (prune(from, t0)) return std::nullopt;
    nodes_.push_back({from, t0, kNoParent});
    seen.insert(key(from, t0));
    open.emplace(t0 + heuristic(from, t0), t0, from, 0);

    while (!open.empty()) {
      const auto [f, g, v, idx] = open.top();
      open.pop();
      if (stats_) ++stats_->expansions;
      if (is_target(nodes_[idx])) return idx;
      const TimeStep nt = nodes_[idx].time + 1;
      const auto landmark = constraints_.landmark_at(nt);
      for (VertexId w : graph_.movement_neighbors(v)) {
        if (landmark && *landmark != w) continue;
        if (constraints_.forbids(w, nt) || prune(w, nt)) continue;
        if (!seen.insert(key(w, nt)).second) continue;
        const auto child = static_cast<std::uint32_t>(nodes_.size());
        nodes_.push_back({w, nt, idx});
        open.emplace(nt + heuristic(w, nt), nt, w, child);
      }
    }
    return std::nullopt;
  }

  Path unwind(std::uint32_t idx) const {
    Path path;
    for (std::uint32_t i = idx; i != kNoParent; i = nodes_[i].parent) {
      path.push_back(nodes_[i].vertex);
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  const TopologicalGraph& graph_;
  const AgentConstraints& constraints_;
  LowLevelStats* stats_;
  std::vector<SearchNode> nodes_;
};

}  // namespace

std::optional<Path> constrained_shortest_path(const TopologicalGraph& graph, VertexId start,
                                              VertexId goal,
                                              const AgentConstraints& constraints,
                                              DistanceCache& distances, LowLevelStats* stats) {
  if (stats) ++stats->calls;
  if (!graph.contains(start) || !graph.contains(goal)) return std::nullopt;

  SegmentSearch search(graph, constraints, stats);
  Path path{start};
  VertexId cur = start;
  TimeStep now = 0;
  // Trailing landmarks on the goal are met by idling there, so the last leg
  // covers them instead of visiting each one in turn.
  const auto& landmarks = constraints.landmarks();
  std::size_t tail = landmarks.size();
  while (tail > 0 && landmarks[tail - 1].vertex == goal) --tail;
  for (std::size_t i = 0; i < tail; ++i) {
    const auto& lm = landmarks[i];
    if (lm.time <= now || !graph.contains(lm.vertex)) return std::nullopt;
    const auto table = distances.to(lm.vertex);
    auto leg = search.to_landmark(cur, now, lm.vertex, lm.time, *table);
    if (!leg) return std::nullopt;
    path.insert(path.end(), leg->begin() + 1, leg->end());
    cur = lm.vertex;
    now = lm.time;
  }
  const auto table = distances.to(goal);
  auto leg = search.to_goal(cur, now, goal, *table);
  if (!leg) return std::nullopt;
  path.insert(path.end(), leg->begin() + 1, leg->end());
  return path;
}

}  // namespace cmapf
