#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "cmapf/graph.hpp"

namespace cmapf {

enum class Sign : std::uint8_t { positive, negative };

/// ⟨agent, vertex, time, sign⟩: the agent must (positive) or must not
/// (negative) occupy `vertex` at step `time`. Step 0 is the fixed start, so
/// constraints always have time >= 1.
struct Constraint {
  AgentId agent = 0;
  VertexId vertex = 0;
  TimeStep time = 1;
  Sign sign = Sign::negative;

  friend auto operator<=>(const Constraint&, const Constraint&) = default;
};

enum class AddResult { added, duplicate, contradictory };

/// Constraints of a single agent. Positives are exact-time landmarks; at most
/// one per time step, and never together with a negative on the same
/// (vertex, time).
class AgentConstraints {
 public:
  struct Landmark {
    TimeStep time;
    VertexId vertex;
    friend auto operator<=>(const Landmark&, const Landmark&) = default;
  };

  AddResult add(VertexId vertex, TimeStep time, Sign sign);

  bool contains(VertexId vertex, TimeStep time, Sign sign) const;
  bool forbids(VertexId vertex, TimeStep time) const;
  /// Landmark vertex at `time`, if any.
  std::optional<VertexId> landmark_at(TimeStep time) const;

  /// Sorted by time.
  const std::vector<Landmark>& landmarks() const { return positives_; }
  /// Sorted by (time, vertex).
  const std::vector<Landmark>& forbidden() const { return negatives_; }

  std::size_t size() const { return positives_.size() + negatives_.size(); }
  bool empty() const { return size() == 0; }
  /// Latest step mentioned by any constraint, 0 when empty.
  TimeStep last_time() const;
  /// Latest step at which `vertex` is forbidden, if any.
  std::optional<TimeStep> last_forbidden(VertexId vertex) const;

 private:
  std::vector<Landmark> positives_;
  std::vector<Landmark> negatives_;
};

class ConstraintSet {
 public:
  explicit ConstraintSet(std::size_t agent_count = 0) : per_agent_(agent_count) {}

  AddResult add(const Constraint& c);
  const AgentConstraints& for_agent(AgentId a) const { return per_agent_.at(a); }
  std::size_t agent_count() const { return per_agent_.size(); }
  std::size_t size() const;

 private:
  std::vector<AgentConstraints> per_agent_;
};

/// Checks a path against constraints using goal idling: beyond its end the
/// agent is at path.back().
bool satisfies(const Path& path, const AgentConstraints& constraints);
bool satisfies(const Execution& exec, const ConstraintSet& constraints);

/// BFS hop distances over movement edges towards a target vertex, built once
/// per target and shared between concurrent searches on the same graph.
class DistanceCache {
 public:
  static constexpr std::uint32_t unreachable = 0xFFFFFFFFu;
  using Table = std::vector<std::uint32_t>;

  explicit DistanceCache(const TopologicalGraph& graph) : graph_(&graph) {}

  std::shared_ptr<const Table> to(VertexId target);
  const TopologicalGraph& graph() const { return *graph_; }

 private:
  const TopologicalGraph* graph_;
  std::shared_mutex mutex_;
  std::unordered_map<VertexId, std::shared_ptr<const Table>> tables_;
};

std::vector<std::uint32_t> bfs_distances(const TopologicalGraph& graph, VertexId target);

struct LowLevelStats {
  std::uint64_t calls = 0;
  std::uint64_t expansions = 0;
};

/// Shortest path from `start` to `goal` honouring one agent's constraints.
///
/// Landmarks are visited in time order, each reached exactly at its step; the
/// last leg to the goal is unbounded in time. The returned path ends at the
/// goal at the earliest step after which idling there violates nothing.
/// Returns nullopt when no such path exists.
std::optional<Path> constrained_shortest_path(const TopologicalGraph& graph, VertexId start,
                                              VertexId goal,
                                              const AgentConstraints& constraints,
                                              DistanceCache& distances,
                                              LowLevelStats* stats = nullptr);

}  // namespace cmapf
