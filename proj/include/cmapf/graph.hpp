#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cmapf {

using VertexId = std::uint32_t;
using AgentId = std::uint32_t;
using TimeStep = std::uint32_t;

/// A single agent's route: one vertex per time step, starting at step 0.
using Path = std::vector<VertexId>;

/// One vertex per agent.
using Configuration = std::vector<VertexId>;

using Edge = std::pair<VertexId, VertexId>;

struct GridCell {
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  friend bool operator==(const GridCell&, const GridCell&) = default;
};

/// Optional rendering metadata for graphs derived from grid maps.
struct GridLayout {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<GridCell> cell_of_vertex;
};

/// Vertices with two undirected relations (movement and communication) and a
/// distinguished base vertex.
///
/// Both relations are symmetrised on construction and every vertex receives a
/// movement self-loop, so agents may always idle. Communication neighbour lists
/// never contain the vertex itself; agents sharing a vertex are handled by the
/// connectivity predicates directly.
class TopologicalGraph {
 public:
  TopologicalGraph(std::uint32_t vertex_count, VertexId base,
                   std::span<const Edge> movement_edges,
                   std::span<const Edge> communication_edges,
                   std::optional<GridLayout> layout = std::nullopt);

  std::uint32_t vertex_count() const { return vertex_count_; }
  VertexId base() const { return base_; }
  bool contains(VertexId v) const { return v < vertex_count_; }

  /// Sorted, includes `v` itself.
  std::span<const VertexId> movement_neighbors(VertexId v) const {
    return {movement_.data() + movement_offsets_[v],
            movement_.data() + movement_offsets_[v + 1]};
  }

  /// Sorted, never includes `v` itself.
  std::span<const VertexId> comm_neighbors(VertexId v) const {
    return {comm_.data() + comm_offsets_[v], comm_.data() + comm_offsets_[v + 1]};
  }

  bool can_move(VertexId from, VertexId to) const;

  /// True iff u ⌣ v is an explicit communication edge (u != v).
  bool communicates(VertexId u, VertexId v) const {
    const std::size_t bit = static_cast<std::size_t>(u) * comm_row_words_ * 64 + v;
    return (comm_bits_[bit / 64] >> (bit % 64)) & 1U;
  }

  std::size_t movement_edge_count() const;  // undirected, self-loops excluded
  std::size_t comm_edge_count() const;      // undirected

  const std::optional<GridLayout>& layout() const { return layout_; }

 private:
  std::uint32_t vertex_count_;
  VertexId base_;
  std::vector<std::uint32_t> movement_offsets_;
  std::vector<VertexId> movement_;
  std::vector<std::uint32_t> comm_offsets_;
  std::vector<VertexId> comm_;
  std::size_t comm_row_words_ = 0;
  std::vector<std::uint64_t> comm_bits_;
  std::optional<GridLayout> layout_;
};

/// k equal-length paths. Construct through `from_paths` to pad shorter paths by
/// idling at their last vertex.
class Execution {
 public:
  Execution() = default;
  explicit Execution(std::vector<Path> paths);

  /// Pads every path with its final vertex up to the longest length.
  static Execution from_paths(std::vector<Path> paths);

  std::size_t agent_count() const { return paths_.size(); }
  /// Number of configurations (the 1-based length ℓ).
  std::size_t length() const { return paths_.empty() ? 0 : paths_.front().size(); }
  /// Number of steps, i.e. length() - 1.
  std::uint32_t makespan() const {
    return length() == 0 ? 0 : static_cast<std::uint32_t>(length() - 1);
  }

  const Path& path(AgentId a) const { return paths_[a]; }
  const std::vector<Path>& paths() const { return paths_; }
  Configuration at(TimeStep t) const;

  /// Paths have equal, non-zero length.
  bool well_formed() const;

  friend bool operator==(const Execution&, const Execution&) = default;

 private:
  std::vector<Path> paths_;
};

/// Vertex occupied by an agent following `path` at step `t`; agents idle at
/// their final vertex afterwards.
inline VertexId position_at(const Path& path, TimeStep t) {
  return t < path.size() ? path[t] : path.back();
}

/// The graph is shared: benchmark sweeps solve many instances on one graph.
struct Instance {
  std::shared_ptr<const TopologicalGraph> graph;
  Configuration start;
  Configuration goal;

  std::size_t agent_count() const { return start.size(); }
};

/// True iff {B, c_1, ..., c_k} induces a connected subgraph under ⌣.
bool is_connected(const TopologicalGraph& graph, std::span<const VertexId> config);

/// Agents (ascending) whose vertex lies outside the communication component of
/// the base within the induced subgraph.
std::vector<AgentId> disconnected_agents(const TopologicalGraph& graph,
                                         std::span<const VertexId> config);

bool is_connected_execution(const TopologicalGraph& graph, const Execution& exec);

struct Violation {
  enum class Kind {
    malformed,      // wrong agent count, empty or unequal paths
    invalid_vertex,
    wrong_start,
    wrong_goal,
    illegal_move,
    disconnected,
  };
  Kind kind;
  std::optional<TimeStep> time;
  std::vector<AgentId> agents;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string describe() const;
};

ValidationReport validate_execution(const Instance& instance, const Execution& exec);

/// Throws std::invalid_argument when the instance is malformed or either
/// endpoint configuration is disconnected.
void require_valid_instance(const Instance& instance);

// Sight-moveability --------------------------------------------------------

struct SightMoveableReport {
  bool sight_moveable = true;
  /// First violating pair (v, v') in ascending (v, v') order.
  std::optional<Edge> witness;
};

/// For every communication edge v ⌣ v', checks that an agent can walk from v to
/// v' through vertices that all communicate with v'.
SightMoveableReport is_sight_moveable(const TopologicalGraph& graph);

/// Every ordered violating pair, ascending.
std::vector<Edge> sight_moveable_violations(const TopologicalGraph& graph);

/// Shortest movement path from `from` to `to` whose vertices, except `to`,
/// all communicate with `to`. Ties resolve towards lower vertex ids.
std::optional<Path> sight_path(const TopologicalGraph& graph, VertexId from, VertexId to);

struct SmPlan {
  std::optional<Execution> execution;
  std::string error;  // set when execution is empty
};

/// Builds a connected execution from (B, ..., B) to `goal` by walking agent
/// groups down a BFS spanning tree of the goal vertices. Feasibility witness
/// for sight-moveable graphs; not makespan-optimal.
SmPlan sm_construct_execution(const TopologicalGraph& graph, std::span<const VertexId> goal);

}  // namespace cmapf
