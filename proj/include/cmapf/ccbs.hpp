#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <unordered_set>
#include <string>
#include <tuple>
#include <vector>

#include "cmapf/graph.hpp"
#include "cmapf/low_level.hpp"

namespace cmapf {

/// Child-generation rules applied when splitting a constraint-tree node.
enum class Strategy : std::uint8_t {
  neg = 1,    // forbid each agent's conflicted position
  self = 2,   // move the disconnected agent next to another agent or the base
  other = 4,  // move another agent next to the disconnected agent
};

class StrategySet {
 public:
  constexpr StrategySet() = default;
  constexpr StrategySet(std::initializer_list<Strategy> list) {
    for (Strategy s : list) bits_ |= static_cast<std::uint8_t>(s);
  }
  constexpr bool has(Strategy s) const { return (bits_ & static_cast<std::uint8_t>(s)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  friend constexpr bool operator==(StrategySet, StrategySet) = default;

  /// Parses a comma-separated list such as "neg,self,other".
  static StrategySet parse(const std::string& text);
  std::string to_string() const;

 private:
  std::uint8_t bits_ = 0;
};

namespace variants {
inline constexpr StrategySet nso{Strategy::neg, Strategy::self, Strategy::other};
inline constexpr StrategySet n{Strategy::neg};
inline constexpr StrategySet so{Strategy::self, Strategy::other};
inline constexpr StrategySet s{Strategy::self};
}  // namespace variants

struct SolverConfig {
  StrategySet strategies = variants::nso;
  bool bypass = true;
  bool partial_splitting = false;
  /// Drop children whose constraint set already labels another tree node.
  bool prune_duplicates = true;
  std::optional<std::uint64_t> node_limit;
  std::optional<std::chrono::milliseconds> time_limit;
};

enum class Outcome { solved, exhausted, limit_reached };

const char* to_string(Outcome outcome);

struct SolveStats {
  std::uint64_t nodes_generated = 0;
  std::uint64_t nodes_expanded = 0;
  std::uint64_t lowlevel_calls = 0;
  std::uint64_t bypasses = 0;
  std::uint64_t deferrals = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t max_children_per_expansion = 0;
  double wall_ms = 0;
};

struct Solution {
  Outcome outcome = Outcome::exhausted;
  std::optional<Execution> execution;
  std::uint32_t cost = 0;  // makespan when solved
  SolveStats stats;
};

/// A disconnected time step and the agents outside the base's component.
struct Conflict {
  TimeStep time = 0;
  std::vector<AgentId> disconnected_agents;
};

/// Earliest disconnected step of `exec`, if any.
std::optional<Conflict> detect_conflict(const TopologicalGraph& graph, const Execution& exec);

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0xFFFFFFFFu;

/// Constraint-tree node. Constraints are stored incrementally: each node keeps
/// the one constraint added on the edge from its parent.
struct CTNode {
  NodeId parent = kNoNode;
  std::optional<Constraint> constraint;
  /// Unpadded per-agent paths; agents idle at their goal afterwards.
  std::vector<std::shared_ptr<const Path>> paths;
  std::uint32_t cost = 0;            // makespan of the padded execution
  std::uint32_t conflict_count = 0;  // number of disconnected steps
  std::uint32_t priority = 0;        // cost, raised while children are deferred
  std::uint64_t ordinal = 0;         // insertion order into OPEN
  std::uint32_t depth = 0;
  /// Order-independent hash of the root-to-node constraint set.
  std::array<std::uint64_t, 2> signature{};

  /// Agents whose Self/Other children were withheld by partial splitting,
  /// together with the conflict they belong to.
  struct Deferred {
    TimeStep time;
    AgentId agent;
    std::vector<AgentId> agents;
  };
  std::optional<Deferred> deferred;
};

/// Connectivity-conflict-based search over a constraint tree.
///
/// `solve` runs to completion; `step` exposes one high-level iteration at a
/// time so tests can inspect OPEN between expansions.
class CcbsSearch {
 public:
  CcbsSearch(const Instance& instance, SolverConfig config);

  /// Pops and processes one node. Returns false once the search has finished.
  bool step();
  Solution run();

  bool finished() const { return outcome_.has_value(); }
  const Solution& result() const { return result_; }

  const CTNode& node(NodeId id) const { return nodes_[id]; }
  std::size_t node_count() const { return nodes_.size(); }
  /// Node ids currently in OPEN, best first.
  std::vector<NodeId> open_nodes() const;
  /// All constraints on the root-to-node path.
  ConstraintSet constraints_of(NodeId id) const;
  /// Padded execution of a node.
  Execution execution_of(NodeId id) const;
  /// Node most recently popped from OPEN.
  NodeId last_popped() const { return last_popped_; }
  /// Children inserted into OPEN by the last step.
  const std::vector<NodeId>& last_children() const { return last_children_; }

  // Building blocks of one expansion, exposed for direct testing.

  /// Positive constraints placing `a` next to another agent or the base at `t`.
  std::vector<Constraint> self_constraints(NodeId id, TimeStep t, AgentId a) const;
  /// Positive constraints placing every other agent next to `a` at `t`.
  std::vector<Constraint> other_constraints(NodeId id, TimeStep t, AgentId a) const;
  /// One negative constraint per agent at its position at `t`.
  std::vector<Constraint> neg_constraints(NodeId id, TimeStep t) const;

  struct ChildResult {
    std::optional<CTNode> child;  // empty when duplicate or infeasible
    bool bypass = false;          // child qualifies for adoption by its parent
    std::shared_ptr<const Path> replanned;
  };
  /// Builds the child of `parent` obtained by adding `c`. Does not touch OPEN.
  ChildResult create_child(NodeId parent, const Constraint& c);

 private:
  using OpenKey = std::tuple<std::uint32_t, std::uint32_t, std::uint64_t, NodeId>;

  void push_open(NodeId id);
  void expand(NodeId id);
  AgentConstraints agent_constraints(NodeId id, AgentId a) const;
  std::uint32_t count_conflicts(const std::vector<std::shared_ptr<const Path>>& paths,
                                std::uint32_t cost) const;
  std::optional<Conflict> first_conflict(const CTNode& n) const;
  void finish(Outcome outcome, std::optional<NodeId> solved);
  bool limits_hit() const;

  Instance instance_;
  const TopologicalGraph& graph_;
  SolverConfig config_;
  DistanceCache distances_;
  LowLevelStats lowlevel_;
  std::vector<CTNode> nodes_;
  std::set<OpenKey> open_;
  struct SignatureHash {
    std::size_t operator()(const std::array<std::uint64_t, 2>& s) const { return s[0]; }
  };
  std::unordered_set<std::array<std::uint64_t, 2>, SignatureHash> signatures_;
  std::uint64_t next_ordinal_ = 0;
  NodeId last_popped_ = kNoNode;
  std::vector<NodeId> last_children_;
  std::optional<Outcome> outcome_;
  Solution result_;
  std::chrono::steady_clock::time_point started_;
};

/// Runs CCBS to completion. Throws std::invalid_argument for invalid
/// instances (disconnected endpoints, bad vertex ids).
Solution solve(const Instance& instance, const SolverConfig& config);

}  // namespace cmapf
