#include "cmapf/ccbs.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace cmapf {

StrategySet StrategySet::parse(const std::string& text) {
  StrategySet set;
  std::istringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (token == "neg") {
      set.bits_ |= static_cast<std::uint8_t>(Strategy::neg);
    } else if (token == "self") {
      set.bits_ |= static_cast<std::uint8_t>(Strategy::self);
    } else if (token == "other") {
      set.bits_ |= static_cast<std::uint8_t>(Strategy::other);
    } else {
      throw std::invalid_argument("unknown strategy '" + token + "'");
    }
  }
  if (set.empty()) throw std::invalid_argument("at least one strategy is required");
  return set;
}

std::string StrategySet::to_string() const {
  std::string out;
  auto add = [&](Strategy s, const char* name) {
    if (!has(s)) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(Strategy::neg, "neg");
  add(Strategy::self, "self");
  add(Strategy::other, "other");
  return out;
}

const char* to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::solved: return "solved";
    case Outcome::exhausted: return "exhausted";
    case Outcome::limit_reached: return "limit_reached";
  }
  return "?";
}

std::optional<Conflict> detect_conflict(const TopologicalGraph& graph, const Execution& exec) {
  for (TimeStep t = 0; t < exec.length(); ++t) {
    const Configuration c = exec.at(t);
    auto lost = disconnected_agents(graph, c);
    if (!lost.empty()) return Conflict{t, std::move(lost)};
  }
  return std::nullopt;
}

namespace {

std::uint32_t makespan_of(const std::vector<std::shared_ptr<const Path>>& paths) {
  std::size_t len = 1;
  for (const auto& p : paths) len = std::max(len, p->size());
  return static_cast<std::uint32_t>(len - 1);
}

// comm_neighbors(v) ∪ {v}, ascending. Agents sharing a vertex are together.
std::vector<VertexId> closed_comm(const TopologicalGraph& graph, VertexId v) {
  const auto nb = graph.comm_neighbors(v);
  std::vector<VertexId> out;
  out.reserve(nb.size() + 1);
  auto it = std::lower_bound(nb.begin(), nb.end(), v);
  out.insert(out.end(), nb.begin(), it);
  out.push_back(v);
  out.insert(out.end(), it, nb.end());
  return out;
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Summed per constraint, so the signature ignores insertion order.
std::array<std::uint64_t, 2> signature_of(const Constraint& c) {
  const std::uint64_t packed = (static_cast<std::uint64_t>(c.agent) << 48) ^
                               (static_cast<std::uint64_t>(c.vertex) << 24) ^
                               (static_cast<std::uint64_t>(c.time) << 1) ^
                               static_cast<std::uint64_t>(c.sign == Sign::positive);
  return {mix(packed), mix(packed ^ 0xD6E8FEB86659FD93ull)};
}

}  // namespace

CcbsSearch::CcbsSearch(const Instance& instance, SolverConfig config)
    : instance_(instance),
      graph_(*instance.graph),
      config_(config),
      distances_(*instance.graph),
      started_(std::chrono::steady_clock::now()) {
  require_valid_instance(instance);
  if (config_.strategies.empty()) throw std::invalid_argument("no strategy selected");

  CTNode root;
  root.paths.reserve(instance.agent_count());
  const AgentConstraints none;
  for (AgentId a = 0; a < instance.agent_count(); ++a) {
    auto path = constrained_shortest_path(graph_, instance.start[a], instance.goal[a], none,
                                          distances_, &lowlevel_);
    if (!path) {
      finish(Outcome::exhausted, std::nullopt);
      return;
    }
    root.paths.push_back(std::make_shared<const Path>(std::move(*path)));
  }
  root.cost = makespan_of(root.paths);
  root.priority = root.cost;
  root.conflict_count = count_conflicts(root.paths, root.cost);
  signatures_.insert(root.signature);
  nodes_.push_back(std::move(root));
  result_.stats.nodes_generated = 1;
  push_open(0);
}

void CcbsSearch::push_open(NodeId id) {
  CTNode& n = nodes_[id];
  n.ordinal = next_ordinal_++;
  open_.emplace(n.priority, n.conflict_count, n.ordinal, id);
}

std::vector<NodeId> CcbsSearch::open_nodes() const {
  std::vector<NodeId> ids;
  ids.reserve(open_.size());
  for (const auto& key : open_) ids.push_back(std::get<3>(key));
  return ids;
}

ConstraintSet CcbsSearch::constraints_of(NodeId id) const {
  ConstraintSet set(instance_.agent_count());
  for (NodeId cur = id; cur != kNoNode; cur = nodes_[cur].parent) {
    if (nodes_[cur].constraint) set.add(*nodes_[cur].constraint);
  }
  return set;
}

AgentConstraints CcbsSearch::agent_constraints(NodeId id, AgentId a) const {
  AgentConstraints out;
  for (NodeId cur = id; cur != kNoNode; cur = nodes_[cur].parent) {
    const auto& c = nodes_[cur].constraint;
    if (c && c->agent == a) out.add(c->vertex, c->time, c->sign);
  }
  return out;
}

Execution CcbsSearch::execution_of(NodeId id) const {
  std::vector<Path> paths;
  for (const auto& p : nodes_[id].paths) paths.push_back(*p);
  return Execution::from_paths(std::move(paths));
}

std::uint32_t CcbsSearch::count_conflicts(const std::vector<std::shared_ptr<const Path>>& paths,
                                          std::uint32_t cost) const {
  std::uint32_t count = 0;
  Configuration c(paths.size());
  for (TimeStep t = 0; t <= cost; ++t) {
    for (std::size_t a = 0; a < paths.size(); ++a) c[a] = position_at(*paths[a], t);
    if (!is_connected(graph_, c)) ++count;
  }
  return count;
}

std::optional<Conflict> CcbsSearch::first_conflict(const CTNode& n) const {
  Configuration c(n.paths.size());
  for (TimeStep t = 0; t <= n.cost; ++t) {
    for (std::size_t a = 0; a < n.paths.size(); ++a) c[a] = position_at(*n.paths[a], t);
    auto lost = disconnected_agents(graph_, c);
    if (!lost.empty()) return Conflict{t, std::move(lost)};
  }
  return std::nullopt;
}

std::vector<Constraint> CcbsSearch::self_constraints(NodeId id, TimeStep t, AgentId a) const {
  const CTNode& n = nodes_[id];
  const VertexId here = position_at(*n.paths[a], t);
  std::vector<Constraint> out;
  std::set<VertexId> seen;
  auto offer = [&](VertexId v) {
    if (v != here && seen.insert(v).second) out.push_back({a, v, t, Sign::positive});
  };
  for (AgentId b = 0; b < n.paths.size(); ++b) {
    if (b == a) continue;
    for (VertexId v : closed_comm(graph_, position_at(*n.paths[b], t))) offer(v);
  }
  for (VertexId v : closed_comm(graph_, graph_.base())) offer(v);
  return out;
}

std::vector<Constraint> CcbsSearch::other_constraints(NodeId id, TimeStep t, AgentId a) const {
  const CTNode& n = nodes_[id];
  const auto around = closed_comm(graph_, position_at(*n.paths[a], t));
  std::vector<Constraint> out;
  for (AgentId b = 0; b < n.paths.size(); ++b) {
    if (b == a) continue;
    const VertexId there = position_at(*n.paths[b], t);
    for (VertexId v : around) {
      if (v != there) out.push_back({b, v, t, Sign::positive});
    }
  }
  return out;
}

std::vector<Constraint> CcbsSearch::neg_constraints(NodeId id, TimeStep t) const {
  const CTNode& n = nodes_[id];
  std::vector<Constraint> out;
  for (AgentId a = 0; a < n.paths.size(); ++a) {
    out.push_back({a, position_at(*n.paths[a], t), t, Sign::negative});
  }
  return out;
}

CcbsSearch::ChildResult CcbsSearch::create_child(NodeId parent, const Constraint& c) {
  ChildResult out;
  AgentConstraints constraints = agent_constraints(parent, c.agent);
  if (constraints.add(c.vertex, c.time, c.sign) != AddResult::added) return out;
  auto signature = nodes_[parent].signature;
  const auto extra = signature_of(c);
  signature[0] += extra[0];
  signature[1] += extra[1];
  if (config_.prune_duplicates && signatures_.contains(signature)) {
    ++result_.stats.duplicates;
    return out;
  }

  auto path = constrained_shortest_path(graph_, instance_.start[c.agent], instance_.goal[c.agent],
                                        constraints, distances_, &lowlevel_);
  if (!path) return out;
  assert(satisfies(*path, constraints));

  const CTNode& p = nodes_[parent];
  CTNode child;
  child.parent = parent;
  child.constraint = c;
  child.depth = p.depth + 1;
  child.signature = signature;
  child.paths = p.paths;
  out.replanned = std::make_shared<const Path>(std::move(*path));
  child.paths[c.agent] = out.replanned;
  child.cost = makespan_of(child.paths);
  child.priority = child.cost;
  child.conflict_count = count_conflicts(child.paths, child.cost);
  assert(child.cost >= p.cost);
  out.bypass = config_.bypass && child.cost == p.cost && child.conflict_count < p.conflict_count;
  out.child = std::move(child);
  ++result_.stats.nodes_generated;
  return out;
}

void CcbsSearch::expand(NodeId id) {
  ++result_.stats.nodes_expanded;
  const StrategySet& strategies = config_.strategies;

  TimeStep t = 0;
  AgentId a = 0;
  std::optional<std::vector<AgentId>> resume_agents;
  if (nodes_[id].deferred) {
    t = nodes_[id].deferred->time;
    a = nodes_[id].deferred->agent;
    resume_agents = std::move(nodes_[id].deferred->agents);
    nodes_[id].deferred.reset();
    nodes_[id].priority = nodes_[id].cost;
  } else {
    const auto conflict = first_conflict(nodes_[id]);
    assert(conflict);
    t = conflict->time;
    a = conflict->disconnected_agents.front();
  }

  const bool partial = config_.partial_splitting && strategies.has(Strategy::neg) &&
                       (strategies.has(Strategy::self) || strategies.has(Strategy::other));

  std::vector<CTNode> children;
  std::set<Constraint> tried;
  bool bypass = false;
  auto attempt = [&](const Constraint& c) {
    if (!tried.insert(c).second) return;
    ChildResult r = create_child(id, c);
    if (!r.child) return;
    if (r.bypass) {
      CTNode& n = nodes_[id];
      n.paths[c.agent] = r.replanned;
      n.conflict_count = r.child->conflict_count;
      ++result_.stats.bypasses;
      bypass = true;
    }
    children.push_back(std::move(*r.child));
  };

  // Agents whose positive children are withheld (deferred) or pointless
  // (their Neg child is already infeasible) in this round.
  std::vector<AgentId> deferred;
  std::vector<char> withheld(instance_.agent_count(), 0);
  std::vector<CTNode> neg_children;

  if (resume_agents) {
    for (AgentId b : *resume_agents) withheld[b] = 2;  // 2: generate now
  } else if (partial) {
    for (const Constraint& c : neg_constraints(id, t)) {
      const std::size_t before = children.size();
      attempt(c);
      if (children.size() == before) {
        withheld[c.agent] = 1;  // infeasible: every positive child is too
        continue;
      }
      // Positive children constraining this agent imply the same negative
      // constraint, so they cost at least as much as this child.
      if (children.back().cost > nodes_[id].cost) {
        withheld[c.agent] = 1;
        deferred.push_back(c.agent);
      }
    }
    neg_children = std::move(children);
    children.clear();
  }

  auto wanted = [&](const Constraint& c) {
    if (resume_agents) return withheld[c.agent] == 2;
    return withheld[c.agent] == 0;
  };
  if (strategies.has(Strategy::self)) {
    for (const Constraint& c : self_constraints(id, t, a)) {
      if (wanted(c)) attempt(c);
    }
  }
  if (strategies.has(Strategy::other)) {
    for (const Constraint& c : other_constraints(id, t, a)) {
      if (wanted(c)) attempt(c);
    }
  }
  if (strategies.has(Strategy::neg) && !resume_agents) {
    if (partial) {
      for (CTNode& child : neg_children) children.push_back(std::move(child));
    } else {
      for (const Constraint& c : neg_constraints(id, t)) attempt(c);
    }
  }

  result_.stats.max_children_per_expansion =
      std::max<std::uint64_t>(result_.stats.max_children_per_expansion, children.size());

  if (bypass) {
    nodes_[id].priority = nodes_[id].cost;
    push_open(id);
    return;
  }
  for (CTNode& child : children) {
    const auto child_id = static_cast<NodeId>(nodes_.size());
    signatures_.insert(child.signature);
    nodes_.push_back(std::move(child));
    push_open(child_id);
    last_children_.push_back(child_id);
  }
  if (!deferred.empty()) {
    CTNode& n = nodes_[id];
    n.deferred = CTNode::Deferred{t, a, std::move(deferred)};
    n.priority = n.cost + 1;
    ++result_.stats.deferrals;
    push_open(id);
  }
}

bool CcbsSearch::limits_hit() const {
  if (config_.node_limit && result_.stats.nodes_generated >= *config_.node_limit) return true;
  if (config_.time_limit &&
      std::chrono::steady_clock::now() - started_ >= *config_.time_limit) {
    return true;
  }
  return false;
}

void CcbsSearch::finish(Outcome outcome, std::optional<NodeId> solved) {
  outcome_ = outcome;
  result_.outcome = outcome;
  if (solved) {
    result_.execution = execution_of(*solved);
    result_.cost = nodes_[*solved].cost;
  }
  result_.stats.lowlevel_calls = lowlevel_.calls;
  result_.stats.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started_)
          .count();
}

bool CcbsSearch::step() {
  if (outcome_) return false;
  last_children_.clear();
  if (open_.empty()) {
    finish(Outcome::exhausted, std::nullopt);
    return false;
  }
  if (limits_hit()) {
    finish(Outcome::limit_reached, std::nullopt);
    return false;
  }
  const NodeId id = std::get<3>(*open_.begin());
  open_.erase(open_.begin());
  last_popped_ = id;
  if (nodes_[id].conflict_count == 0) {
    finish(Outcome::solved, id);
    return false;
  }
  expand(id);
  result_.stats.lowlevel_calls = lowlevel_.calls;
  return true;
}

Solution CcbsSearch::run() {
  while (step()) {
  }
  return result_;
}

Solution solve(const Instance& instance, const SolverConfig& config) {
  return CcbsSearch(instance, config).run();
}

}  // namespace cmapf
