#include "cmapf/graph.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace cmapf {

namespace {

void build_csr(std::uint32_t n, std::vector<std::vector<VertexId>>& lists,
               std::vector<std::uint32_t>& offsets, std::vector<VertexId>& flat) {
  offsets.assign(n + 1, 0);
  for (std::uint32_t v = 0; v < n; ++v) {
    auto& l = lists[v];
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
    offsets[v + 1] = offsets[v] + static_cast<std::uint32_t>(l.size());
  }
  flat.clear();
  flat.reserve(offsets[n]);
  for (auto& l : lists) flat.insert(flat.end(), l.begin(), l.end());
}

void check_edge(std::uint32_t n, const Edge& e, const char* what) {
  if (e.first >= n || e.second >= n) {
    std::ostringstream msg;
    msg << what << " edge (" << e.first << ", " << e.second << ") references a vertex >= "
        << n;
    throw std::invalid_argument(msg.str());
  }
}

// Marks which entries of `nodes` are reachable from nodes[0] under ⌣.
std::vector<char> reach_from_first(const TopologicalGraph& graph,
                                   const std::vector<VertexId>& nodes) {
  std::vector<char> seen(nodes.size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const VertexId u = nodes[stack.back()];
    stack.pop_back();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!seen[i] && graph.communicates(u, nodes[i])) {
        seen[i] = 1;
        stack.push_back(i);
      }
    }
  }
  return seen;
}

// Base first, then the distinct agent vertices.
std::vector<VertexId> induced_vertices(const TopologicalGraph& graph,
                                       std::span<const VertexId> config) {
  std::vector<VertexId> nodes;
  nodes.reserve(config.size() + 1);
  nodes.push_back(graph.base());
  for (VertexId v : config) {
    if (std::find(nodes.begin(), nodes.end(), v) == nodes.end()) nodes.push_back(v);
  }
  return nodes;
}

}  // namespace

TopologicalGraph::TopologicalGraph(std::uint32_t vertex_count, VertexId base,
                                   std::span<const Edge> movement_edges,
                                   std::span<const Edge> communication_edges,
                                   std::optional<GridLayout> layout)
    : vertex_count_(vertex_count), base_(base), layout_(std::move(layout)) {
  if (vertex_count == 0) throw std::invalid_argument("graph must have at least one vertex");
  if (base >= vertex_count) throw std::invalid_argument("base is not a vertex of the graph");
  if (layout_ && layout_->cell_of_vertex.size() != vertex_count) {
    throw std::invalid_argument("grid layout must give one cell per vertex");
  }

  std::vector<std::vector<VertexId>> mv(vertex_count), cm(vertex_count);
  for (VertexId v = 0; v < vertex_count; ++v) mv[v].push_back(v);
  for (const Edge& e : movement_edges) {
    check_edge(vertex_count, e, "movement");
    mv[e.first].push_back(e.second);
    mv[e.second].push_back(e.first);
  }
  for (const Edge& e : communication_edges) {
    check_edge(vertex_count, e, "communication");
    if (e.first == e.second) continue;
    cm[e.first].push_back(e.second);
    cm[e.second].push_back(e.first);
  }
  build_csr(vertex_count, mv, movement_offsets_, movement_);
  build_csr(vertex_count, cm, comm_offsets_, comm_);

  comm_row_words_ = (vertex_count + 63) / 64;
  comm_bits_.assign(comm_row_words_ * vertex_count, 0);
  for (VertexId u = 0; u < vertex_count; ++u) {
    for (VertexId v : comm_neighbors(u)) {
      const std::size_t bit = static_cast<std::size_t>(u) * comm_row_words_ * 64 + v;
      comm_bits_[bit / 64] |= std::uint64_t{1} << (bit % 64);
    }
  }
}

bool TopologicalGraph::can_move(VertexId from, VertexId to) const {
  const auto nb = movement_neighbors(from);
  return std::binary_search(nb.begin(), nb.end(), to);
}

std::size_t TopologicalGraph::movement_edge_count() const {
  return (movement_.size() - vertex_count_) / 2;
}

std::size_t TopologicalGraph::comm_edge_count() const { return comm_.size() / 2; }

Execution::Execution(std::vector<Path> paths) : paths_(std::move(paths)) {}

Execution Execution::from_paths(std::vector<Path> paths) {
  std::size_t len = 0;
  for (const Path& p : paths) len = std::max(len, p.size());
  for (Path& p : paths) {
    if (!p.empty()) p.resize(len, p.back());
  }
  return Execution(std::move(paths));
}

Configuration Execution::at(TimeStep t) const {
  Configuration c;
  c.reserve(paths_.size());
  for (const Path& p : paths_) c.push_back(p[t]);
  return c;
}

bool Execution::well_formed() const {
  if (paths_.empty()) return false;
  const std::size_t len = paths_.front().size();
  if (len == 0) return false;
  return std::all_of(paths_.begin(), paths_.end(),
                     [len](const Path& p) { return p.size() == len; });
}

bool is_connected(const TopologicalGraph& graph, std::span<const VertexId> config) {
  const auto nodes = induced_vertices(graph, config);
  const auto seen = reach_from_first(graph, nodes);
  return std::all_of(seen.begin(), seen.end(), [](char s) { return s != 0; });
}

std::vector<AgentId> disconnected_agents(const TopologicalGraph& graph,
                                         std::span<const VertexId> config) {
  const auto nodes = induced_vertices(graph, config);
  const auto seen = reach_from_first(graph, nodes);
  std::vector<AgentId> out;
  for (AgentId a = 0; a < config.size(); ++a) {
    const auto it = std::find(nodes.begin(), nodes.end(), config[a]);
    if (!seen[static_cast<std::size_t>(it - nodes.begin())]) out.push_back(a);
  }
  return out;
}

bool is_connected_execution(const TopologicalGraph& graph, const Execution& exec) {
  Configuration c(exec.agent_count());
  for (TimeStep t = 0; t < exec.length(); ++t) {
    for (AgentId a = 0; a < exec.agent_count(); ++a) c[a] = exec.path(a)[t];
    if (!is_connected(graph, c)) return false;
  }
  return true;
}

std::string ValidationReport::describe() const {
  std::ostringstream out;
  for (const Violation& v : violations) {
    out << v.detail << '\n';
  }
  return out.str();
}

ValidationReport validate_execution(const Instance& instance, const Execution& exec) {
  ValidationReport report;
  auto add = [&](Violation::Kind kind, std::optional<TimeStep> t, std::vector<AgentId> agents,
                 std::string detail) {
    report.violations.push_back({kind, t, std::move(agents), std::move(detail)});
  };
  const TopologicalGraph& g = *instance.graph;
  const std::size_t k = instance.agent_count();

  if (exec.agent_count() != k) {
    add(Violation::Kind::malformed, std::nullopt, {},
        "execution has " + std::to_string(exec.agent_count()) + " paths, instance has " +
            std::to_string(k) + " agents");
    return report;
  }
  if (!exec.well_formed()) {
    add(Violation::Kind::malformed, std::nullopt, {}, "paths are empty or of unequal length");
    return report;
  }
  for (AgentId a = 0; a < k; ++a) {
    for (TimeStep t = 0; t < exec.length(); ++t) {
      if (!g.contains(exec.path(a)[t])) {
        add(Violation::Kind::invalid_vertex, t, {a},
            "agent " + std::to_string(a) + " at step " + std::to_string(t) +
                " occupies unknown vertex " + std::to_string(exec.path(a)[t]));
      }
    }
  }
  if (!report.ok()) return report;

  const TimeStep last = exec.makespan();
  for (AgentId a = 0; a < k; ++a) {
    if (exec.path(a).front() != instance.start[a]) {
      add(Violation::Kind::wrong_start, 0, {a},
          "agent " + std::to_string(a) + " starts at " + std::to_string(exec.path(a).front()) +
              ", expected " + std::to_string(instance.start[a]));
    }
    if (exec.path(a).back() != instance.goal[a]) {
      add(Violation::Kind::wrong_goal, last, {a},
          "agent " + std::to_string(a) + " ends at " + std::to_string(exec.path(a).back()) +
              ", expected " + std::to_string(instance.goal[a]));
    }
    for (TimeStep t = 0; t < last; ++t) {
      const VertexId from = exec.path(a)[t];
      const VertexId to = exec.path(a)[t + 1];
      if (!g.can_move(from, to)) {
        add(Violation::Kind::illegal_move, t + 1, {a},
            "agent " + std::to_string(a) + " moves " + std::to_string(from) + " -> " +
                std::to_string(to) + " at step " + std::to_string(t + 1) +
                " without a movement edge");
      }
    }
  }
  for (TimeStep t = 0; t <= last; ++t) {
    const Configuration c = exec.at(t);
    auto lost = disconnected_agents(g, c);
    if (!lost.empty()) {
      std::string who;
      for (AgentId a : lost) who += (who.empty() ? "" : ",") + std::to_string(a);
      add(Violation::Kind::disconnected, t, std::move(lost),
          "step " + std::to_string(t) + " is disconnected; agents outside the base component: " +
              who);
    }
  }
  return report;
}

void require_valid_instance(const Instance& instance) {
  if (!instance.graph) throw std::invalid_argument("instance has no graph");
  const TopologicalGraph& g = *instance.graph;
  if (instance.start.empty()) throw std::invalid_argument("instance needs at least one agent");
  if (instance.start.size() != instance.goal.size()) {
    throw std::invalid_argument("start and goal configurations differ in size");
  }
  for (std::size_t a = 0; a < instance.start.size(); ++a) {
    if (!g.contains(instance.start[a]) || !g.contains(instance.goal[a])) {
      throw std::invalid_argument("agent " + std::to_string(a) +
                                  " has a start or goal outside the graph");
    }
  }
  if (!is_connected(g, instance.start)) {
    throw std::invalid_argument("start configuration is disconnected");
  }
  if (!is_connected(g, instance.goal)) {
    throw std::invalid_argument("goal configuration is disconnected");
  }
}

}  // namespace cmapf
