#include "cmapf/io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace cmapf {

namespace {

struct Line {
  std::size_t number = 0;
  std::vector<std::string_view> tokens;
};

// Yields non-blank lines with comments stripped.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  std::optional<Line> next() {
    while (pos_ < text_.size() && !done_) {
      const std::size_t end = text_.find('\n', pos_);
      std::string_view raw = text_.substr(pos_, end == std::string_view::npos ? end : end - pos_);
      ++line_;
      if (end == std::string_view::npos) {
        done_ = true;
      } else {
        pos_ = end + 1;
      }
      if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
      Line line{line_, tokenize(raw)};
      if (!line.tokens.empty()) return line;
    }
    return std::nullopt;
  }

  Line expect(const char* what) {
    auto line = next();
    if (!line) throw ParseError(line_ + 1, std::string("unexpected end of input, expected ") + what);
    return *line;
  }

  std::size_t line_number() const { return line_; }

 private:
  static std::vector<std::string_view> tokenize(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      std::size_t j = i;
      while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
      if (j > i) out.push_back(s.substr(i, j - i));
      i = j;
    }
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
  bool done_ = false;
};

template <typename T>
T parse_number(std::string_view token, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError(line, "expected a non-negative integer, got '" + std::string(token) + "'");
  }
  return value;
}

void expect_arity(const Line& line, std::size_t arity) {
  if (line.tokens.size() != arity) {
    throw ParseError(line.number, "'" + std::string(line.tokens[0]) + "' takes " +
                                      std::to_string(arity - 1) + " argument(s)");
  }
}

void expect_header(LineReader& in, std::string_view magic) {
  const Line line = in.expect("a header");
  if (line.tokens.size() != 2 || line.tokens[0] != magic || line.tokens[1] != "v1") {
    throw ParseError(line.number, "expected header '" + std::string(magic) + " v1'");
  }
}

struct EdgeLine {
  Edge edge;
  std::size_t line;
};

// Reads graph body lines; stops after `end graph` when `inline_block` is set.
TopologicalGraph read_graph(LineReader& in, bool inline_block) {
  std::optional<std::uint32_t> vertices;
  std::optional<std::pair<VertexId, std::size_t>> base;
  std::optional<GridLayout> layout;
  std::vector<std::pair<GridCell, std::size_t>> coords;
  std::vector<char> has_coord;
  std::vector<EdgeLine> mvt, comm;
  std::size_t last_line = in.line_number();

  while (true) {
    auto maybe = inline_block ? std::optional<Line>(in.expect("'end graph'")) : in.next();
    if (!maybe) break;
    const Line& line = *maybe;
    last_line = line.number;
    const std::string_view key = line.tokens[0];
    if (inline_block && key == "end") {
      if (line.tokens.size() != 2 || line.tokens[1] != "graph") {
        throw ParseError(line.number, "expected 'end graph'");
      }
      break;
    }
    if (key == "vertices") {
      expect_arity(line, 2);
      if (vertices) throw ParseError(line.number, "duplicate 'vertices'");
      vertices = parse_number<std::uint32_t>(line.tokens[1], line.number);
      if (*vertices == 0) throw ParseError(line.number, "vertex count must be positive");
    } else if (key == "base") {
      expect_arity(line, 2);
      if (base) throw ParseError(line.number, "duplicate 'base'");
      base = {parse_number<VertexId>(line.tokens[1], line.number), line.number};
    } else if (key == "grid") {
      expect_arity(line, 3);
      if (layout) throw ParseError(line.number, "duplicate 'grid'");
      layout = GridLayout{parse_number<std::uint32_t>(line.tokens[1], line.number),
                          parse_number<std::uint32_t>(line.tokens[2], line.number),
                          {}};
    } else if (key == "coord") {
      expect_arity(line, 4);
      if (!vertices || !layout) {
        throw ParseError(line.number, "'coord' requires earlier 'vertices' and 'grid' lines");
      }
      const auto v = parse_number<VertexId>(line.tokens[1], line.number);
      const GridCell cell{parse_number<std::uint32_t>(line.tokens[2], line.number),
                          parse_number<std::uint32_t>(line.tokens[3], line.number)};
      if (v >= *vertices) throw ParseError(line.number, "vertex id out of range");
      if (cell.row >= layout->height || cell.col >= layout->width) {
        throw ParseError(line.number, "coordinate outside the grid");
      }
      if (coords.empty()) {
        coords.resize(*vertices);
        has_coord.assign(*vertices, 0);
      }
      if (has_coord[v]) throw ParseError(line.number, "duplicate coordinate for vertex");
      has_coord[v] = 1;
      coords[v] = {cell, line.number};
    } else if (key == "mvt" || key == "comm") {
      expect_arity(line, 3);
      const Edge e{parse_number<VertexId>(line.tokens[1], line.number),
                   parse_number<VertexId>(line.tokens[2], line.number)};
      (key == "mvt" ? mvt : comm).push_back({e, line.number});
    } else {
      throw ParseError(line.number, "unknown directive '" + std::string(key) + "'");
    }
  }

  if (!vertices) throw ParseError(last_line, "missing 'vertices'");
  if (!base) throw ParseError(last_line, "missing 'base'");
  if (base->first >= *vertices) throw ParseError(base->second, "base id out of range");
  auto collect = [&](const std::vector<EdgeLine>& lines) {
    std::vector<Edge> edges;
    edges.reserve(lines.size());
    for (const auto& [e, n] : lines) {
      if (e.first >= *vertices || e.second >= *vertices) {
        throw ParseError(n, "edge endpoint out of range");
      }
      edges.push_back(e);
    }
    return edges;
  };
  const auto mvt_edges = collect(mvt);
  const auto comm_edges = collect(comm);
  if (layout) {
    if (coords.empty()) throw ParseError(last_line, "'grid' given without any 'coord' lines");
    for (VertexId v = 0; v < *vertices; ++v) {
      if (!has_coord[v]) {
        throw ParseError(last_line, "missing coordinate for vertex " + std::to_string(v));
      }
      layout->cell_of_vertex.push_back(coords[v].first);
    }
  }
  return TopologicalGraph(*vertices, base->first, mvt_edges, comm_edges, std::move(layout));
}

Configuration read_config(const Line& line, std::size_t agents, std::uint32_t vertex_count) {
  if (line.tokens.size() != agents + 1) {
    throw ParseError(line.number, "'" + std::string(line.tokens[0]) + "' needs " +
                                      std::to_string(agents) + " vertex ids");
  }
  Configuration c;
  for (std::size_t i = 1; i < line.tokens.size(); ++i) {
    const auto v = parse_number<VertexId>(line.tokens[i], line.number);
    if (v >= vertex_count) throw ParseError(line.number, "vertex id out of range");
    c.push_back(v);
  }
  return c;
}

Line expect_key(LineReader& in, std::string_view key) {
  const std::string what = "'" + std::string(key) + "'";
  Line line = in.expect(what.c_str());
  if (line.tokens[0] != key) throw ParseError(line.number, "expected " + what);
  return line;
}

void expect_end(LineReader& in) {
  if (auto extra = in.next()) throw ParseError(extra->number, "unexpected trailing content");
}

}  // namespace

std::string format_graph(const TopologicalGraph& graph) {
  std::ostringstream out;
  out << "cmapf-graph v1\nvertices " << graph.vertex_count() << "\nbase " << graph.base() << '\n';
  if (const auto& layout = graph.layout()) {
    out << "grid " << layout->height << ' ' << layout->width << '\n';
    for (VertexId v = 0; v < graph.vertex_count(); ++v) {
      out << "coord " << v << ' ' << layout->cell_of_vertex[v].row << ' '
          << layout->cell_of_vertex[v].col << '\n';
    }
  }
  for (VertexId u = 0; u < graph.vertex_count(); ++u) {
    for (VertexId v : graph.movement_neighbors(u)) {
      if (u < v) out << "mvt " << u << ' ' << v << '\n';
    }
  }
  for (VertexId u = 0; u < graph.vertex_count(); ++u) {
    for (VertexId v : graph.comm_neighbors(u)) {
      if (u < v) out << "comm " << u << ' ' << v << '\n';
    }
  }
  return out.str();
}

TopologicalGraph parse_graph(std::string_view text) {
  LineReader in(text);
  expect_header(in, "cmapf-graph");
  return read_graph(in, false);
}

Instance parse_instance(std::string_view text, const std::filesystem::path& base_dir) {
  LineReader in(text);
  expect_header(in, "cmapf-instance");
  const Line graph_line = expect_key(in, "graph");
  expect_arity(graph_line, 2);
  std::shared_ptr<const TopologicalGraph> graph;
  if (graph_line.tokens[1] == "inline") {
    graph = std::make_shared<const TopologicalGraph>(read_graph(in, true));
  } else {
    std::filesystem::path path(graph_line.tokens[1]);
    if (path.is_relative()) path = base_dir / path;
    try {
      graph = std::make_shared<const TopologicalGraph>(load_graph(path));
    } catch (const ParseError& e) {
      throw ParseError(graph_line.number, path.string() + ": " + e.what());
    } catch (const std::runtime_error& e) {
      throw ParseError(graph_line.number, e.what());
    }
  }
  const Line agents_line = expect_key(in, "agents");
  expect_arity(agents_line, 2);
  const auto k = parse_number<std::size_t>(agents_line.tokens[1], agents_line.number);
  if (k == 0) throw ParseError(agents_line.number, "agent count must be positive");
  Instance instance{graph, {}, {}};
  instance.start = read_config(expect_key(in, "start"), k, graph->vertex_count());
  instance.goal = read_config(expect_key(in, "goal"), k, graph->vertex_count());
  expect_end(in);
  return instance;
}

std::string format_instance(const Instance& instance, const std::optional<std::string>& graph_ref) {
  std::ostringstream out;
  out << "cmapf-instance v1\n";
  if (graph_ref) {
    out << "graph " << *graph_ref << '\n';
  } else {
    const std::string g = format_graph(*instance.graph);
    // Drop the graph header; the inline block is introduced by `graph inline`.
    out << "graph inline\n" << g.substr(g.find('\n') + 1) << "end graph\n";
  }
  out << "agents " << instance.agent_count() << "\nstart";
  for (VertexId v : instance.start) out << ' ' << v;
  out << "\ngoal";
  for (VertexId v : instance.goal) out << ' ' << v;
  out << '\n';
  return out.str();
}

std::string format_solution(const Solution& solution) {
  std::ostringstream out;
  out << "cmapf-solution v1\noutcome " << to_string(solution.outcome) << '\n';
  if (solution.outcome == Outcome::solved && solution.execution) {
    out << "agents " << solution.execution->agent_count() << '\n';
    for (const Path& p : solution.execution->paths()) {
      out << "path";
      for (VertexId v : p) out << ' ' << v;
      out << '\n';
    }
    out << "cost " << solution.cost << '\n';
  }
  const SolveStats& s = solution.stats;
  out << "stats nodes_generated=" << s.nodes_generated << " nodes_expanded=" << s.nodes_expanded
      << " lowlevel_calls=" << s.lowlevel_calls << " bypasses=" << s.bypasses
      << " deferrals=" << s.deferrals << " wall_ms=" << s.wall_ms << '\n';
  return out.str();
}

SolutionRecord parse_solution(std::string_view text) {
  LineReader in(text);
  expect_header(in, "cmapf-solution");
  SolutionRecord record;
  const Line outcome = expect_key(in, "outcome");
  expect_arity(outcome, 2);
  if (outcome.tokens[1] == "solved") {
    record.outcome = Outcome::solved;
  } else if (outcome.tokens[1] == "exhausted") {
    record.outcome = Outcome::exhausted;
  } else if (outcome.tokens[1] == "limit_reached") {
    record.outcome = Outcome::limit_reached;
  } else {
    throw ParseError(outcome.number, "unknown outcome '" + std::string(outcome.tokens[1]) + "'");
  }
  if (record.outcome == Outcome::solved) {
    const Line agents_line = expect_key(in, "agents");
    expect_arity(agents_line, 2);
    const auto k = parse_number<std::size_t>(agents_line.tokens[1], agents_line.number);
    std::vector<Path> paths;
    for (std::size_t a = 0; a < k; ++a) {
      const Line line = expect_key(in, "path");
      if (line.tokens.size() < 2) throw ParseError(line.number, "empty path");
      Path p;
      for (std::size_t i = 1; i < line.tokens.size(); ++i) {
        p.push_back(parse_number<VertexId>(line.tokens[i], line.number));
      }
      if (!paths.empty() && p.size() != paths.front().size()) {
        throw ParseError(line.number, "paths must have equal length");
      }
      paths.push_back(std::move(p));
    }
    const Line cost = expect_key(in, "cost");
    expect_arity(cost, 2);
    record.cost = parse_number<std::uint32_t>(cost.tokens[1], cost.number);
    record.execution = Execution(std::move(paths));
  }
  while (auto line = in.next()) {
    if (line->tokens[0] != "stats") {
      throw ParseError(line->number, "unexpected '" + std::string(line->tokens[0]) + "'");
    }
  }
  return record;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

TopologicalGraph load_graph(const std::filesystem::path& path) {
  return parse_graph(read_text_file(path));
}

Instance load_instance(const std::filesystem::path& path) {
  return parse_instance(read_text_file(path), path.parent_path());
}

SolutionRecord load_solution(const std::filesystem::path& path) {
  return parse_solution(read_text_file(path));
}

}  // namespace cmapf
