#include <doctest.h>

#include <filesystem>

#include "cmapf/grid.hpp"
#include "cmapf/io.hpp"
#include "support/fixtures.hpp"
#include "support/random_instances.hpp"

using namespace cmapf;

namespace {

bool same_graph(const TopologicalGraph& a, const TopologicalGraph& b) {
  if (a.vertex_count() != b.vertex_count() || a.base() != b.base()) return false;
  for (VertexId u = 0; u < a.vertex_count(); ++u) {
    for (VertexId v = 0; v < a.vertex_count(); ++v) {
      if (a.can_move(u, v) != b.can_move(u, v)) return false;
      if (a.communicates(u, v) != b.communicates(u, v)) return false;
    }
  }
  return a.layout().has_value() == b.layout().has_value();
}

template <class F>
std::size_t error_line(F&& parse) {
  try {
    parse();
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("graph text round trip") {
  const auto g = fixtures::example_graph();
  const std::string text = format_graph(*g);
  CHECK(text.rfind("cmapf-graph v1\n", 0) == 0);
  const auto back = parse_graph(text);
  CHECK(same_graph(*g, back));
  CHECK(format_graph(back) == text);
}

TEST_CASE("grid layouts survive the round trip") {
  const GridMap m(2, 3, {'.', '.', '@', '.', '.', '.'});
  const auto g = discretize(m, {});
  const auto back = parse_graph(format_graph(g));
  REQUIRE(back.layout());
  CHECK(back.layout()->cell_of_vertex == g.layout()->cell_of_vertex);
  CHECK(same_graph(g, back));
}

TEST_CASE("comments and blank lines are ignored") {
  const auto g = parse_graph(
      "# a path\ncmapf-graph v1\n\nvertices 2  # two\nbase 1\nmvt 0 1\ncomm 1 0\n");
  CHECK(g.vertex_count() == 2);
  CHECK(g.base() == 1);
  CHECK(g.communicates(0, 1));
}

TEST_CASE("graph diagnostics") {
  auto line = [](std::string text) { return error_line([&] { parse_graph(text); }); };
  CHECK(line("cmapf-graph v2\n") == 1);
  CHECK(line("cmapf-graph v1\nvertices 0\n") == 2);
  CHECK(line("cmapf-graph v1\nvertices 2\nbase 5\n") == 3);
  CHECK(line("cmapf-graph v1\nvertices 2\nbase 0\nmvt 0 7\n") == 4);
  CHECK(line("cmapf-graph v1\nvertices 2\nbase 0\nmvt 0\n") == 4);
  CHECK(line("cmapf-graph v1\nvertices 2\nbase 0\nfly 0 1\n") == 4);
  CHECK(line("cmapf-graph v1\nvertices 2\nbase 0\nmvt 0 x\n") == 4);
  CHECK(line("cmapf-graph v1\nvertices 2\n") != 0);
}

TEST_CASE("instance round trip, inline and by reference") {
  const Instance inst = fixtures::counterexample_instance();
  const auto text = format_instance(inst);
  const Instance back = parse_instance(text);
  CHECK(back.start == inst.start);
  CHECK(back.goal == inst.goal);
  CHECK(same_graph(*back.graph, *inst.graph));
  CHECK(format_instance(back) == text);

  const auto dir = std::filesystem::temp_directory_path() / "cmapf_io_test";
  std::filesystem::create_directories(dir);
  write_text_file(dir / "g.graph", format_graph(*inst.graph));
  write_text_file(dir / "i.inst", format_instance(inst, "g.graph"));
  const Instance loaded = load_instance(dir / "i.inst");
  CHECK(loaded.start == inst.start);
  CHECK(same_graph(*loaded.graph, *inst.graph));
  std::filesystem::remove_all(dir);
}

TEST_CASE("instance diagnostics") {
  const std::string graph = "graph inline\nvertices 7\nbase 0\nmvt 1 2\nend graph\n";
  auto line = [](std::string text) { return error_line([&] { parse_instance(text); }); };
  CHECK(line("cmapf-instance v1\n" + graph + "agents 0\n") == 7);
  CHECK(line("cmapf-instance v1\n" + graph + "agents 2\nstart 1\ngoal 1 1\n") == 8);
  CHECK(line("cmapf-instance v1\n" + graph + "agents 1\nstart 9\ngoal 1\n") == 8);
  CHECK(line("cmapf-instance v1\n" + graph + "agents 1\nstart 1\ngoal 1\nextra\n") == 10);
  CHECK(line("cmapf-instance v1\ngraph inline\nvertices 7\nbase 0\n") == 5);
  CHECK(line("cmapf-instance v1\ngraph /nonexistent/g.graph\n") == 2);
}

TEST_CASE("solution round trip") {
  Solution sol;
  sol.outcome = Outcome::solved;
  sol.execution = Execution({{1, 2, 3, 3}, {4, 4, 5, 6}});
  sol.cost = 3;
  sol.stats.nodes_generated = 5;
  const auto rec = parse_solution(format_solution(sol));
  CHECK(rec.outcome == Outcome::solved);
  REQUIRE(rec.execution);
  CHECK(rec.execution->paths() == sol.execution->paths());
  CHECK(rec.cost == 3);

  Solution none;
  none.outcome = Outcome::limit_reached;
  const auto rec2 = parse_solution(format_solution(none));
  CHECK(rec2.outcome == Outcome::limit_reached);
  CHECK_FALSE(rec2.execution);
}

TEST_CASE("solution diagnostics") {
  auto line = [](std::string text) { return error_line([&] { parse_solution(text); }); };
  CHECK(line("cmapf-solution v1\noutcome maybe\n") == 2);
  CHECK(line("cmapf-solution v1\noutcome solved\nagents 2\npath 1 2\npath 3\ncost 1\n") == 5);
  CHECK(line("cmapf-solution v1\noutcome solved\nagents 1\npath\ncost 0\n") == 4);
}

TEST_CASE("random graphs and instances round trip") {
  testing::Rng rng(12);
  int done = 0;
  while (done < 1000) {
    const auto inst = testing::random_instance(rng, testing::uniform(rng, 1, 15),
                                               testing::uniform(rng, 1, 4));
    if (!inst) continue;
    ++done;
    const auto text = format_instance(*inst);
    const Instance back = parse_instance(text);
    CHECK(back.start == inst->start);
    CHECK(back.goal == inst->goal);
    CHECK(same_graph(*back.graph, *inst->graph));
    CHECK(format_instance(back) == text);
  }
}

TEST_CASE("missing files") {
  CHECK_THROWS_AS(read_text_file("/nonexistent/file.inst"), std::runtime_error);
  CHECK_THROWS_AS(load_instance("/nonexistent/file.inst"), std::runtime_error);
}
