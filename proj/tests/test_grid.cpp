#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <string>

#include "cmapf/grid.hpp"
#include "support/random_instances.hpp"

using namespace cmapf;

namespace {

GridMap from_rows(const std::vector<std::string>& rows) {
  std::vector<char> cells;
  for (const auto& r : rows) cells.insert(cells.end(), r.begin(), r.end());
  return GridMap(static_cast<std::uint32_t>(rows.size()),
                 static_cast<std::uint32_t>(rows.front().size()), std::move(cells));
}

GridMap random_map(testing::Rng& rng, std::uint32_t h, std::uint32_t w, double obstacles) {
  static constexpr char kObstacles[] = {'@', 'T', 'O'};
  static constexpr char kFree[] = {'.', 'G'};
  std::vector<char> cells(static_cast<std::size_t>(h) * w);
  for (auto& c : cells) {
    c = testing::coin(rng, obstacles) ? kObstacles[testing::uniform(rng, 0, 2)]
                                      : kFree[testing::uniform(rng, 0, 1)];
  }
  if (std::none_of(cells.begin(), cells.end(), GridMap::is_passable)) cells.front() = '.';
  return GridMap(h, w, std::move(cells));
}

int error_line(std::string_view text) {
  try {
    parse_map(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

VertexId vertex_at(const TopologicalGraph& g, GridCell cell) {
  const auto& cells = g.layout()->cell_of_vertex;
  return static_cast<VertexId>(std::find(cells.begin(), cells.end(), cell) - cells.begin());
}

// Brute-force sight test: the closed segment between the two cell centres
// against every obstacle's closed square (doubled integer coordinates), by
// bounding-box overlap plus the sign of the line at the four corners.
bool reference_sight(const GridMap& m, GridCell a, GridCell b) {
  const std::int64_t x1 = 2 * std::int64_t{a.col} + 1, y1 = 2 * std::int64_t{a.row} + 1;
  const std::int64_t x2 = 2 * std::int64_t{b.col} + 1, y2 = 2 * std::int64_t{b.row} + 1;
  for (std::uint32_t r = 0; r < m.height(); ++r) {
    for (std::uint32_t c = 0; c < m.width(); ++c) {
      if (m.passable(r, c)) continue;
      const std::int64_t bx = 2 * std::int64_t{c}, by = 2 * std::int64_t{r};
      if (std::max(x1, x2) < bx || std::min(x1, x2) > bx + 2) continue;
      if (std::max(y1, y2) < by || std::min(y1, y2) > by + 2) continue;
      bool neg = false, pos = false;
      for (std::int64_t cx : {bx, bx + 2}) {
        for (std::int64_t cy : {by, by + 2}) {
          const std::int64_t side = (x2 - x1) * (cy - y1) - (y2 - y1) * (cx - x1);
          neg |= side <= 0;
          pos |= side >= 0;
        }
      }
      if (neg && pos) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("parse a small map") {
  const GridMap m = parse_map("type octile\nheight 2\nwidth 2\nmap\n..\n.@\n");
  CHECK(m.height() == 2);
  CHECK(m.width() == 2);
  CHECK(m.passable_count() == 3);
  CHECK_FALSE(m.passable(1, 1));
  CHECK(m.terrain(1, 1) == '@');
}

TEST_CASE("width may precede height and CRLF is accepted") {
  const GridMap m = parse_map("type octile\r\nwidth 3\r\nheight 1\r\nmap\r\n.T.\r\n");
  CHECK(m.height() == 1);
  CHECK(m.width() == 3);
  CHECK(m.passable_count() == 2);
}

TEST_CASE("parser diagnostics carry line numbers") {
  CHECK(error_line("type octile\nheight 2\nwidth 3\nmap\n...\n..\n") == 6);
  CHECK(error_line("type octile\nheight 2\nwidth 2\nmap\n..\n.x\n") == 6);
  CHECK(error_line("type grid\nheight 1\nwidth 1\nmap\n.\n") == 1);
  CHECK(error_line("type octile\nheight 0\nwidth 1\nmap\n") == 2);
  CHECK(error_line("type octile\nheight 1\nheight 1\nmap\n.\n") == 3);
  // A missing row is reported on the line where it was expected.
  CHECK(error_line("type octile\nheight 2\nwidth 1\nmap\n.\n") == 6);
  CHECK(error_line("type octile\nheight 1\nwidth 2\nmap\n@T\n") != 0);
  CHECK(error_line("type octile\nheight 1\nwidth 1\nmap\n.\n.\n") == 6);
  CHECK(error_line("type octile\nheight 1\nwidth 1\nlegend\n.\n") == 4);
  CHECK(error_line("") == 1);
  CHECK(error_line("type octile\nheight 1\nwidth 1\nmap\n.\n\n") == 0);
}

TEST_CASE("round trip of all terrain classes") {
  const std::string text = "type octile\nheight 2\nwidth 5\nmap\n.G@TO\nO.T@G\n";
  const GridMap m = parse_map(text);
  CHECK(format_map(m) == text);
  CHECK(m.passable_count() == 4);
}

TEST_CASE("random maps round trip exactly") {
  testing::Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const auto m = random_map(rng, testing::uniform(rng, 1, 12), testing::uniform(rng, 1, 12), 0.4);
    const std::string text = format_map(m);
    const GridMap back = parse_map(text);
    REQUIRE(back.height() == m.height());
    REQUIRE(back.width() == m.width());
    CHECK(format_map(back) == text);
  }
}

TEST_CASE("the 32x32 maze fixture") {
  const GridMap m = load_map(std::string(CMAPF_TEST_DATA) + "/maze-32-32-2.map");
  CHECK(m.height() == 32);
  CHECK(m.width() == 32);
  CHECK(m.passable_count() == 508);
  const auto text = format_map(m);
  CHECK(format_map(parse_map(text)) == text);
  CHECK_THROWS_AS(load_map(std::string(CMAPF_TEST_DATA) + "/missing.map"), std::runtime_error);
}

TEST_CASE("distance communication on a 3x1 corridor") {
  const GridMap m = from_rows({".", ".", "."});
  DiscretizeOptions opts;
  opts.comm = {CommKind::distance, 1.0 / 3.0};
  const auto g = discretize(m, opts);
  CHECK(g.vertex_count() == 3);
  CHECK(g.communicates(0, 1));
  CHECK(g.communicates(1, 2));
  CHECK_FALSE(g.communicates(0, 2));
  CHECK(g.can_move(0, 1));
  CHECK_FALSE(g.can_move(0, 2));
}

TEST_CASE("line of sight on an open 3x3 map is complete") {
  const GridMap m = from_rows({"...", "...", "..."});
  const auto g = discretize(m, {{CommKind::line_of_sight}, {}, false});
  for (VertexId u = 0; u < 9; ++u) {
    for (VertexId v = 0; v < 9; ++v) {
      if (u != v) CHECK(g.communicates(u, v));
    }
  }
}

TEST_CASE("a centre obstacle blocks the diagonals") {
  const GridMap m = from_rows({"...", ".@.", "..."});
  const auto g = discretize(m, {{CommKind::line_of_sight}, {}, false});
  CHECK(g.vertex_count() == 8);
  const auto nw = vertex_at(g, {0, 0}), se = vertex_at(g, {2, 2});
  const auto ne = vertex_at(g, {0, 2}), sw = vertex_at(g, {2, 0});
  CHECK_FALSE(g.communicates(nw, se));
  CHECK_FALSE(g.communicates(ne, sw));
  CHECK(g.communicates(nw, ne));
  CHECK_FALSE(line_of_sight(m, {0, 1}, {2, 1}));
  CHECK(line_of_sight(m, {0, 0}, {0, 2}));
}

TEST_CASE("no corner cutting unless requested") {
  const GridMap m = from_rows({".@", ".."});
  const auto strict = discretize(m, {});
  CHECK_FALSE(strict.can_move(vertex_at(strict, {0, 0}), vertex_at(strict, {1, 1})));
  const auto cut = discretize(m, {{}, {}, true});
  CHECK(cut.can_move(vertex_at(cut, {0, 0}), vertex_at(cut, {1, 1})));
}

TEST_CASE("base selection") {
  const GridMap m = from_rows({"@..", "..."});
  CHECK(discretize(m, {}).base() == vertex_at(discretize(m, {}), {0, 1}));
  CHECK(discretize(m, {{}, GridCell{1, 2}, false}).base() == 4);
  CHECK_THROWS_AS(discretize(m, {{}, GridCell{0, 0}, false}), std::invalid_argument);
  CHECK_THROWS_AS(discretize(m, {{CommKind::distance, 0.0}, {}, false}), std::invalid_argument);
}

TEST_CASE("default range fractions by map family") {
  CHECK(default_range_fraction("maze-32-32-2") == doctest::Approx(1.0 / 6.0));
  CHECK(default_range_fraction("coast") == doctest::Approx(0.25));
  CHECK(default_range_fraction("office-1") == doctest::Approx(0.09));
  CHECK(default_range_fraction("open") == doctest::Approx(0.08));
  CHECK_FALSE(default_range_fraction("random"));
}

TEST_CASE("discretized graphs are symmetric and respect terrain") {
  testing::Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const auto m = random_map(rng, testing::uniform(rng, 1, 7), testing::uniform(rng, 1, 7), 0.3);
    const bool los = testing::coin(rng, 0.5);
    DiscretizeOptions opts;
    opts.comm = {los ? CommKind::line_of_sight : CommKind::distance, 0.3};
    const auto g = discretize(m, opts);
    REQUIRE(g.vertex_count() == m.passable_count());
    const auto& cells = g.layout()->cell_of_vertex;
    for (VertexId u = 0; u < g.vertex_count(); ++u) {
      CHECK(m.passable(cells[u].row, cells[u].col));
      for (VertexId v = 0; v < g.vertex_count(); ++v) {
        CHECK(g.communicates(u, v) == g.communicates(v, u));
        CHECK(g.can_move(u, v) == g.can_move(v, u));
        if (u == v) continue;
        const std::int64_t dr = std::int64_t{cells[u].row} - cells[v].row;
        const std::int64_t dc = std::int64_t{cells[u].col} - cells[v].col;
        if (los) {
          CHECK(g.communicates(u, v) == line_of_sight(m, cells[u], cells[v]));
          CHECK(line_of_sight(m, cells[u], cells[v]) == line_of_sight(m, cells[v], cells[u]));
        } else {
          const double range = 0.3 * std::max(m.height(), m.width());
          CHECK(g.communicates(u, v) == (static_cast<double>(dr * dr + dc * dc) <= range * range));
        }
        const bool adjacent = std::max(std::abs(dr), std::abs(dc)) == 1;
        const bool corner_free = dr == 0 || dc == 0 ||
                                 (m.passable(cells[u].row, cells[v].col) &&
                                  m.passable(cells[v].row, cells[u].col));
        CHECK(g.can_move(u, v) == (adjacent && corner_free));
      }
    }
  }
}

TEST_CASE("line of sight matches a brute-force segment test") {
  testing::Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const auto m = random_map(rng, testing::uniform(rng, 1, 9), testing::uniform(rng, 1, 9), 0.25);
    for (int j = 0; j < 20; ++j) {
      const GridCell a{testing::uniform(rng, 0, m.height() - 1), testing::uniform(rng, 0, m.width() - 1)};
      const GridCell b{testing::uniform(rng, 0, m.height() - 1), testing::uniform(rng, 0, m.width() - 1)};
      if (!m.passable(a.row, a.col) || !m.passable(b.row, b.col)) continue;
      CHECK(line_of_sight(m, a, b) == reference_sight(m, a, b));
    }
  }
}

TEST_CASE("a range spanning the diagonal gives complete communication") {
  const GridMap m = from_rows({"..@.", "....", "@..."});
  const auto g = discretize(m, {{CommKind::distance, 2.0}, {}, false});
  for (VertexId u = 0; u < g.vertex_count(); ++u) {
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      if (u != v) CHECK(g.communicates(u, v));
    }
  }
}

TEST_CASE("instance generation") {
  const auto g = std::make_shared<const TopologicalGraph>(
      discretize(load_map(std::string(CMAPF_TEST_DATA) + "/maze-32-32-2.map"),
                 {{CommKind::distance, 1.0 / 6.0}, {}, false}));
  for (Sampler sampler : {Sampler::rejection, Sampler::grow, Sampler::walk}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const std::size_t k = 1 + seed % 4;
      const Instance a = generate_instance(g, k, seed, sampler, 50);
      const Instance b = generate_instance(g, k, seed, sampler, 50);
      CHECK(a.start == b.start);
      CHECK(a.goal == b.goal);
      CHECK(a.agent_count() == k);
      CHECK(is_connected(*g, a.start));
      CHECK(is_connected(*g, a.goal));
    }
  }
  CHECK(generate_instance(g, 3, 1).start != generate_instance(g, 3, 2).start);
}

TEST_CASE("rejection sampling stays where the base is heard") {
  // Only vertices 0 (the base) and 1 communicate; 2 and 3 are silent.
  const std::vector<Edge> mvt{{0, 1}, {1, 2}, {2, 3}};
  const std::vector<Edge> comm{{0, 1}};
  const auto g = std::make_shared<const TopologicalGraph>(4, 0, mvt, comm);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Instance inst = generate_instance(g, 2, seed);
    for (VertexId v : inst.start) CHECK(v <= 1);
    for (VertexId v : inst.goal) CHECK(v <= 1);
  }
}
