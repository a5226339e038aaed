#include "cmapf/grid.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace cmapf {

GridMap::GridMap(std::uint32_t height, std::uint32_t width, std::vector<char> cells)
    : height_(height), width_(width), cells_(std::move(cells)) {
  if (height == 0 || width == 0) throw std::invalid_argument("grid dimensions must be positive");
  if (cells_.size() != static_cast<std::size_t>(height) * width) {
    throw std::invalid_argument("cell count does not match height * width");
  }
  for (char c : cells_) {
    if (!is_known(c)) throw std::invalid_argument(std::string("unknown terrain '") + c + "'");
  }
  if (passable_count() == 0) throw std::invalid_argument("grid has no passable cell");
}

bool GridMap::is_known(char terrain) {
  switch (terrain) {
    case '.':
    case 'G':
    case '@':
    case 'T':
    case 'O':
      return true;
    default:
      return false;
  }
}

std::size_t GridMap::passable_count() const {
  return static_cast<std::size_t>(std::count_if(cells_.begin(), cells_.end(), is_passable));
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string_view> words(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::uint32_t parse_dimension(std::string_view token, std::size_t line_no) {
  std::uint32_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || value == 0) {
    throw ParseError(line_no, "expected a positive integer, got '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

GridMap parse_map(std::string_view text) {
  const auto lines = split_lines(text);
  std::size_t i = 0;
  auto line_at = [&](std::size_t idx) -> std::string_view {
    if (idx >= lines.size()) {
      throw ParseError(idx + 1, "unexpected end of file");
    }
    return lines[idx];
  };

  {
    const auto w = words(line_at(i));
    if (w.size() != 2 || w[0] != "type") throw ParseError(i + 1, "expected 'type octile'");
    if (w[1] != "octile") {
      throw ParseError(i + 1, "unsupported map type '" + std::string(w[1]) + "'");
    }
    ++i;
  }
  std::optional<std::uint32_t> height, width;
  while (!height || !width) {
    const auto w = words(line_at(i));
    if (w.size() == 2 && w[0] == "height" && !height) {
      height = parse_dimension(w[1], i + 1);
    } else if (w.size() == 2 && w[0] == "width" && !width) {
      width = parse_dimension(w[1], i + 1);
    } else {
      throw ParseError(i + 1, height ? "expected 'width W'" : "expected 'height H'");
    }
    ++i;
  }
  if (words(line_at(i)) != std::vector<std::string_view>{"map"}) {
    throw ParseError(i + 1, "expected 'map'");
  }
  ++i;

  std::vector<char> cells;
  cells.reserve(static_cast<std::size_t>(*height) * *width);
  for (std::uint32_t row = 0; row < *height; ++row, ++i) {
    const std::string_view line = line_at(i);
    if (line.size() != *width) {
      throw ParseError(i + 1, "row " + std::to_string(row) + " has " +
                                  std::to_string(line.size()) + " cells, expected " +
                                  std::to_string(*width));
    }
    for (std::size_t col = 0; col < line.size(); ++col) {
      if (!GridMap::is_known(line[col])) {
        throw ParseError(i + 1, std::string("unknown cell character '") + line[col] +
                                    "' at column " + std::to_string(col));
      }
    }
    cells.insert(cells.end(), line.begin(), line.end());
  }
  for (; i < lines.size(); ++i) {
    if (!words(lines[i]).empty()) throw ParseError(i + 1, "unexpected content after map rows");
  }
  if (std::none_of(cells.begin(), cells.end(), GridMap::is_passable)) {
    throw ParseError(5, "map has no passable cell");
  }
  return GridMap(*height, *width, std::move(cells));
}

GridMap load_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open map file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_map(buffer.str());
}

std::string format_map(const GridMap& map) {
  std::string out = "type octile\nheight " + std::to_string(map.height()) + "\nwidth " +
                    std::to_string(map.width()) + "\nmap\n";
  for (std::uint32_t r = 0; r < map.height(); ++r) {
    for (std::uint32_t c = 0; c < map.width(); ++c) out += map.terrain(r, c);
    out += '\n';
  }
  return out;
}

std::optional<double> default_range_fraction(std::string_view map_name) {
  std::string lower(map_name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower.find("coast") != std::string::npos) return 0.25;
  if (lower.find("maze") != std::string::npos) return 1.0 / 6.0;
  if (lower.find("office") != std::string::npos) return 0.09;
  if (lower.find("open") != std::string::npos) return 0.08;
  return std::nullopt;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

}  // namespace

bool line_of_sight(const GridMap& map, GridCell from, GridCell to) {
  // Doubled coordinates: cell (r, c) spans [2c, 2c+2] x [2r, 2r+2] and its
  // centre is (2c+1, 2r+1). A cell is touched when the closed segment meets
  // the closed square, so passing exactly through a corner touches all four.
  std::int64_t x1 = 2 * std::int64_t{from.col} + 1, y1 = 2 * std::int64_t{from.row} + 1;
  std::int64_t x2 = 2 * std::int64_t{to.col} + 1, y2 = 2 * std::int64_t{to.row} + 1;
  if (x1 > x2 || (x1 == x2 && y1 > y2)) {
    std::swap(x1, x2);
    std::swap(y1, y2);
  }
  const std::int64_t dx = x2 - x1;
  const std::int64_t dy = y2 - y1;
  const std::int64_t c_lo = (x1 - 1) / 2, c_hi = (x2 - 1) / 2;
  for (std::int64_t c = c_lo; c <= c_hi; ++c) {
    std::int64_t r_lo, r_hi;
    if (dx == 0) {
      r_lo = (std::min(y1, y2) - 1) / 2;
      r_hi = (std::max(y1, y2) - 1) / 2;
    } else {
      const std::int64_t xa = std::max(2 * c, x1), xb = std::min(2 * c + 2, x2);
      // y scaled by dx at both ends of the column slice.
      const std::int64_t ya = y1 * dx + (xa - x1) * dy;
      const std::int64_t yb = y1 * dx + (xb - x1) * dy;
      const std::int64_t lo = std::min(ya, yb), hi = std::max(ya, yb);
      r_lo = ceil_div(lo - 2 * dx, 2 * dx);
      r_hi = floor_div(hi, 2 * dx);
    }
    r_lo = std::max<std::int64_t>(r_lo, 0);
    r_hi = std::min<std::int64_t>(r_hi, map.height() - 1);
    for (std::int64_t r = r_lo; r <= r_hi; ++r) {
      if (!map.in_bounds(r, c) || !map.passable(static_cast<std::uint32_t>(r),
                                                 static_cast<std::uint32_t>(c))) {
        return false;
      }
    }
  }
  return true;
}

TopologicalGraph discretize(const GridMap& map, const DiscretizeOptions& options) {
  const std::uint32_t h = map.height(), w = map.width();
  std::vector<std::uint32_t> id_of(static_cast<std::size_t>(h) * w, 0xFFFFFFFFu);
  GridLayout layout{h, w, {}};
  for (std::uint32_t r = 0; r < h; ++r) {
    for (std::uint32_t c = 0; c < w; ++c) {
      if (!map.passable(r, c)) continue;
      id_of[r * w + c] = static_cast<std::uint32_t>(layout.cell_of_vertex.size());
      layout.cell_of_vertex.push_back({r, c});
    }
  }
  const auto n = static_cast<std::uint32_t>(layout.cell_of_vertex.size());

  VertexId base = 0;
  if (options.base) {
    const GridCell b = *options.base;
    if (!map.in_bounds(b.row, b.col) || !map.passable(b.row, b.col)) {
      throw std::invalid_argument("base cell (" + std::to_string(b.row) + "," +
                                  std::to_string(b.col) + ") is not passable");
    }
    base = id_of[b.row * w + b.col];
  }

  std::vector<Edge> movement;
  for (VertexId v = 0; v < n; ++v) {
    const auto [r, c] = layout.cell_of_vertex[v];
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const std::int64_t nr = std::int64_t{r} + dr, nc = std::int64_t{c} + dc;
        if (!map.in_bounds(nr, nc) || !map.passable(nr, nc)) continue;
        if (dr != 0 && dc != 0 && !options.corner_cutting &&
            (!map.passable(nr, c) || !map.passable(r, nc))) {
          continue;
        }
        const VertexId u = id_of[nr * w + nc];
        if (v < u) movement.emplace_back(v, u);
      }
    }
  }

  std::vector<Edge> comm;
  if (options.comm.kind == CommKind::distance) {
    if (!(options.comm.range_fraction > 0)) {
      throw std::invalid_argument("communication range must be positive");
    }
    const double range = options.comm.range_fraction * std::max(h, w);
    const double limit = range * range + 1e-9;
    const auto reach = static_cast<std::int64_t>(std::floor(range));
    for (VertexId v = 0; v < n; ++v) {
      const auto [r, c] = layout.cell_of_vertex[v];
      for (std::int64_t dr = -reach; dr <= reach; ++dr) {
        for (std::int64_t dc = -reach; dc <= reach; ++dc) {
          if (static_cast<double>(dr * dr + dc * dc) > limit) continue;
          const std::int64_t nr = r + dr, nc = c + dc;
          if (!map.in_bounds(nr, nc) || !map.passable(nr, nc)) continue;
          const VertexId u = id_of[nr * w + nc];
          if (v < u) comm.emplace_back(v, u);
        }
      }
    }
  } else {
    for (VertexId v = 0; v < n; ++v) {
      for (VertexId u = v + 1; u < n; ++u) {
        if (line_of_sight(map, layout.cell_of_vertex[v], layout.cell_of_vertex[u])) {
          comm.emplace_back(v, u);
        }
      }
    }
  }
  return TopologicalGraph(n, base, movement, comm, std::move(layout));
}

Instance generate_instance(std::shared_ptr<const TopologicalGraph> graph, std::size_t agents,
                           std::uint64_t seed, Sampler sampler, std::uint32_t walk_steps) {
  if (agents == 0) throw std::invalid_argument("at least one agent is required");
  const TopologicalGraph& g = *graph;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<VertexId> pick(0, g.vertex_count() - 1);

  auto rejection = [&](const char* which) {
    Configuration c(agents);
    for (std::uint64_t tries = 0; tries < kMaxRejections; ++tries) {
      for (auto& v : c) v = pick(rng);
      if (is_connected(g, c)) return c;
    }
    throw std::runtime_error(std::string("no connected ") + which + " configuration for " +
                             std::to_string(agents) + " agents after " +
                             std::to_string(kMaxRejections) +
                             " rejections; try the grow sampler or a larger range");
  };
  auto grow = [&]() {
    std::vector<char> near(g.vertex_count(), 0);
    auto absorb = [&](VertexId v) {
      near[v] = 1;
      for (VertexId u : g.comm_neighbors(v)) near[u] = 1;
    };
    absorb(g.base());
    Configuration c;
    std::vector<VertexId> candidates;
    for (std::size_t a = 0; a < agents; ++a) {
      candidates.clear();
      for (VertexId v = 0; v < g.vertex_count(); ++v) {
        if (near[v]) candidates.push_back(v);
      }
      std::uniform_int_distribution<std::size_t> idx(0, candidates.size() - 1);
      const VertexId v = candidates[idx(rng)];
      c.push_back(v);
      absorb(v);
    }
    return c;
  };

  // Each step draws one movement neighbour per agent; disconnected draws are
  // retried a bounded number of times and the team idles otherwise.
  auto walk = [&](Configuration c) {
    Configuration next(agents);
    for (std::uint32_t step = 0; step < walk_steps; ++step) {
      for (int attempt = 0; attempt < 64; ++attempt) {
        for (std::size_t a = 0; a < agents; ++a) {
          const auto nbrs = g.movement_neighbors(c[a]);
          std::uniform_int_distribution<std::size_t> idx(0, nbrs.size() - 1);
          next[a] = nbrs[idx(rng)];
        }
        if (is_connected(g, next)) {
          c = next;
          break;
        }
      }
    }
    return c;
  };

  Instance instance{std::move(graph), {}, {}};
  switch (sampler) {
    case Sampler::rejection:
      instance.start = rejection("start");
      instance.goal = rejection("goal");
      break;
    case Sampler::grow:
      instance.start = grow();
      instance.goal = grow();
      break;
    case Sampler::walk:
      instance.start = grow();
      instance.goal = walk(instance.start);
      break;
  }
  return instance;
}

}  // namespace cmapf
