#include "cmapf/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace cmapf {

namespace {

constexpr const char* kPalette[] = {"#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4",
                                    "#42d4f4", "#f032e6", "#9a6324", "#469990", "#800000"};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

const char* colour(std::size_t agent) { return kPalette[agent % std::size(kPalette)]; }

}  // namespace

std::vector<std::pair<double, double>> spring_layout(const TopologicalGraph& graph,
                                                     std::uint64_t seed) {
  const std::uint32_t n = graph.vertex_count();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<double, double>> pos(n);
  for (auto& p : pos) p = {unit(rng), unit(rng)};
  if (n == 1) return {{0.5, 0.5}};

  // Fruchterman-Reingold with linear cooling; both relations attract.
  const double k = std::sqrt(1.0 / n);
  double temperature = 0.1;
  std::vector<std::pair<double, double>> disp(n);
  for (int iter = 0; iter < 300; ++iter) {
    std::fill(disp.begin(), disp.end(), std::pair{0.0, 0.0});
    for (VertexId u = 0; u < n; ++u) {
      for (VertexId v = u + 1; v < n; ++v) {
        double dx = pos[u].first - pos[v].first, dy = pos[u].second - pos[v].second;
        const double d = std::max(1e-6, std::hypot(dx, dy));
        const double f = k * k / d;
        disp[u].first += dx / d * f;
        disp[u].second += dy / d * f;
        disp[v].first -= dx / d * f;
        disp[v].second -= dy / d * f;
      }
    }
    auto attract = [&](VertexId u, VertexId v) {
      if (u >= v) return;
      double dx = pos[u].first - pos[v].first, dy = pos[u].second - pos[v].second;
      const double d = std::max(1e-6, std::hypot(dx, dy));
      const double f = d * d / k;
      disp[u].first -= dx / d * f;
      disp[u].second -= dy / d * f;
      disp[v].first += dx / d * f;
      disp[v].second += dy / d * f;
    };
    for (VertexId u = 0; u < n; ++u) {
      for (VertexId v : graph.movement_neighbors(u)) attract(u, v);
      for (VertexId v : graph.comm_neighbors(u)) attract(u, v);
    }
    for (VertexId u = 0; u < n; ++u) {
      const double d = std::max(1e-9, std::hypot(disp[u].first, disp[u].second));
      const double step = std::min(d, temperature);
      pos[u].first += disp[u].first / d * step;
      pos[u].second += disp[u].second / d * step;
    }
    temperature = std::max(0.002, temperature * 0.98);
  }

  double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
  for (const auto& [x, y] : pos) {
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
    min_y = std::min(min_y, y);
    max_y = std::max(max_y, y);
  }
  const double span = std::max({max_x - min_x, max_y - min_y, 1e-9});
  for (auto& [x, y] : pos) {
    x = (x - min_x) / span;
    y = (y - min_y) / span;
  }
  return pos;
}

std::string render_svg(const Instance& instance, const Execution* execution,
                       const RenderOptions& options, std::vector<std::string>* warnings) {
  const TopologicalGraph& graph = *instance.graph;
  const auto& layout = graph.layout();
  const bool grid = layout.has_value();
  if (!grid && warnings) warnings->push_back("graph has no grid metadata; using a spring layout");

  std::vector<std::pair<double, double>> point(graph.vertex_count());
  double width, height;
  const double margin = grid ? 0.0 : 30.0;
  if (grid) {
    const double s = options.cell_size;
    width = layout->width * s;
    height = layout->height * s;
    for (VertexId v = 0; v < graph.vertex_count(); ++v) {
      point[v] = {(layout->cell_of_vertex[v].col + 0.5) * s, (layout->cell_of_vertex[v].row + 0.5) * s};
    }
  } else {
    const double extent = 400;
    width = height = extent + 2 * margin;
    const auto unit = spring_layout(graph, options.layout_seed);
    for (VertexId v = 0; v < graph.vertex_count(); ++v) {
      point[v] = {margin + unit[v].first * extent, margin + unit[v].second * extent};
    }
  }

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
      << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(height) << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
      << "\" fill=\"white\"/>\n";

  auto line = [&](VertexId u, VertexId v, const char* cls, const char* style) {
    svg << "<line class=\"" << cls << "\" x1=\"" << fmt(point[u].first) << "\" y1=\""
        << fmt(point[u].second) << "\" x2=\"" << fmt(point[v].first) << "\" y2=\""
        << fmt(point[v].second) << "\" " << style << "/>\n";
  };

  if (grid) {
    const double s = options.cell_size;
    std::vector<char> open(static_cast<std::size_t>(layout->height) * layout->width, 0);
    for (const GridCell& c : layout->cell_of_vertex) open[c.row * layout->width + c.col] = 1;
    svg << "<g class=\"obstacles\" fill=\"black\">\n";
    for (std::uint32_t r = 0; r < layout->height; ++r) {
      for (std::uint32_t c = 0; c < layout->width; ++c) {
        if (open[r * layout->width + c]) continue;
        svg << "<rect class=\"obstacle\" x=\"" << fmt(c * s) << "\" y=\"" << fmt(r * s) << "\" width=\"" << fmt(s)
            << "\" height=\"" << fmt(s) << "\"/>\n";
      }
    }
    svg << "</g>\n";
  } else {
    svg << "<g class=\"movement\">\n";
    for (VertexId u = 0; u < graph.vertex_count(); ++u) {
      for (VertexId v : graph.movement_neighbors(u)) {
        if (u < v) line(u, v, "mvt", "stroke=\"#444\" stroke-width=\"2\"");
      }
    }
    svg << "</g>\n<g class=\"communication\">\n";
    for (VertexId u = 0; u < graph.vertex_count(); ++u) {
      for (VertexId v : graph.comm_neighbors(u)) {
        if (u < v) line(u, v, "comm", "stroke=\"#888\" stroke-width=\"1.5\" stroke-dasharray=\"3,4\"");
      }
    }
    svg << "</g>\n<g class=\"nodes\">\n";
    for (VertexId v = 0; v < graph.vertex_count(); ++v) {
      svg << "<circle class=\"node\" cx=\"" << fmt(point[v].first) << "\" cy=\""
          << fmt(point[v].second) << "\" r=\"10\" fill=\"#eee\" stroke=\"#222\"/>\n"
          << "<text x=\"" << fmt(point[v].first) << "\" y=\"" << fmt(point[v].second + 4)
          << "\" font-size=\"10\" text-anchor=\"middle\">"
          << (v == graph.base() ? std::string("B") : std::to_string(v)) << "</text>\n";
    }
    svg << "</g>\n";
  }

  if (execution && options.comm_step && *options.comm_step < execution->length()) {
    const Configuration c = execution->at(*options.comm_step);
    std::vector<VertexId> occupied(c.begin(), c.end());
    occupied.push_back(graph.base());
    std::sort(occupied.begin(), occupied.end());
    occupied.erase(std::unique(occupied.begin(), occupied.end()), occupied.end());
    svg << "<g class=\"step-communication\">\n";
    for (std::size_t i = 0; i < occupied.size(); ++i) {
      for (std::size_t j = i + 1; j < occupied.size(); ++j) {
        if (graph.communicates(occupied[i], occupied[j])) {
          line(occupied[i], occupied[j], "step-comm",
               "stroke=\"#0a0\" stroke-width=\"1.5\" stroke-dasharray=\"2,3\"");
        }
      }
    }
    svg << "</g>\n";
  }

  const double marker = grid ? options.cell_size * 0.8 : 26;
  const auto [bx, by] = point[graph.base()];
  svg << "<rect class=\"base\" x=\"" << fmt(bx - marker / 2) << "\" y=\"" << fmt(by - marker / 2)
      << "\" width=\"" << fmt(marker) << "\" height=\"" << fmt(marker)
      << "\" fill=\"none\" stroke=\"red\" stroke-width=\"2\"/>\n";

  const std::size_t k = instance.agent_count();
  const double jitter = grid ? options.cell_size * 0.12 : 3.0;
  auto offset = [&](std::size_t a) {
    const double angle = 2 * M_PI * static_cast<double>(a) / std::max<std::size_t>(k, 1);
    return std::pair{k > 1 ? jitter * std::cos(angle) : 0.0, k > 1 ? jitter * std::sin(angle) : 0.0};
  };
  if (execution) {
    svg << "<g class=\"paths\" fill=\"none\" stroke-width=\"2\">\n";
    for (std::size_t a = 0; a < execution->agent_count(); ++a) {
      const auto [ox, oy] = offset(a);
      svg << "<polyline class=\"agent-path\" data-agent=\"" << a << "\" stroke=\"" << colour(a)
          << "\" points=\"";
      const Path& p = execution->path(static_cast<AgentId>(a));
      for (std::size_t t = 0; t < p.size(); ++t) {
        svg << (t ? " " : "") << fmt(point[p[t]].first + ox) << ',' << fmt(point[p[t]].second + oy);
      }
      svg << "\"/>\n";
    }
    svg << "</g>\n";
  }
  svg << "<g class=\"agents\">\n";
  for (std::size_t a = 0; a < k; ++a) {
    const auto [ox, oy] = offset(a);
    const auto [sx, sy] = point[instance.start[a]];
    const auto [gx, gy] = point[instance.goal[a]];
    const double r = grid ? options.cell_size * 0.25 : 5;
    svg << "<circle class=\"start\" cx=\"" << fmt(sx + ox) << "\" cy=\"" << fmt(sy + oy)
        << "\" r=\"" << fmt(r) << "\" fill=\"" << colour(a) << "\"/>\n"
        << "<circle class=\"goal\" cx=\"" << fmt(gx + ox) << "\" cy=\"" << fmt(gy + oy)
        << "\" r=\"" << fmt(r) << "\" fill=\"white\" stroke=\"" << colour(a) << "\" stroke-width=\"2\"/>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace cmapf
