#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmapf/graph.hpp"

namespace cmapf {

struct RenderOptions {
  double cell_size = 16;  // pixels per grid cell
  /// Draws communication edges between occupied vertices at this step.
  std::optional<TimeStep> comm_step;
  std::uint64_t layout_seed = 1;
};

/// Deterministic force-directed layout in the unit square, one point per vertex.
std::vector<std::pair<double, double>> spring_layout(const TopologicalGraph& graph,
                                                     std::uint64_t seed);

/// Static SVG of the instance and, when given, one polyline per agent path.
/// Grid-derived graphs are drawn on their grid with obstacles filled; other
/// graphs use spring_layout and draw communication edges dotted. A warning is
/// appended to `warnings` when falling back to the abstract layout.
std::string render_svg(const Instance& instance, const Execution* execution,
                       const RenderOptions& options, std::vector<std::string>* warnings = nullptr);

}  // namespace cmapf
