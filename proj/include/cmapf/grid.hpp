#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cmapf/graph.hpp"
#include "cmapf/parse_error.hpp"

namespace cmapf {

/// Row-major grid of Moving-AI terrain characters. '.' and 'G' are passable;
/// '@', 'T' and 'O' are obstacles.
class GridMap {
 public:
  GridMap(std::uint32_t height, std::uint32_t width, std::vector<char> cells);

  std::uint32_t height() const { return height_; }
  std::uint32_t width() const { return width_; }
  char terrain(std::uint32_t row, std::uint32_t col) const { return cells_[row * width_ + col]; }
  bool passable(std::uint32_t row, std::uint32_t col) const {
    return is_passable(terrain(row, col));
  }
  bool in_bounds(std::int64_t row, std::int64_t col) const {
    return row >= 0 && col >= 0 && row < height_ && col < width_;
  }
  std::size_t passable_count() const;

  static bool is_passable(char terrain) { return terrain == '.' || terrain == 'G'; }
  static bool is_known(char terrain);

 private:
  std::uint32_t height_;
  std::uint32_t width_;
  std::vector<char> cells_;
};

GridMap parse_map(std::string_view text);
GridMap load_map(const std::filesystem::path& path);
/// Inverse of parse_map for well-formed maps.
std::string format_map(const GridMap& map);

enum class CommKind { distance, line_of_sight };

struct CommModel {
  CommKind kind = CommKind::distance;
  /// Range as a fraction of max(width, height); distance model only.
  double range_fraction = 0.25;
};

/// Range fractions used for the standard benchmark maps, matched on a
/// substring of the map name ("coast", "maze", "office", "open").
std::optional<double> default_range_fraction(std::string_view map_name);

struct DiscretizeOptions {
  CommModel comm;
  /// Defaults to the first passable cell in row-major order.
  std::optional<GridCell> base;
  bool corner_cutting = false;
};

/// One vertex per passable cell (row-major order) with 8-way movement and
/// communication edges from `options.comm`. Throws std::invalid_argument when
/// the base cell is not passable or the range is not positive.
TopologicalGraph discretize(const GridMap& map, const DiscretizeOptions& options);

/// Symmetric supercover test: true iff every cell touched by the segment
/// between the two cell centres is passable.
bool line_of_sight(const GridMap& map, GridCell from, GridCell to);

enum class Sampler {
  rejection,  // uniform configurations until connected
  grow,       // each agent drawn uniformly among vertices seeing the placed ones
  walk,       // grow start; goal at the end of a random connected joint walk
};

/// Number of joint steps taken by Sampler::walk.
inline constexpr std::uint32_t kDefaultWalkSteps = 1000;

inline constexpr std::uint64_t kMaxRejections = 1'000'000;

/// Random instance with connected start and goal configurations; deterministic
/// for a given seed. Throws std::runtime_error when rejection sampling exceeds
/// kMaxRejections for either configuration. Only Sampler::walk guarantees a
/// solvable instance.
Instance generate_instance(std::shared_ptr<const TopologicalGraph> graph, std::size_t agents,
                           std::uint64_t seed, Sampler sampler = Sampler::rejection,
                           std::uint32_t walk_steps = kDefaultWalkSteps);

}  // namespace cmapf
