#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "cmapf/ccbs.hpp"
#include "cmapf/graph.hpp"
#include "cmapf/parse_error.hpp"

namespace cmapf {

// Text formats. Ids and time steps are 0-based; '#' starts a comment and
// blank lines are ignored. Parse failures throw ParseError.
//
//   cmapf-graph v1            cmapf-instance v1
//   vertices N                graph <path> | graph inline ... end graph
//   base B                    agents k
//   [grid H W]                start v_1 ... v_k
//   [coord v row col]         goal v_1 ... v_k
//   mvt u v
//   comm u v
//
//   cmapf-solution v1
//   outcome solved|exhausted|limit_reached
//   agents k                  (solved only)
//   path v_0 v_1 ...          (one per agent)
//   cost C
//   stats key=value ...

std::string format_graph(const TopologicalGraph& graph);
TopologicalGraph parse_graph(std::string_view text);

/// Relative graph paths are resolved against `base_dir`.
Instance parse_instance(std::string_view text, const std::filesystem::path& base_dir = {});
/// Embeds the graph inline unless `graph_ref` names a graph file.
std::string format_instance(const Instance& instance,
                            const std::optional<std::string>& graph_ref = std::nullopt);

struct SolutionRecord {
  Outcome outcome = Outcome::exhausted;
  std::optional<Execution> execution;
  std::uint32_t cost = 0;
};

std::string format_solution(const Solution& solution);
SolutionRecord parse_solution(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

TopologicalGraph load_graph(const std::filesystem::path& path);
Instance load_instance(const std::filesystem::path& path);
SolutionRecord load_solution(const std::filesystem::path& path);

}  // namespace cmapf
