#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmapf/ccbs.hpp"
#include "cmapf/graph.hpp"
#include "cmapf/grid.hpp"

namespace cmapf {

enum class Algo { ccbs, astar_od, oracle };

/// A named solver configuration. Names: "ccbs-<strategies>" with strategy
/// letters from {n, s, o} (e.g. "ccbs-nso", "ccbs-so"), optional suffixes
/// "-ps" (partial splitting), "-nobypass" and "-nodedup" (keep duplicate
/// constraint sets); "astar-od"; "oracle".
struct AlgoSpec {
  std::string name;
  Algo algo = Algo::ccbs;
  SolverConfig config;
};

/// Throws std::invalid_argument on unknown names.
AlgoSpec parse_algo_spec(std::string_view name);

struct RunLimits {
  std::optional<std::chrono::milliseconds> time_limit;
  std::optional<std::uint64_t> node_limit;
};

/// Solves with the given algorithm. The oracle reports unsolvable instances as
/// exhausted and oversized ones as limit_reached.
Solution run_algo(const AlgoSpec& spec, const Instance& instance, const RunLimits& limits);

struct BenchMap {
  std::string name;
  std::string comm_model;  // label written to the CSV
  std::shared_ptr<const TopologicalGraph> graph;
};

struct BenchPlan {
  std::vector<BenchMap> maps;
  std::vector<AlgoSpec> algos;
  std::vector<std::size_t> agent_counts;
  std::size_t instances_per_point = 1;
  std::uint64_t seed = 0;
  RunLimits limits;
  /// Applied to A*-OD on top of `limits` to bound its memory.
  std::optional<std::uint64_t> astar_node_limit = 4'000'000;
  Sampler sampler = Sampler::rejection;
  std::uint32_t walk_steps = kDefaultWalkSteps;
};

struct BenchRow {
  std::string map;
  std::string comm_model;
  std::size_t agents = 0;
  std::string algo;
  std::uint64_t instance_seed = 0;
  std::string outcome;  // solved, exhausted, limit_reached or error
  std::uint32_t cost = 0;
  std::uint64_t nodes_generated = 0;
  std::uint64_t nodes_expanded = 0;
  std::uint64_t lowlevel_calls = 0;
  double wall_ms = 0;
  std::optional<Execution> witness;  // not written to the CSV
  std::string error;                 // not written to the CSV
};

/// Seed of the i-th instance for a given map index and agent count.
std::uint64_t instance_seed(std::uint64_t base_seed, std::size_t map_index, std::size_t agents,
                            std::size_t index);

/// Worker count from CMAPF_THREADS, else the hardware concurrency (at least 1).
unsigned bench_threads();

/// Rows ordered by (map, agents, instance, algo) regardless of `threads`.
/// Instance generation or solver failures become rows with outcome "error".
std::vector<BenchRow> run_bench(const BenchPlan& plan, unsigned threads,
                                const std::function<void(const BenchRow&)>& on_row = {});

/// Runs every algorithm on pre-built instances; rows ordered by (instance, algo).
std::vector<BenchRow> run_bench_instances(const std::vector<std::pair<std::string, Instance>>& instances,
                                          const std::vector<AlgoSpec>& algos,
                                          const RunLimits& limits, unsigned threads);

std::string bench_csv_header();
std::string bench_csv_row(const BenchRow& row);
std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace cmapf
