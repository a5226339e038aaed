#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmapf/bench.hpp"
#include "cmapf/ccbs.hpp"
#include "cmapf/grid.hpp"
#include "cmapf/io.hpp"
#include "cmapf/render.hpp"

namespace fs = std::filesystem;
using namespace cmapf;

namespace {

constexpr int kExitSolved = 0;
constexpr int kExitInputError = 1;
constexpr int kExitExhausted = 2;
constexpr int kExitLimit = 3;
constexpr int kExitInvalid = 4;

struct GridFlags {
  std::string comm = "distance";
  std::string range;
  std::string base;
  bool corner_cutting = false;

  void attach(CLI::App& cmd) {
    cmd.add_option("--comm", comm, "Communication model")->check(CLI::IsMember({"distance", "los"}));
    cmd.add_option("--range", range,
                   "Range as a fraction of max(width, height), e.g. 0.25 or 1/6 "
                   "(default: per map name, else 0.25)");
    cmd.add_option("--base", base, "Base cell as row,col (default: first passable cell)");
    cmd.add_flag("--corner-cutting", corner_cutting, "Allow diagonal moves past obstacle corners");
  }

  DiscretizeOptions options(const fs::path& map_path) const {
    DiscretizeOptions o;
    o.comm.kind = comm == "los" ? CommKind::line_of_sight : CommKind::distance;
    if (!range.empty()) {
      o.comm.range_fraction = parse_fraction(range);
    } else if (auto d = default_range_fraction(map_path.stem().string())) {
      o.comm.range_fraction = *d;
    }
    if (!base.empty()) {
      const auto comma = base.find(',');
      if (comma == std::string::npos) throw std::invalid_argument("--base expects row,col");
      o.base = GridCell{static_cast<std::uint32_t>(std::stoul(base.substr(0, comma))),
                        static_cast<std::uint32_t>(std::stoul(base.substr(comma + 1)))};
    }
    o.corner_cutting = corner_cutting;
    return o;
  }

  std::string label() const {
    if (comm == "los") return "los";
    return range.empty() ? "distance" : "distance:" + range;
  }

  static double parse_fraction(const std::string& text) {
    const auto slash = text.find('/');
    double value = slash == std::string::npos
                       ? std::stod(text)
                       : std::stod(text.substr(0, slash)) / std::stod(text.substr(slash + 1));
    if (!(value > 0 && value <= 1)) throw std::invalid_argument("--range must lie in (0, 1]");
    return value;
  }
};

std::shared_ptr<const TopologicalGraph> graph_from_map(const fs::path& path, const GridFlags& flags) {
  return std::make_shared<const TopologicalGraph>(discretize(load_map(path), flags.options(path)));
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
}

Sampler parse_sampler(const std::string& name) {
  if (name == "grow") return Sampler::grow;
  if (name == "walk") return Sampler::walk;
  return Sampler::rejection;
}

std::vector<std::size_t> parse_agent_counts(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    const auto dots = part.find("..");
    if (dots != std::string::npos) {
      const std::size_t lo = std::stoul(part.substr(0, dots)), hi = std::stoul(part.substr(dots + 2));
      if (lo == 0 || hi < lo) throw std::invalid_argument("bad agent range '" + part + "'");
      for (std::size_t k = lo; k <= hi; ++k) out.push_back(k);
    } else {
      const std::size_t k = std::stoul(part);
      if (k == 0) throw std::invalid_argument("agent counts must be positive");
      out.push_back(k);
    }
  }
  if (out.empty()) throw std::invalid_argument("no agent counts given");
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Connected multi-agent path finding: solvers, benchmarks and tools"};
  app.require_subcommand(1);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance and write a solution file");
  std::string solve_instance, solve_out, algo = "ccbs", strategies = "neg,self,other";
  bool bypass = true, partial_splitting = false, prune_duplicates = true;
  std::optional<std::uint64_t> node_limit;
  std::optional<std::uint64_t> time_limit_ms;
  solve_cmd->add_option("instance", solve_instance, "Instance file")->required();
  solve_cmd->add_option("--algo", algo, "Solver")->check(CLI::IsMember({"ccbs", "astar-od", "oracle"}));
  solve_cmd->add_option("--strategies", strategies, "CCBS strategies, e.g. neg,self,other");
  solve_cmd->add_flag("--bypass,!--no-bypass", bypass, "Enable the bypass rule (default on)");
  solve_cmd->add_flag("--prune-duplicates,!--no-prune-duplicates", prune_duplicates,
                      "Skip children whose constraint set is already in the tree (default on)");
  solve_cmd->add_flag("--partial-splitting", partial_splitting,
                      "Defer positive children of agents whose negative child got longer");
  solve_cmd->add_option("--node-limit", node_limit, "Maximum generated nodes");
  solve_cmd->add_option("--time-limit-ms", time_limit_ms, "Wall-clock limit in milliseconds");
  solve_cmd->add_option("-o,--out", solve_out, "Solution file (default: stdout)");

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "Build a graph from a grid map, optionally with a random instance");
  std::string gen_map, gen_out, gen_sampler = "rejection";
  std::optional<std::size_t> gen_agents;
  std::uint64_t gen_seed = 0;
  GridFlags gen_grid;
  gen_cmd->add_option("map", gen_map, "Moving-AI .map file")->required();
  gen_grid.attach(*gen_cmd);
  gen_cmd->add_option("--agents", gen_agents, "Agent count; omit to write only the graph");
  gen_cmd->add_option("--seed", gen_seed, "Instance seed");
  gen_cmd->add_option("--sampler", gen_sampler, "Instance sampler")
      ->check(CLI::IsMember({"rejection", "grow", "walk"}));
  std::uint32_t gen_walk_steps = kDefaultWalkSteps;
  gen_cmd->add_option("--walk-steps", gen_walk_steps, "Joint steps of the walk sampler");
  gen_cmd->add_option("-o,--out", gen_out, "Output file (default: stdout)");

  // check
  auto* check_cmd = app.add_subcommand("check", "Validate a solution against an instance");
  std::string check_instance, check_solution;
  check_cmd->add_option("instance", check_instance, "Instance file")->required();
  check_cmd->add_option("solution", check_solution, "Solution file")->required();

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark sweep and write CSV");
  std::vector<std::string> bench_maps;
  std::string bench_instances, bench_algos, bench_agents = "2..10", bench_out, bench_sampler = "rejection";
  std::size_t bench_count = 100;
  std::uint64_t bench_timeout_ms = 30000, bench_seed = 0;
  std::optional<std::uint64_t> bench_node_limit;
  GridFlags bench_grid;
  auto* maps_opt = bench_cmd->add_option("--map", bench_maps, "Moving-AI .map files");
  auto* inst_opt = bench_cmd->add_option("--instances", bench_instances,
                                         "Directory of instance files (*.inst)");
  maps_opt->excludes(inst_opt);
  bench_cmd->add_option("--algos", bench_algos,
                        "Comma list: ccbs-nso, ccbs-n, ccbs-so, ccbs-s, ...[-ps][-nobypass][-nodedup], "
                        "astar-od, oracle")
      ->required();
  bench_cmd->add_option("--agents", bench_agents, "Agent counts, e.g. 2..10 or 2,4,8");
  bench_cmd->add_option("--count", bench_count, "Instances per (map, agent count)");
  bench_cmd->add_option("--timeout-ms", bench_timeout_ms, "Per-instance wall-clock limit");
  bench_cmd->add_option("--seed", bench_seed, "Base seed");
  bench_cmd->add_option("--node-limit", bench_node_limit, "Maximum generated nodes per run");
  bench_cmd->add_option("--sampler", bench_sampler, "Instance sampler")
      ->check(CLI::IsMember({"rejection", "grow", "walk"}));
  std::uint32_t bench_walk_steps = kDefaultWalkSteps;
  bench_cmd->add_option("--walk-steps", bench_walk_steps, "Joint steps of the walk sampler");
  bench_cmd->add_option("-o,--out", bench_out, "CSV file (default: stdout)");
  bench_grid.attach(*bench_cmd);

  // render
  auto* render_cmd = app.add_subcommand("render", "Draw an instance and optional solution as SVG");
  std::string render_instance, render_solution, render_out;
  std::optional<TimeStep> render_step;
  double cell_size = 16;
  std::uint64_t layout_seed = 1;
  render_cmd->add_option("instance", render_instance, "Instance file")->required();
  render_cmd->add_option("--solution", render_solution, "Solution file");
  render_cmd->add_option("--comm-step", render_step, "Draw communication links at this step");
  render_cmd->add_option("--cell-size", cell_size, "Pixels per grid cell");
  render_cmd->add_option("--layout-seed", layout_seed, "Seed of the abstract layout");
  render_cmd->add_option("-o,--out", render_out, "SVG file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  try {
    if (*solve_cmd) {
      const Instance instance = load_instance(solve_instance);
      const AlgoSpec spec = [&] {
        if (algo != "ccbs") return parse_algo_spec(algo);
        AlgoSpec s;
        s.name = "ccbs";
        s.config.strategies = StrategySet::parse(strategies);
        s.config.bypass = bypass;
        s.config.partial_splitting = partial_splitting;
        s.config.prune_duplicates = prune_duplicates;
        return s;
      }();
      RunLimits limits;
      limits.node_limit = node_limit;
      if (time_limit_ms) limits.time_limit = std::chrono::milliseconds(*time_limit_ms);
      const Solution solution = run_algo(spec, instance, limits);
      emit(solve_out, format_solution(solution));
      switch (solution.outcome) {
        case Outcome::solved: return kExitSolved;
        case Outcome::exhausted:
          std::cerr << "no connected execution exists under the search's constraints\n";
          return kExitExhausted;
        case Outcome::limit_reached:
          std::cerr << "limit reached before a solution was found\n";
          return kExitLimit;
      }
    }

    if (*gen_cmd) {
      const auto graph = graph_from_map(gen_map, gen_grid);
      if (!gen_agents) {
        emit(gen_out, format_graph(*graph));
      } else {
        emit(gen_out, format_instance(generate_instance(graph, *gen_agents, gen_seed,
                                                        parse_sampler(gen_sampler), gen_walk_steps)));
      }
      return 0;
    }

    if (*check_cmd) {
      const Instance instance = load_instance(check_instance);
      const SolutionRecord record = load_solution(check_solution);
      if (!record.execution) {
        std::cerr << "solution file has no execution (outcome " << to_string(record.outcome) << ")\n";
        return kExitInvalid;
      }
      const ValidationReport report = validate_execution(instance, *record.execution);
      if (!report.ok()) {
        std::cerr << report.describe();
        return kExitInvalid;
      }
      if (record.cost != record.execution->makespan()) {
        std::cerr << "cost " << record.cost << " does not match makespan "
                  << record.execution->makespan() << '\n';
        return kExitInvalid;
      }
      std::cout << "valid, makespan " << record.cost << '\n';
      return 0;
    }

    if (*bench_cmd) {
      std::vector<AlgoSpec> algos;
      for (const auto& name : split_list(bench_algos)) algos.push_back(parse_algo_spec(name));
      if (algos.empty()) {
        std::cerr << "--algos must name at least one algorithm\n";
        return kExitInputError;
      }
      RunLimits limits;
      limits.time_limit = std::chrono::milliseconds(bench_timeout_ms);
      limits.node_limit = bench_node_limit;
      std::vector<BenchRow> rows;
      if (!bench_instances.empty()) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(bench_instances)) {
          if (entry.path().extension() == ".inst") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        std::vector<std::pair<std::string, Instance>> instances;
        for (const auto& f : files) instances.emplace_back(f.filename().string(), load_instance(f));
        rows = run_bench_instances(instances, algos, limits, bench_threads());
      } else {
        if (bench_maps.empty()) {
          std::cerr << "give --map files or an --instances directory\n";
          return kExitInputError;
        }
        BenchPlan plan;
        for (const auto& m : bench_maps) {
          plan.maps.push_back({fs::path(m).stem().string(), bench_grid.label(), graph_from_map(m, bench_grid)});
        }
        plan.algos = algos;
        plan.agent_counts = parse_agent_counts(bench_agents);
        plan.instances_per_point = bench_count;
        plan.seed = bench_seed;
        plan.limits = limits;
        plan.sampler = parse_sampler(bench_sampler);
        plan.walk_steps = bench_walk_steps;
        rows = run_bench(plan, bench_threads(), [](const BenchRow& row) {
          if (row.outcome == "error") std::cerr << row.map << " k=" << row.agents << ": " << row.error << '\n';
        });
      }
      emit(bench_out, bench_csv(rows));
      return 0;
    }

    if (*render_cmd) {
      const Instance instance = load_instance(render_instance);
      std::optional<Execution> execution;
      if (!render_solution.empty()) {
        const SolutionRecord record = load_solution(render_solution);
        if (record.execution) {
          const ValidationReport report = validate_execution(instance, *record.execution);
          if (!report.ok()) {
            std::cerr << "solution does not match the instance:\n" << report.describe();
            return kExitInvalid;
          }
          execution = record.execution;
        }
      }
      RenderOptions options;
      options.cell_size = cell_size;
      options.comm_step = render_step;
      options.layout_seed = layout_seed;
      std::vector<std::string> warnings;
      const std::string svg = render_svg(instance, execution ? &*execution : nullptr, options, &warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
      emit(render_out, svg);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}
