#include "cmapf/bench.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cmapf/astar_od.hpp"
#include "cmapf/oracle.hpp"

namespace cmapf {

AlgoSpec parse_algo_spec(std::string_view name) {
  AlgoSpec spec;
  spec.name = std::string(name);
  if (name == "astar-od") {
    spec.algo = Algo::astar_od;
    return spec;
  }
  if (name == "oracle") {
    spec.algo = Algo::oracle;
    return spec;
  }
  if (name.substr(0, 5) != "ccbs-") {
    throw std::invalid_argument("unknown algorithm '" + spec.name + "'");
  }
  std::string_view rest = name.substr(5);
  const std::size_t dash = rest.find('-');
  const std::string_view letters = rest.substr(0, dash);
  std::string names;
  for (char c : letters) {
    const char* strategy = c == 'n' ? "neg" : c == 's' ? "self" : c == 'o' ? "other" : nullptr;
    if (!strategy) throw std::invalid_argument("unknown strategy letter in '" + spec.name + "'");
    if (!names.empty()) names += ',';
    names += strategy;
  }
  const StrategySet set = names.empty() ? StrategySet{} : StrategySet::parse(names);
  if (set.empty()) throw std::invalid_argument("no strategies in '" + spec.name + "'");
  spec.config.strategies = set;
  rest = dash == std::string_view::npos ? std::string_view{} : rest.substr(dash);
  while (!rest.empty()) {
    if (rest.substr(0, 3) == "-ps") {
      spec.config.partial_splitting = true;
      rest.remove_prefix(3);
    } else if (rest.substr(0, 9) == "-nobypass") {
      spec.config.bypass = false;
      rest.remove_prefix(9);
    } else if (rest.substr(0, 8) == "-nodedup") {
      spec.config.prune_duplicates = false;
      rest.remove_prefix(8);
    } else {
      throw std::invalid_argument("unknown suffix in '" + spec.name + "'");
    }
  }
  return spec;
}

Solution run_algo(const AlgoSpec& spec, const Instance& instance, const RunLimits& limits) {
  switch (spec.algo) {
    case Algo::ccbs: {
      SolverConfig config = spec.config;
      config.node_limit = limits.node_limit;
      config.time_limit = limits.time_limit;
      return solve(instance, config);
    }
    case Algo::astar_od:
      return astar_od_solve(instance, {limits.node_limit, limits.time_limit});
    case Algo::oracle: {
      const auto started = std::chrono::steady_clock::now();
      const OracleResult r = oracle_solve(instance);
      Solution s;
      s.stats.nodes_generated = r.states_visited;
      switch (r.status) {
        case OracleStatus::solved:
          s.outcome = Outcome::solved;
          s.execution = r.witness;
          s.cost = r.cost;
          break;
        case OracleStatus::unsolvable: s.outcome = Outcome::exhausted; break;
        case OracleStatus::step_bound:
        case OracleStatus::refused: s.outcome = Outcome::limit_reached; break;
      }
      s.stats.wall_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - started)
                            .count();
      return s;
    }
  }
  throw std::logic_error("unhandled algorithm");
}

std::uint64_t instance_seed(std::uint64_t base_seed, std::size_t map_index, std::size_t agents,
                            std::size_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(base_seed);
  h = mix(h ^ map_index);
  h = mix(h ^ agents);
  return mix(h ^ index);
}

unsigned bench_threads() {
  if (const char* env = std::getenv("CMAPF_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

namespace {

BenchRow make_row(const std::string& map, const std::string& comm, std::size_t agents,
                  const AlgoSpec& algo, std::uint64_t seed) {
  BenchRow row;
  row.map = map;
  row.comm_model = comm;
  row.agents = agents;
  row.algo = algo.name;
  row.instance_seed = seed;
  return row;
}

void fill(BenchRow& row, const Solution& s) {
  row.outcome = to_string(s.outcome);
  row.cost = s.outcome == Outcome::solved ? s.cost : 0;
  row.nodes_generated = s.stats.nodes_generated;
  row.nodes_expanded = s.stats.nodes_expanded;
  row.lowlevel_calls = s.stats.lowlevel_calls;
  row.wall_ms = s.stats.wall_ms;
  if (s.outcome == Outcome::solved) row.witness = s.execution;
}

void run_one(BenchRow& row, const AlgoSpec& algo, const Instance& instance, RunLimits limits,
             std::optional<std::uint64_t> astar_cap) {
  if (algo.algo == Algo::astar_od && astar_cap) {
    limits.node_limit = limits.node_limit ? std::min(*limits.node_limit, *astar_cap) : *astar_cap;
  }
  try {
    fill(row, run_algo(algo, instance, limits));
  } catch (const std::exception& e) {
    row.outcome = "error";
    row.error = e.what();
  }
}

// Runs task(i) for i in [0, count) on `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task) {
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
  }
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchPlan& plan, unsigned threads,
                                const std::function<void(const BenchRow&)>& on_row) {
  struct Task {
    std::size_t map;
    std::size_t agents;
    std::size_t index;
  };
  std::vector<Task> tasks;
  for (std::size_t m = 0; m < plan.maps.size(); ++m) {
    for (std::size_t k : plan.agent_counts) {
      for (std::size_t i = 0; i < plan.instances_per_point; ++i) tasks.push_back({m, k, i});
    }
  }
  const std::size_t per_task = plan.algos.size();
  std::vector<BenchRow> rows(tasks.size() * per_task);
  std::mutex report;

  parallel_for(tasks.size(), threads, [&](std::size_t t) {
    const Task& task = tasks[t];
    const BenchMap& map = plan.maps[task.map];
    const std::uint64_t seed = instance_seed(plan.seed, task.map, task.agents, task.index);
    std::optional<Instance> instance;
    std::string error;
    try {
      instance = generate_instance(map.graph, task.agents, seed, plan.sampler, plan.walk_steps);
    } catch (const std::exception& e) {
      error = e.what();
    }
    for (std::size_t a = 0; a < per_task; ++a) {
      BenchRow& row = rows[t * per_task + a];
      row = make_row(map.name, map.comm_model, task.agents, plan.algos[a], seed);
      if (instance) {
        run_one(row, plan.algos[a], *instance, plan.limits, plan.astar_node_limit);
      } else {
        row.outcome = "error";
        row.error = error;
      }
      if (on_row) {
        std::lock_guard lock(report);
        on_row(row);
      }
    }
  });
  return rows;
}

std::vector<BenchRow> run_bench_instances(
    const std::vector<std::pair<std::string, Instance>>& instances,
    const std::vector<AlgoSpec>& algos, const RunLimits& limits, unsigned threads) {
  std::vector<BenchRow> rows(instances.size() * algos.size());
  parallel_for(instances.size(), threads, [&](std::size_t i) {
    const auto& [name, instance] = instances[i];
    for (std::size_t a = 0; a < algos.size(); ++a) {
      BenchRow& row = rows[i * algos.size() + a];
      row = make_row(name, "file", instance.agent_count(), algos[a], 0);
      run_one(row, algos[a], instance, limits, std::nullopt);
    }
  });
  return rows;
}

std::string bench_csv_header() {
  return "map,comm_model,agents,algo,instance_seed,outcome,cost,nodes_generated,nodes_expanded,"
         "lowlevel_calls,wall_ms\n";
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string bench_csv_row(const BenchRow& row) {
  char wall[32];
  std::snprintf(wall, sizeof wall, "%.3f", row.wall_ms);
  std::ostringstream out;
  out << csv_field(row.map) << ',' << csv_field(row.comm_model) << ',' << row.agents << ','
      << csv_field(row.algo) << ',' << row.instance_seed << ',' << row.outcome << ',' << row.cost
      << ',' << row.nodes_generated << ',' << row.nodes_expanded << ',' << row.lowlevel_calls
      << ',' << wall << '\n';
  return out.str();
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = bench_csv_header();
  for (const auto& row : rows) out += bench_csv_row(row);
  return out;
}

}  // namespace cmapf
