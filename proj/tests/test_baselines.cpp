#include <doctest.h>

#include "cmapf/astar_od.hpp"
#include "cmapf/oracle.hpp"
#include "support/fixtures.hpp"
#include "support/random_instances.hpp"

using namespace cmapf;

namespace {

// Depth-limited search over joint moves; minimum makespan up to `max_depth`.
std::optional<std::uint32_t> brute_force_makespan(const Instance& inst, std::uint32_t max_depth) {
  const auto& g = *inst.graph;
  const std::size_t k = inst.agent_count();
  auto reaches = [&](auto&& self, const Configuration& c, std::uint32_t depth) -> bool {
    if (c == inst.goal) return true;
    if (depth == 0) return false;
    Configuration next(k);
    auto choose = [&](auto&& rec, std::size_t a) -> bool {
      if (a == k) return is_connected(g, next) && self(self, next, depth - 1);
      for (VertexId v : g.movement_neighbors(c[a])) {
        next[a] = v;
        if (rec(rec, a + 1)) return true;
      }
      return false;
    };
    return choose(choose, 0);
  };
  for (std::uint32_t d = 0; d <= max_depth; ++d) {
    if (reaches(reaches, inst.start, d)) return d;
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("oracle on the two small fixtures") {
  const auto a = oracle_solve(fixtures::example_instance());
  REQUIRE(a.status == OracleStatus::solved);
  CHECK(a.cost == 3);
  CHECK(validate_execution(fixtures::example_instance(), *a.witness).ok());

  const auto b = oracle_solve(fixtures::counterexample_instance());
  REQUIRE(b.status == OracleStatus::solved);
  CHECK(b.cost == 3);
  CHECK(validate_execution(fixtures::counterexample_instance(), *b.witness).ok());
}

TEST_CASE("oracle statuses") {
  const std::vector<Edge> mvt{{1, 2}, {2, 3}};
  const std::vector<Edge> comm{{0, 1}, {0, 3}};
  const auto gap = std::make_shared<const TopologicalGraph>(4, 0, mvt, comm);
  CHECK(oracle_solve({gap, {1}, {3}}).status == OracleStatus::unsolvable);
  CHECK(oracle_solve(fixtures::example_instance(), 2).status == OracleStatus::step_bound);

  const std::vector<Edge> none;
  const auto big = std::make_shared<const TopologicalGraph>(200, 0, none, none);
  const Instance crowd{big, Configuration(4, 0), Configuration(4, 0)};
  CHECK_FALSE(oracle_fits(crowd));
  CHECK(oracle_solve(crowd).status == OracleStatus::refused);
  CHECK(oracle_fits(fixtures::example_instance()));
}

TEST_CASE("oracle agrees with depth-limited brute force") {
  testing::Rng rng(41);
  int cases = 0;
  while (cases < 1000) {
    const auto inst = testing::random_instance(rng, testing::uniform(rng, 1, 5),
                                               testing::uniform(rng, 1, 2));
    if (!inst) continue;
    ++cases;
    const auto ref = oracle_solve(*inst);
    const auto brute = brute_force_makespan(*inst, 8);
    if (ref.status == OracleStatus::solved && ref.cost <= 8) {
      REQUIRE(brute);
      CHECK(*brute == ref.cost);
      CHECK(validate_execution(*inst, *ref.witness).ok());
    } else {
      CHECK_FALSE(brute);
    }
  }
}

TEST_CASE("A*-OD on the fixtures") {
  const auto a = astar_od_solve(fixtures::example_instance());
  REQUIRE(a.outcome == Outcome::solved);
  CHECK(a.cost == 3);
  CHECK(validate_execution(fixtures::example_instance(), *a.execution).ok());
  const auto b = astar_od_solve(fixtures::counterexample_instance());
  REQUIRE(b.outcome == Outcome::solved);
  CHECK(b.cost == 3);
}

TEST_CASE("A*-OD limits and exhaustion") {
  const std::vector<Edge> mvt{{1, 2}, {2, 3}};
  const std::vector<Edge> comm{{0, 1}, {0, 3}};
  const auto gap = std::make_shared<const TopologicalGraph>(4, 0, mvt, comm);
  CHECK(astar_od_solve({gap, {1}, {3}}).outcome == Outcome::exhausted);
  const auto limited = astar_od_solve(fixtures::counterexample_instance(), {1, std::nullopt});
  CHECK(limited.outcome == Outcome::limit_reached);
}

TEST_CASE("A*-OD matches the oracle on random instances") {
  testing::Rng rng(42);
  int cases = 0;
  while (cases < 1000) {
    const auto inst = testing::random_instance(rng, testing::uniform(rng, 2, 10),
                                               testing::uniform(rng, 1, 3));
    if (!inst) continue;
    ++cases;
    const auto ref = oracle_solve(*inst);
    const auto sol = astar_od_solve(*inst);
    if (ref.status == OracleStatus::unsolvable) {
      CHECK(sol.outcome == Outcome::exhausted);
      continue;
    }
    REQUIRE(ref.status == OracleStatus::solved);
    REQUIRE(sol.outcome == Outcome::solved);
    CHECK(sol.cost == ref.cost);
    CHECK(validate_execution(*inst, *sol.execution).ok());
  }
}
