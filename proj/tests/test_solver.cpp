#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rblab/instance.hpp"
#include "rblab/rng.hpp"
#include "rblab/solver.hpp"

using namespace rblab;

namespace {

Instance bare(std::int64_t n, std::int64_t d, int k, std::int64_t q) {
  Instance inst;
  inst.n = n;
  inst.d = d;
  inst.k = k;
  inst.q = q;
  return inst;
}

// Random small instance with n <= 8, d <= 4, arity k.
Instance random_small(std::uint64_t seed, int k) {
  Rng rng(seed);
  const auto n = static_cast<std::int64_t>(k + rng.below(static_cast<std::uint64_t>(9 - k)));
  const auto d = static_cast<std::int64_t>(2 + rng.below(3));
  const auto tuples = static_cast<std::int64_t>(std::pow(d, k));
  const auto q = static_cast<std::int64_t>(1 + rng.below(static_cast<std::uint64_t>(tuples - 2)));
  const auto t = static_cast<std::size_t>(1 + rng.below(static_cast<std::uint64_t>(3 * n)));
  Instance inst = bare(n, d, k, q);
  for (std::size_t i = 0; i < t; ++i) inst.constraints.push_back(draw_constraint(n, d, k, q, derive_seed(seed, i)));
  return inst;
}

}  // namespace

TEST_CASE("check") {
  Instance inst = bare(3, 3, 2, 1);
  inst.constraints.push_back({{0, 2}, {2 * 3 + 1}});
  CHECK(check({{0, 0, 0}}, inst));
  CHECK_FALSE(check({{2, 0, 1}}, inst));
  CHECK_THROWS_AS(check({{0, 0}}, inst), std::invalid_argument);
  CHECK_THROWS_AS(check({{0, 0, 3}}, inst), std::invalid_argument);

  Instance free = bare(3, 2, 2, 0);
  free.constraints.push_back({{0, 1}, {}});
  CHECK(check({{1, 0, 1}}, free));
}

TEST_CASE("trivial instances") {
  SUBCASE("no constraints: SAT with the all-zero witness") {
    const Instance inst = bare(4, 3, 2, 1);
    const SolveResult r = solve(inst);
    CHECK(r.status == SolveStatus::Sat);
    REQUIRE(r.witness);
    CHECK(r.witness->values == std::vector<int>(4, 0));
    CHECK(count_solutions(inst).count == 81u);
  }
  SUBCASE("zero nogoods: count d^n") {
    Instance inst = bare(3, 2, 2, 0);
    inst.constraints.push_back({{0, 1}, {}});
    inst.constraints.push_back({{1, 2}, {}});
    CHECK(count_solutions(inst).count == 8u);
    CHECK(brute_force_count(inst) == 8u);
  }
  SUBCASE("one constraint: d^2 - q") {
    Instance inst = bare(2, 4, 2, 5);
    inst.constraints.push_back(draw_constraint(2, 4, 2, 5, 99));
    CHECK(count_solutions(inst).count == 11u);
    CHECK(brute_force_count(inst) == 11u);
  }
  SUBCASE("all tuples forbidden: UNSAT") {
    Instance inst = bare(3, 2, 2, 4);
    inst.constraints.push_back({{1, 2}, {0, 1, 2, 3}});
    const SolveResult r = solve(inst);
    CHECK(r.status == SolveStatus::Unsat);
    CHECK_FALSE(r.witness);
    CHECK(count_solutions(inst).count == 0u);
  }
  SUBCASE("ternary all forbidden") {
    Instance inst = bare(4, 2, 3, 8);
    inst.constraints.push_back({{0, 1, 3}, {0, 1, 2, 3, 4, 5, 6, 7}});
    CHECK(solve(inst).status == SolveStatus::Unsat);
  }
}

TEST_CASE("oracle equivalence on random small instances") {
  for (int k : {2, 3}) {
    int sat = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const Instance inst = random_small(derive_seed(k, seed), k);
      const std::uint64_t expected = brute_force_count(inst);
      const SolveResult counted = count_solutions(inst);
      CAPTURE(k);
      CAPTURE(seed);
      REQUIRE(counted.count);
      CHECK_FALSE(counted.partial);
      CHECK(*counted.count == expected);
      const SolveResult decided = solve(inst);
      CHECK((decided.status == SolveStatus::Sat) == (expected > 0));
      if (decided.witness) CHECK(check(*decided.witness, inst));
      sat += expected > 0;
    }
    CHECK(sat > 20);
    CHECK(sat < 180);
  }
}

TEST_CASE("limit and budget") {
  const Instance inst = bare(5, 3, 2, 1);
  const SolveResult limited = count_solutions(inst, 10);
  CHECK(limited.partial);
  CHECK(limited.count == 10u);
  CHECK(limited.status == SolveStatus::Sat);

  Instance hard = generate({30, 0.8, 2, 0.25, 3.4}, 17);
  SolverConfig tiny;
  tiny.node_budget = 5;
  const SolveResult r = solve(hard, tiny);
  CHECK(r.status == SolveStatus::Timeout);
  CHECK(r.nodes <= 6);
}

TEST_CASE("monotonicity: adding nogoods never increases the count") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Instance inst = random_small(derive_seed(555, seed), 2);
    std::uint64_t before = *count_solutions(inst).count;
    // Grow every nogood set by one tuple (keeping q uniform) until d^k - 1.
    while (static_cast<std::uint64_t>(inst.q) + 1 < inst.tuples()) {
      for (Constraint& c : inst.constraints) {
        for (std::uint64_t code = 0; code < inst.tuples(); ++code) {
          if (!std::binary_search(c.nogoods.begin(), c.nogoods.end(), code)) {
            c.nogoods.insert(std::lower_bound(c.nogoods.begin(), c.nogoods.end(), code), code);
            break;
          }
        }
      }
      ++inst.q;
      const std::uint64_t after = *count_solutions(inst).count;
      CAPTURE(seed);
      CHECK(after <= before);
      CHECK(after == brute_force_count(inst));
      before = after;
    }
  }
}

TEST_CASE("determinism of node counts") {
  const Instance inst = generate({20, 0.8, 2, 0.25, 3.0}, 123);
  const SolveResult a = solve(inst);
  const SolveResult b = solve(inst);
  CHECK(a.status == b.status);
  CHECK(a.nodes == b.nodes);
  CHECK(a.witness == b.witness);
  if (a.witness) CHECK(check(*a.witness, inst));
}

TEST_CASE("large k-ary constraints use the sorted lookup") {
  // d = 40, k = 4: d^k = 2.56e6 exceeds the dense-bitset limit.
  const ModelParams p{8, 1.774, 4, 0.01, 0.1};
  const auto [inst, hidden] = generate_forced(p, 4);
  REQUIRE(inst.tuples() > (1u << 20));
  const SolveResult r = solve(inst);
  CHECK(r.status == SolveStatus::Sat);
  REQUIRE(r.witness);
  CHECK(check(*r.witness, inst));
}

TEST_CASE("brute force guard") {
  const Instance big = bare(20, 3, 2, 1);
  CHECK_THROWS(brute_force_count(big));
}
