#include <bit>
#include <cstdint>

#include <catch2/catch_amalgamated.hpp>

#include "primepoint/oracle.hpp"
#include "primepoint/solver.hpp"
#include "support.hpp"

using namespace primepoint;

namespace {

const PrimeEngine& engine() { return support::engine_small(); }

std::uint64_t floor_log2(std::uint64_t x) { return 63 - std::countl_zero(x); }

}  // namespace

TEST_CASE("bisect worked cases") {
  const BisectionRun hit = bisect(engine(), {1, 1, 76});
  REQUIRE(hit.solution.has_value());
  CHECK(*hit.solution == 17);
  CHECK(hit.iterations <= floor_log2(75) + 2);

  CHECK_FALSE(bisect(engine(), {1, 1, 41}).solution.has_value());
  CHECK(bisect(engine(), {1, 1, 39}).solution == 10);
  CHECK(bisect(engine(), {1, 1, 3}).solution == 1);  // f(1) = 0 exactly
  CHECK_THROWS_AS(bisect(engine(), {-1, 1, 100}), std::invalid_argument);
  CHECK_THROWS_AS(bisect(engine(), {5, 3, 10}), std::invalid_argument);
}

TEST_CASE("bisect maintains its bracket and iteration bound") {
  for (std::uint64_t n = 4; n <= 3000; ++n) {
    const BisectionRun run = bisect(engine(), {1, 1, n});
    CAPTURE(n);
    REQUIRE(run.iterations <= floor_log2(n - 1) + 2);
    // final bracket: f(lo) < 0 <= f(hi) unless the run found f(hi) = 0 early
    const auto f = [&](std::uint64_t k) {
      return equation_value({1, 1, n}, k, engine().nth_prime(k)) -
             static_cast<__int128>(n);
    };
    if (run.lo < run.hi) REQUIRE(f(run.lo) < 0);
    REQUIRE(f(run.hi) >= 0);
    if (run.solution) REQUIRE(f(*run.solution) == 0);
  }
}

TEST_CASE("brute_solutions worked cases") {
  CHECK(brute_solutions(engine(), {1, 1, 49}) ==
        std::vector<std::uint64_t>{12});
  CHECK(brute_solutions(engine(), {1, 1, 3}) == std::vector<std::uint64_t>{1});
  CHECK(brute_solutions(engine(), {1, 1, 5}) == std::vector<std::uint64_t>{2});
  CHECK(brute_solutions(engine(), {-4, 1, 99}) ==
        std::vector<std::uint64_t>{83, 85, 86});
  CHECK(brute_solutions(engine(), {-7, 1, 3389}) ==
        std::vector<std::uint64_t>{2000});
  // explicit k_max caps the window
  CHECK(brute_solutions(engine(), {-4, 1, 99}, 84) ==
        std::vector<std::uint64_t>{83});
}

TEST_CASE("solver matches brute force on a sampled grid") {
  for (const std::int64_t a : {1, 2, 3, 7}) {
    for (const std::int64_t b : {1, 2}) {
      for (std::uint64_t n = 1; n <= 2000; ++n) {
        const EquationSpec spec{a, b, n};
        CAPTURE(a, b, n);
        REQUIRE(solutions_of(solve(engine(), spec).outcome) ==
                brute_solutions(engine(), spec));
      }
    }
  }
  for (const std::int64_t a : {-1, -2, -3, -4}) {
    for (std::uint64_t n = 1; n <= 2000; ++n) {
      const EquationSpec spec{a, 1, n};
      CAPTURE(a, n);
      REQUIRE(solutions_of(solve(engine(), spec).outcome) ==
              brute_solutions(engine(), spec));
    }
  }
}

TEST_CASE("bisect agrees with solve for a > 0") {
  for (const std::int64_t a : {1, 2, 3, 7}) {
    for (const std::int64_t b : {1, 2}) {
      for (std::uint64_t n = a + 2 * b; n <= 1500; ++n) {
        const EquationSpec spec{a, b, n};
        const auto from_solve = solutions_of(solve(engine(), spec).outcome);
        const BisectionRun run = bisect(engine(), spec);
        CAPTURE(a, b, n);
        if (from_solve.empty()) {
          REQUIRE_FALSE(run.solution.has_value());
        } else {
          REQUIRE(run.solution == from_solve.front());
        }
      }
    }
  }
}

TEST_CASE("iteration beats bisection on the Fibonacci desk rows") {
  // n large enough that log2(n) dwarfs the handful of fixed-point steps
  const std::uint64_t fibs[] = {144, 233, 377, 610, 196418, 267914296};
  const PrimeEngine& eng = support::engine_mid();
  for (const std::uint64_t n : fibs) {
    const SolveResult iter_result = solve(eng, {1, 1, n});
    const BisectionRun bis = bisect(eng, {1, 1, n});
    CAPTURE(n);
    REQUIRE(iter_result.iterations() < bis.iterations);
    REQUIRE(solutions_of(iter_result.outcome) ==
            (bis.solution ? std::vector<std::uint64_t>{*bis.solution}
                          : std::vector<std::uint64_t>{}));
  }
}
