#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "primepoint/prime_engine.hpp"
#include "primepoint/solver.hpp"

namespace primepoint {

// One bisection run on f(k) = a*k + b*p_k - n (a > 0, so f is strictly
// increasing). iterations counts midpoint evaluations only; bracket-growing
// probes for general (a, b) stay outside the count so runs with different
// initial brackets stay comparable.
struct BisectionRun {
  EquationSpec spec;
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  std::size_t iterations = 0;
  std::optional<std::uint64_t> solution;
};

inline BisectionRun bisect(const PrimeEngine& engine,
                           const EquationSpec& spec) {
  validate(spec);
  if (spec.a <= 0) throw std::invalid_argument("bisect requires a > 0");
  const __int128 n = static_cast<__int128>(spec.n);
  if (n < static_cast<__int128>(spec.a) + 2 * static_cast<__int128>(spec.b))
    throw std::invalid_argument("bisect requires n >= a + 2b");
  const auto f = [&](std::uint64_t k) {
    return equation_value(spec, k, engine.nth_prime(k)) - n;
  };

  BisectionRun run;
  run.spec = spec;
  run.lo = 1;
  if (f(1) == 0) {
    run.hi = 1;
    run.solution = 1;
    return run;
  }
  if (spec.a == 1 && spec.b == 1) {
    run.hi = spec.n;  // f(n) = p_n > 0, no evaluation needed
  } else {
    run.hi = 2;
    while (f(run.hi) < 0) {
      run.lo = run.hi;
      run.hi *= 2;
    }
  }
  while (run.hi - run.lo > 1) {
    const std::uint64_t mid = run.lo + (run.hi - run.lo) / 2;
    ++run.iterations;
    const __int128 v = f(mid);
    if (v == 0) {
      run.hi = mid;
      run.solution = mid;
      return run;
    }
    (v < 0 ? run.lo : run.hi) = mid;
  }
  if (f(run.hi) == 0) run.solution = run.hi;
  return run;
}

// Ground truth by direct evaluation: every k in [1, k_max] with
// a*k + b*p_k = n. k_max = 0 picks the natural bound (last k with value <= n
// for a > 0; the a < 0 scan bound otherwise).
inline std::vector<std::uint64_t> brute_solutions(const PrimeEngine& engine,
                                                  const EquationSpec& spec,
                                                  std::uint64_t k_max = 0) {
  validate(spec);
  std::vector<std::uint64_t> found;
  const __int128 n = static_cast<__int128>(spec.n);
  if (spec.a > 0) {
    for (std::uint64_t k = 1; k_max == 0 || k <= k_max; ++k) {
      const __int128 v = equation_value(spec, k, engine.nth_prime(k));
      if (v > n) break;
      if (v == n) found.push_back(k);
    }
    return found;
  }
  if (k_max == 0) k_max = negative_scan_upper_bound(spec);
  std::uint64_t p = 2;
  for (std::uint64_t k = 1; k <= k_max; ++k) {
    if (equation_value(spec, k, p) == n) found.push_back(k);
    if (k < k_max) p = engine.next_prime(p);
  }
  return found;
}

}  // namespace primepoint
