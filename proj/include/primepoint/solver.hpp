#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "primepoint/errors.hpp"
#include "primepoint/prime_engine.hpp"

namespace primepoint {

// The equation n = a*k + b*p_k. b >= 1, a != 0 (a = 0 is the trivial case
// and stays excluded), n >= 1.
struct EquationSpec {
  std::int64_t a = 1;
  std::int64_t b = 1;
  std::uint64_t n = 0;
};

inline void validate(const EquationSpec& spec) {
  if (spec.a == 0) throw std::invalid_argument("a must be nonzero");
  if (spec.b < 1) throw std::invalid_argument("b must be positive");
  if (spec.n < 1) throw std::invalid_argument("n must be positive");
}

inline __int128 equation_value(const EquationSpec& spec, std::uint64_t k,
                               std::uint64_t p_k) {
  return static_cast<__int128>(spec.a) * k +
         static_cast<__int128>(spec.b) * p_k;
}

struct CyclePair {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  friend bool operator==(const CyclePair&, const CyclePair&) = default;
};

// Full record of one run of k_{j+1} = pi((n - a*k_j)/b) from k_0 = pi(n/b).
// The run stops at the first j with k_j = k_{j-1} (fixed point) or
// k_j = k_{j-2} (2-cycle); steps() is the step count used in batch tables.
struct Trajectory {
  std::vector<std::uint64_t> iterates;
  std::variant<std::uint64_t, CyclePair> settled;

  std::size_t steps() const { return iterates.size() - 1; }
  bool is_fixed_point() const { return settled.index() == 0; }
  std::uint64_t fixed_value() const { return std::get<0>(settled); }
  CyclePair cycle() const { return std::get<1>(settled); }
};

struct FixedPointOutcome {
  std::uint64_t k_star = 0;
  bool is_solution = false;
  // k* + p_{k*} = max{j + p_j <= n}; reported for a = b = 1 only.
  std::optional<std::uint64_t> n_prime;
};

// Cycle {k', k'+1} with a <= b: certifies that no solution exists.
struct TwoCycleOutcome {
  std::uint64_t k_lo = 0;
  std::uint64_t k_hi = 0;
};

// Cycle with a > b: the gap may hide a solution; every interior k was
// checked directly.
struct GapCycleOutcome {
  std::uint64_t k_lo = 0;
  std::uint64_t k_hi = 0;
  std::vector<std::uint64_t> interior_solutions;
};

// a < 0: the fixed point is only a lower bound, so [k*, scan_upper_bound]
// was scanned exhaustively. solutions holds every hit, sorted.
struct NegativeScanOutcome {
  std::uint64_t k_star = 0;
  std::vector<std::uint64_t> solutions;
  std::uint64_t scan_upper_bound = 0;
};

// Fallback for a > 0 inputs too small to be admissible: plain enumeration
// over the finitely many k with a*k + b*p_k <= n.
struct DirectScanOutcome {
  std::vector<std::uint64_t> solutions;
};

using Outcome = std::variant<FixedPointOutcome, TwoCycleOutcome,
                             GapCycleOutcome, NegativeScanOutcome,
                             DirectScanOutcome>;

inline std::vector<std::uint64_t> solutions_of(const Outcome& outcome) {
  struct Visitor {
    std::vector<std::uint64_t> operator()(const FixedPointOutcome& o) const {
      if (o.is_solution) return {o.k_star};
      return {};
    }
    std::vector<std::uint64_t> operator()(const TwoCycleOutcome&) const {
      return {};
    }
    std::vector<std::uint64_t> operator()(const GapCycleOutcome& o) const {
      return o.interior_solutions;
    }
    std::vector<std::uint64_t> operator()(const NegativeScanOutcome& o) const {
      return o.solutions;
    }
    std::vector<std::uint64_t> operator()(const DirectScanOutcome& o) const {
      return o.solutions;
    }
  };
  return std::visit(Visitor{}, outcome);
}

inline bool has_solution(const Outcome& outcome) {
  return !solutions_of(outcome).empty();
}

// One application of the iteration map: pi(floor((n - a*k)/b)).
inline std::uint64_t step(const PrimeEngine& engine, const EquationSpec& spec,
                          std::uint64_t k) {
  const __int128 num =
      static_cast<__int128>(spec.n) - static_cast<__int128>(spec.a) * k;
  if (num < 0)
    throw DomainCollapse("iterate argument n - a*k is negative (n=" +
                         std::to_string(spec.n) + ", a=" +
                         std::to_string(spec.a) + ", k=" + std::to_string(k) +
                         ")");
  return engine.pi(static_cast<std::uint64_t>(num / spec.b));
}

// k_1 >= 1: guarantees every later iterate indexes a valid prime (a > 0).
// For a = b = 1 this holds exactly when n >= 4.
inline bool check_admissible(const PrimeEngine& engine,
                             const EquationSpec& spec) {
  validate(spec);
  if (spec.a <= 0)
    throw std::invalid_argument("check_admissible requires a > 0");
  const std::uint64_t k0 = engine.pi(spec.n / static_cast<std::uint64_t>(spec.b));
  const __int128 num =
      static_cast<__int128>(spec.n) - static_cast<__int128>(spec.a) * k0;
  if (num < 0) return false;
  return engine.pi(static_cast<std::uint64_t>(num / spec.b)) >= 1;
}

// Upper end of the a < 0 solution scan: the smallest K >= 3 such that
// k*(a + b*(ln k + ln ln k - 1)) > n for all k >= K. Uses the explicit
// lower bound p_k >= k(ln k + ln ln k - 1); once the product exceeds n it
// stays increasing, so no solution can lie at or beyond K.
inline std::uint64_t negative_scan_upper_bound(const EquationSpec& spec) {
  const auto g = [&](std::uint64_t k) {
    const long double lk = std::log(static_cast<long double>(k));
    return static_cast<long double>(k) *
           (static_cast<long double>(spec.a) +
            static_cast<long double>(spec.b) * (lk + std::log(lk) - 1.0L));
  };
  const long double target = static_cast<long double>(spec.n) + 0.5L;
  std::uint64_t hi = 3;
  while (g(hi) <= target) {
    // the bound grows like e^{|a|/b}; past 2^62 the exhaustive scan cannot
    // be certified in 64 bits
    if (hi >= (std::uint64_t{1} << 62))
      throw RangeError("a=" + std::to_string(spec.a) + ", b=" +
                       std::to_string(spec.b) +
                       ": scan bound exceeds the representable range");
    hi *= 2;
  }
  std::uint64_t lo = hi == 3 ? 3 : hi / 2;
  while (lo + 1 < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (g(mid) <= target ? lo : hi) = mid;
  }
  return g(lo) > target ? lo : hi;
}

// Step budget. For a > 0 the trajectory alternates around its limit and
// settles in O(log n) steps, covered by the flat formula. For a < 0 the
// iterates increase strictly until they settle and never reach the scan
// bound, so the walk length itself is the honest cap.
inline std::size_t iteration_budget(const EquationSpec& spec,
                                    std::uint64_t k0) {
  const auto flat = static_cast<std::size_t>(
      4 * static_cast<std::size_t>(
              std::floor(std::log2(static_cast<double>(spec.n) + 2.0))) +
      64);
  if (spec.a > 0) return flat;
  const std::uint64_t bound = negative_scan_upper_bound(spec);
  const std::size_t walk =
      bound > k0 ? static_cast<std::size_t>(bound - k0) + 2 : 2;
  return std::max(flat, walk);
}

// Run the iteration to its settled pattern. Fixed-point detection wins over
// cycle detection when both would match on the same step.
inline Trajectory iterate(const PrimeEngine& engine, const EquationSpec& spec,
                          std::size_t budget_override = 0) {
  validate(spec);
  if (spec.a > 0 && !check_admissible(engine, spec))
    throw std::invalid_argument(
        "inadmissible spec: k_1 < 1 (solve() falls back to enumeration)");
  Trajectory traj;
  const std::uint64_t k0 =
      engine.pi(spec.n / static_cast<std::uint64_t>(spec.b));
  traj.iterates.push_back(k0);
  const std::size_t budget =
      budget_override ? budget_override : iteration_budget(spec, k0);
  for (std::size_t j = 0; j < budget; ++j) {
    const std::uint64_t k = step(engine, spec, traj.iterates.back());
    traj.iterates.push_back(k);
    const std::size_t m = traj.iterates.size();
    if (k == traj.iterates[m - 2]) {
      traj.settled = k;
      return traj;
    }
    if (m >= 3 && k == traj.iterates[m - 3]) {
      traj.settled = CyclePair{std::min(k, traj.iterates[m - 2]),
                               std::max(k, traj.iterates[m - 2])};
      return traj;
    }
  }
  throw IterationBudgetExceeded("no settled pattern after " +
                                std::to_string(budget) + " steps (n=" +
                                std::to_string(spec.n) + ")");
}

// Scan k = max(k*, 1), ..., K_max for solutions of n = a*k + b*p_k (a < 0).
// Complete because every solution s satisfies k* < s < K_max.
inline NegativeScanOutcome scan_negative(const PrimeEngine& engine,
                                         const EquationSpec& spec,
                                         std::uint64_t k_star) {
  if (spec.a >= 0)
    throw std::invalid_argument("scan_negative requires a < 0");
  NegativeScanOutcome out;
  out.k_star = k_star;
  out.scan_upper_bound = negative_scan_upper_bound(spec);
  const std::uint64_t start = std::max<std::uint64_t>(k_star, 1);
  if (start <= out.scan_upper_bound) {
    std::uint64_t p = engine.nth_prime(start);
    for (std::uint64_t k = start;; ++k) {
      if (equation_value(spec, k, p) == static_cast<__int128>(spec.n))
        out.solutions.push_back(k);
      if (k == out.scan_upper_bound) break;
      p = engine.next_prime(p);
    }
  }
  if (!out.solutions.empty() && out.solutions.front() <= k_star)
    throw std::logic_error(
        "a < 0 fixed point cannot be a solution; engine inconsistency");
  return out;
}

// Turn a settled trajectory into the definitive statement about solutions.
inline Outcome classify(const PrimeEngine& engine, const EquationSpec& spec,
                        const Trajectory& traj) {
  if (traj.is_fixed_point()) {
    const std::uint64_t k_star = traj.fixed_value();
    if (spec.a < 0) return scan_negative(engine, spec, k_star);
    FixedPointOutcome out;
    out.k_star = k_star;
    const std::uint64_t p = engine.nth_prime(k_star);
    out.is_solution =
        equation_value(spec, k_star, p) == static_cast<__int128>(spec.n);
    if (spec.a == 1 && spec.b == 1) out.n_prime = k_star + p;
    return out;
  }
  const CyclePair cyc = traj.cycle();
  if (spec.a < 0)
    throw std::logic_error("a < 0 trajectories are monotone and cannot cycle");
  if (spec.a <= spec.b) {
    if (cyc.hi != cyc.lo + 1)
      throw std::logic_error("cycle gap must be 1 when a <= b");
    return TwoCycleOutcome{cyc.lo, cyc.hi};
  }
  GapCycleOutcome out;
  out.k_lo = cyc.lo;
  out.k_hi = cyc.hi;
  if (cyc.hi > cyc.lo + 1) {
    std::uint64_t p = engine.nth_prime(cyc.lo + 1);
    for (std::uint64_t k = cyc.lo + 1; k < cyc.hi; ++k) {
      if (equation_value(spec, k, p) == static_cast<__int128>(spec.n))
        out.interior_solutions.push_back(k);
      if (k + 1 < cyc.hi) p = engine.next_prime(p);
    }
  }
  return out;
}

namespace detail {

// Enumeration fallback for inadmissible small n: a > 0 makes a*k + b*p_k
// strictly increasing, so walk until it passes n.
inline DirectScanOutcome direct_scan(const PrimeEngine& engine,
                                     const EquationSpec& spec) {
  DirectScanOutcome out;
  std::uint64_t p = 2;
  for (std::uint64_t k = 1;; ++k) {
    const __int128 v = equation_value(spec, k, p);
    if (v > static_cast<__int128>(spec.n)) break;
    if (v == static_cast<__int128>(spec.n)) out.solutions.push_back(k);
    p = engine.next_prime(p);
  }
  return out;
}

}  // namespace detail

struct SolveResult {
  EquationSpec spec;
  // Absent when the admissibility fallback answered by enumeration.
  std::optional<Trajectory> trajectory;
  Outcome outcome;

  std::size_t iterations() const {
    return trajectory ? trajectory->steps() : 0;
  }
};

// Single entry point: iterate, classify, and (a < 0) scan.
inline SolveResult solve(const PrimeEngine& engine, const EquationSpec& spec) {
  validate(spec);
  SolveResult result;
  result.spec = spec;
  if (spec.a > 0 && !check_admissible(engine, spec)) {
    result.outcome = detail::direct_scan(engine, spec);
    return result;
  }
  result.trajectory = iterate(engine, spec);
  result.outcome = classify(engine, spec, *result.trajectory);
  return result;
}

}  // namespace primepoint
