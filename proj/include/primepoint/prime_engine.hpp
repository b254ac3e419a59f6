#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "primepoint/errors.hpp"

namespace primepoint {

namespace detail {

inline std::uint64_t isqrt_u64(std::uint64_t x) {
  if (x == 0) return 0;
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(x)));
  while (r > 0 && r > x / r) --r;
  while (r + 1 <= x / (r + 1)) ++r;
  return r;
}

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(
      static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp,
                            std::uint64_t m) {
  std::uint64_t r = 1;
  base %= m;
  while (exp) {
    if (exp & 1) r = mulmod(r, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return r;
}

// Deterministic Miller-Rabin, valid for every 64-bit integer with the first
// twelve prime bases (Sorenson & Webster).
inline bool miller_rabin_u64(std::uint64_t n) {
  constexpr std::uint64_t bases[] = {2,  3,  5,  7,  11, 13,
                                     17, 19, 23, 29, 31, 37};
  if (n < 2) return false;
  for (std::uint64_t p : bases) {
    if (n % p == 0) return n == p;
  }
  const int s = std::countr_zero(n - 1);
  const std::uint64_t d = (n - 1) >> s;
  for (std::uint64_t a : bases) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

}  // namespace detail

struct EngineConfig {
  // Highest x answered from the bit-sieve table; clamped up to 10^6.
  std::uint64_t sieve_limit = 100'000'000;
  // Hard cap on query arguments. The default keeps single solves at
  // interactive speed; large_range() extends to the long-running ceiling.
  std::uint64_t supported_max = 100'000'000'000;

  static EngineConfig large_range() {
    EngineConfig c;
    c.supported_max = 200'000'000'000'000ULL;
    return c;
  }
};

// Prime services: pi(x), nth prime, primality. Two backends behind one
// surface: a packed odd-only bit sieve with per-word rank counts up to
// sieve_limit, and Lucy_Hedgehog-style combinatorial counting above it.
// Construction is single-threaded; afterwards the object is immutable except
// for the mutex-guarded pi memo cache, so concurrent reads are safe.
class PrimeEngine {
 public:
  static constexpr std::uint64_t kMinSieveLimit = 1'000'000;

  explicit PrimeEngine(EngineConfig config = {}) : cfg_(config) {
    cfg_.sieve_limit = std::max(cfg_.sieve_limit, kMinSieveLimit);
    cfg_.supported_max = std::max(cfg_.supported_max, cfg_.sieve_limit);
    build_table();
  }

  PrimeEngine(const PrimeEngine&) = delete;
  PrimeEngine& operator=(const PrimeEngine&) = delete;

  std::uint64_t sieve_limit() const { return cfg_.sieve_limit; }
  std::uint64_t supported_max() const { return cfg_.supported_max; }

  // Number of primes <= sieve_limit, i.e. the k-range served by the table.
  std::uint64_t table_prime_count() const { return 1 + table_odd_primes_; }

  // Count of primes <= x.
  std::uint64_t pi(std::uint64_t x) const {
    check_range("pi", x);
    return pi_internal(x);
  }

  // Table backend; pre: x <= sieve_limit().
  std::uint64_t pi_tabulated(std::uint64_t x) const {
    if (x < 2) return 0;
    if (x == 2) return 1;
    const std::uint64_t j = (x - 1) / 2;  // index of the largest odd <= x
    const std::size_t w = static_cast<std::size_t>(j / 64);
    const unsigned b = static_cast<unsigned>(j % 64);
    const std::uint64_t mask = (b == 63) ? ~0ULL : ((1ULL << (b + 1)) - 1);
    return 1 + cum_[w] + std::popcount(bits_[w] & mask);
  }

  // Combinatorial backend (Lucy_Hedgehog recurrence over the floor(x/i)
  // lattice), O(x^{3/4}) time and O(sqrt x) space. Valid for any x; not
  // range-capped so it can serve as the independent half of seam tests.
  // The two quotient-indexed passes walk constant-quotient blocks, so the
  // inner loops carry no divisions.
  std::uint64_t pi_counted(std::uint64_t x) const {
    if (x < 2) return 0;
    const std::uint64_t r = detail::isqrt_u64(x);
    std::vector<std::uint64_t> big(r + 1);    // big[i]  = S(x / i)
    std::vector<std::uint32_t> small(r + 1);  // small[v] = S(v)
    for (std::uint64_t i = 1; i <= r; ++i) big[i] = x / i - 1;
    for (std::uint64_t v = 1; v <= r; ++v)
      small[v] = static_cast<std::uint32_t>(v - 1);
    for (std::uint64_t p = 2; p <= r; ++p) {
      if (small[p] == small[p - 1]) continue;  // composite
      const std::uint32_t sp = small[p - 1];   // pi(p - 1)
      const std::uint64_t p2 = p * p;
      const std::uint64_t imax = std::min(r, x / p2);
      const std::uint64_t xp = x / p;
      const std::uint64_t split = std::min(imax, r / p);
      // d = i*p <= r: the quotient S(x/d) still lives in big[]
      for (std::uint64_t i = 1; i <= split; ++i) big[i] -= big[i * p] - sp;
      // d > r: S(x/d) = small[xp / i]; xp/i is constant on i-blocks
      for (std::uint64_t i = split + 1; i <= imax;) {
        const std::uint64_t q = xp / i;
        const std::uint64_t block_end = std::min(imax, xp / q);
        const std::uint64_t dec = small[q] - sp;
        for (; i <= block_end; ++i) big[i] -= dec;
      }
      // small[v] for v in [p^2, r]; v/p is constant on v-blocks. Blocks are
      // walked with q descending so small[q] is read before its own update.
      for (std::uint64_t q = r / p; q >= p; --q) {
        const std::uint32_t dec = small[q] - sp;
        const std::uint64_t vlo = q * p;
        for (std::uint64_t v = std::min(r, vlo + p - 1); v >= vlo; --v)
          small[v] -= dec;
      }
    }
    return big[1];
  }

  // The k-th prime, p_1 = 2. Above the table this inverts pi by a bracketed
  // secant search between the explicit bounds
  // k(ln k + ln ln k - 1) <= p_k <= k(ln k + ln ln k), then scans the final
  // window with the primality test; the bounds only shape the bracket,
  // correctness comes from pi itself.
  std::uint64_t nth_prime(std::uint64_t k) const {
    if (k == 0)
      throw RangeError("nth_prime: k must be positive");
    if (k <= table_prime_count()) return nth_prime_tabulated(k);
    return nth_prime_inverted(k);
  }

  bool is_prime(std::uint64_t x) const {
    check_range("is_prime", x);
    return is_prime_internal(x);
  }

  // Smallest prime > x.
  std::uint64_t next_prime(std::uint64_t x) const {
    if (x < 2) return 2;
    std::uint64_t candidate = (x % 2 == 0) ? x + 1 : x + 2;
    if (candidate <= cfg_.sieve_limit) {
      std::uint64_t j = (candidate - 1) / 2;
      std::size_t w = static_cast<std::size_t>(j / 64);
      std::uint64_t word = bits_[w] & (~0ULL << (j % 64));
      while (true) {
        if (word != 0) {
          const std::uint64_t hit =
              static_cast<std::uint64_t>(w) * 64 + std::countr_zero(word);
          return 2 * hit + 1;
        }
        if (++w == bits_.size()) break;
        word = bits_[w];
      }
      candidate = cfg_.sieve_limit + (cfg_.sieve_limit % 2 == 0 ? 1 : 2);
    }
    for (;; candidate += 2) {
      if (candidate > cfg_.supported_max)
        throw RangeError("next_prime: no prime found below supported_max=" +
                         std::to_string(cfg_.supported_max));
      if (detail::miller_rabin_u64(candidate)) return candidate;
    }
  }

 private:
  static constexpr std::uint64_t kInvertScanWindow = 1 << 16;

  void check_range(const char* op, std::uint64_t x) const {
    if (x > cfg_.supported_max)
      throw RangeError(std::string(op) + ": argument " + std::to_string(x) +
                       " exceeds supported_max=" +
                       std::to_string(cfg_.supported_max));
  }

  bool test_bit(std::uint64_t j) const {
    return (bits_[j / 64] >> (j % 64)) & 1;
  }

  void build_table() {
    const std::uint64_t limit = cfg_.sieve_limit;
    const std::uint64_t slots = (limit + 1) / 2;  // odd numbers <= limit
    const std::size_t words = static_cast<std::size_t>((slots + 63) / 64);
    bits_.assign(words, ~0ULL);
    if (slots % 64) bits_.back() &= ~0ULL >> (64 - slots % 64);
    bits_[0] &= ~1ULL;  // 1 is not prime
    for (std::uint64_t i = 3; i * i <= limit; i += 2) {
      if (!test_bit((i - 1) / 2)) continue;
      for (std::uint64_t m = i * i; m <= limit; m += 2 * i)
        bits_[(m - 1) / 2 / 64] &= ~(1ULL << ((m - 1) / 2 % 64));
    }
    cum_.resize(words + 1);
    cum_[0] = 0;
    for (std::size_t w = 0; w < words; ++w)
      cum_[w + 1] = cum_[w] + std::popcount(bits_[w]);
    table_odd_primes_ = cum_[words];
  }

  std::uint64_t pi_internal(std::uint64_t x) const {
    if (x <= cfg_.sieve_limit) return pi_tabulated(x);
    {
      std::lock_guard lock(cache_mu_);
      if (auto it = pi_cache_.find(x); it != pi_cache_.end()) return it->second;
    }
    const std::uint64_t v = pi_counted(x);
    std::lock_guard lock(cache_mu_);
    pi_cache_.emplace(x, v);
    return v;
  }

  bool is_prime_internal(std::uint64_t x) const {
    if (x <= cfg_.sieve_limit) {
      if (x == 2) return true;
      if (x < 2 || x % 2 == 0) return false;
      return test_bit((x - 1) / 2);
    }
    return detail::miller_rabin_u64(x);
  }

  std::uint64_t nth_prime_tabulated(std::uint64_t k) const {
    if (k == 1) return 2;
    const std::uint64_t c = k - 1;  // rank among odd primes
    const auto it = std::lower_bound(cum_.begin() + 1, cum_.end(), c);
    const std::size_t w = static_cast<std::size_t>(it - cum_.begin()) - 1;
    std::uint64_t word = bits_[w];
    for (std::uint64_t skip = c - cum_[w]; skip > 1; --skip)
      word &= word - 1;
    const std::uint64_t j =
        static_cast<std::uint64_t>(w) * 64 + std::countr_zero(word);
    return 2 * j + 1;
  }

  std::uint64_t nth_prime_inverted(std::uint64_t k) const {
    const auto kf = static_cast<long double>(k);
    const long double lk = std::log(kf);
    const long double llk = std::log(lk);
    const long double lower_f = kf * (lk + llk - 1.0L);
    if (lower_f > static_cast<long double>(cfg_.supported_max) + 1.0L)
      throw RangeError("nth_prime: k=" + std::to_string(k) +
                       " exceeds pi(supported_max=" +
                       std::to_string(cfg_.supported_max) + ")");
    // pi(lo) < k <= pi(hi) by the bracket bounds (theorems for k >= 6; this
    // path only runs for k > pi(10^6) = 78498).
    std::uint64_t lo = static_cast<std::uint64_t>(lower_f) - 1;
    std::uint64_t hi = static_cast<std::uint64_t>(kf * (lk + llk)) + 1;
    std::uint64_t pi_lo = pi_internal(lo);
    std::uint64_t pi_hi = pi_internal(hi);
    if (!(pi_lo < k && k <= pi_hi))
      throw std::logic_error("nth_prime: bracket invariant violated");
    std::uint64_t width = hi - lo;
    bool bisect_next = false;
    while (hi - lo > kInvertScanWindow) {
      std::uint64_t guess;
      if (bisect_next) {
        guess = lo + (hi - lo) / 2;
      } else {
        const long double t = static_cast<long double>(k - pi_lo) /
                              static_cast<long double>(pi_hi - pi_lo);
        guess = lo + static_cast<std::uint64_t>(
                         t * static_cast<long double>(hi - lo));
        guess = std::clamp(guess, lo + 1, hi - 1);
      }
      const std::uint64_t pg = pi_internal(guess);
      if (pg >= k) {
        hi = guess;
        pi_hi = pg;
      } else {
        lo = guess;
        pi_lo = pg;
      }
      bisect_next = (hi - lo) > width - width / 8;  // poor shrink: alternate
      width = hi - lo;
    }
    std::uint64_t count = pi_lo;
    for (std::uint64_t x = lo + 1; x <= hi; ++x) {
      if (!is_prime_internal_uncapped(x)) continue;
      if (++count == k) {
        check_range("nth_prime (result)", x);
        return x;
      }
    }
    throw std::logic_error("nth_prime: window scan overran bracket");
  }

  bool is_prime_internal_uncapped(std::uint64_t x) const {
    return x <= cfg_.sieve_limit ? is_prime_internal(x)
                                 : detail::miller_rabin_u64(x);
  }

  EngineConfig cfg_;
  std::vector<std::uint64_t> bits_;  // bit j <=> 2j+1 is prime
  std::vector<std::uint64_t> cum_;   // set bits in words [0, w)
  std::uint64_t table_odd_primes_ = 0;
  mutable std::mutex cache_mu_;
  mutable std::unordered_map<std::uint64_t, std::uint64_t> pi_cache_;
};

}  // namespace primepoint
