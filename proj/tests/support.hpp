#pragma once

#include <cstdint>
#include <vector>

#include "primepoint/prime_engine.hpp"

// Independent reference implementations for differential tests. These stay
// deliberately naive: correctness of the tests must not lean on the code
// under test.
namespace support {

inline std::vector<bool> naive_sieve(std::uint64_t limit) {
  std::vector<bool> is_prime(limit + 1, true);
  is_prime[0] = false;
  if (limit >= 1) is_prime[1] = false;
  for (std::uint64_t i = 2; i * i <= limit; ++i)
    if (is_prime[i])
      for (std::uint64_t j = i * i; j <= limit; j += i) is_prime[j] = false;
  return is_prime;
}

inline std::vector<std::uint32_t> naive_pi_table(std::uint64_t limit) {
  const auto sieve = naive_sieve(limit);
  std::vector<std::uint32_t> pi(limit + 1, 0);
  std::uint32_t count = 0;
  for (std::uint64_t x = 0; x <= limit; ++x) {
    count += sieve[x];
    pi[x] = count;
  }
  return pi;
}

inline std::vector<std::uint64_t> naive_primes(std::uint64_t limit) {
  const auto sieve = naive_sieve(limit);
  std::vector<std::uint64_t> primes;
  for (std::uint64_t x = 2; x <= limit; ++x)
    if (sieve[x]) primes.push_back(x);
  return primes;
}

// Trial division, valid for x <= (limit of naive primes)^2.
inline bool naive_is_prime(std::uint64_t x,
                           const std::vector<std::uint64_t>& primes) {
  if (x < 2) return false;
  for (std::uint64_t p : primes) {
    if (p * p > x) break;
    if (x % p == 0) return false;
  }
  return true;
}

// Shared engines, built once per test binary. The small one keeps its table
// at the minimum so queries above 10^6 exercise the counting backend.
inline const primepoint::PrimeEngine& engine_small() {
  static const primepoint::PrimeEngine engine{
      primepoint::EngineConfig{.sieve_limit = 1'000'000}};
  return engine;
}

inline const primepoint::PrimeEngine& engine_mid() {
  static const primepoint::PrimeEngine engine{
      primepoint::EngineConfig{.sieve_limit = 20'000'000}};
  return engine;
}

}  // namespace support
