#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wuplab/bigint.hpp"
#include "wuplab/exec.hpp"

namespace wuplab::numtheory {

struct BudgetExhausted : std::runtime_error {
  std::uint64_t iterations;
  explicit BudgetExhausted(std::uint64_t its)
      : std::runtime_error("factoring budget exhausted"), iterations(its) {}
};

struct Factorization {
  // (prime, exponent) pairs, primes strictly ascending
  std::vector<std::pair<BigUint, unsigned>> factors;
  std::uint64_t iterations = 0;  // rho iterations spent
  BigUint product() const;
};

struct FactorOptions {
  std::uint64_t budget = std::uint64_t(1) << 34;  // rho iteration cap
  Exec exec = Exec::parallel;
};

// Trial division below 10^4, then Brent's cycle variant of Pollard rho with
// batched gcd (batch of 128) and a fresh polynomial constant per restart.
// Values up to 128 bits use fixed-width Montgomery arithmetic; anything wider
// falls back to GMP and is only practical when its factors are small.
// Intended for semiprimes with factors around 2^64 and below.
Factorization factorize(const BigUint& n, const FactorOptions& opts = {});

// Fast path for 64-bit values: prime factors ascending, with multiplicity.
std::vector<std::uint64_t> factorize_u64(std::uint64_t n);

}  // namespace wuplab::numtheory
