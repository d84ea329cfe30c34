#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wuplab/exec.hpp"
#include "wuplab/factoring.hpp"
#include "wuplab/rsa.hpp"

namespace wuplab::attacks {

using numtheory::BigUint;
using numtheory::RandomSource;

// Precomputed half of the meet-in-the-middle key search: M1^e mod n for every
// M1 up to 2^m1, sorted for binary search. Built once per (n, e); reusable
// against every ciphertext under that key.
struct MitmTable {
  struct Entry {
    BigUint value;  // M1^e mod n
    std::uint64_t m1_candidate;
  };
  unsigned m1 = 0;
  BigUint modulus;
  BigUint exponent;
  std::vector<Entry> entries;  // sorted by value, 2^m1 of them
};

inline constexpr unsigned kMitmTableGuardBits = 28;

// Throws std::invalid_argument (with the memory estimate) when m1 exceeds the
// desk-scale guard and allow_large is not set.
MitmTable mitm_build_table(const rsa::RsaPublicKey& pub, unsigned m1, Exec exec = Exec::parallel,
                           bool allow_large = false);

// Searches M2 = 1..2^m2 for c * (M2^e)^-1 == M1^e (mod n); a hit means the
// plaintext splits as M = M1*M2. Every returned M is verified by re-encryption;
// nullopt simply means the key did not split within the bounds.
std::optional<BigUint> mitm_attack(const MitmTable& table, const BigUint& c, unsigned m2);

struct MitmCost {
  unsigned m1, m2, key_bits;
  BigUint table_bits;        // 2^(m1+1) * max(m1, m2)
  BigUint exponentiations;   // 2^m2
  std::string table_bytes_human;  // SI petabytes (10^15 bytes), rounded
};

MitmCost mitm_cost(unsigned m1, unsigned m2, unsigned key_bits);

// ---------------------------------------------------------------------------
// Probability that a random value splits as M1*M2 within the bounds.

struct SplitEstimate {
  unsigned bit_length, m1, m2;
  std::uint64_t samples = 0;
  std::uint64_t successes = 0;
  std::uint64_t skipped = 0;  // factoring budget ran out (128-bit sampling only)
  double probability = 0.0;   // successes / samples
};

struct SplitOptions {
  std::uint64_t per_sample_budget = std::uint64_t(1) << 26;
  Exec exec = Exec::parallel;
};

// Draws `samples` uniform values below 2^bit_length, fully factors each and
// checks for a divisor d with d <= 2^m1 and M/d <= 2^m2 (the complementary
// divisor covers the symmetric assignment). bit_length up to 128; above 64
// the per-sample factoring budget applies and exhausted samples are skipped.
SplitEstimate split_probability(unsigned bit_length, unsigned m1, unsigned m2,
                                std::uint64_t samples, RandomSource& rng,
                                const SplitOptions& opts = {});

// Divisor-split decision over a complete prime factorization (ascending, with
// multiplicity). Exposed so tests can pit it against brute-force enumeration.
bool splits_within(std::uint64_t value, const std::vector<std::uint64_t>& prime_factors,
                   unsigned m1, unsigned m2);
bool splits_within(const BigUint& value,
                   const std::vector<std::pair<BigUint, unsigned>>& factorization, unsigned m1,
                   unsigned m2);

}  // namespace wuplab::attacks
