#pragma once

#include <stdexcept>

#include "wuplab/bigint.hpp"

namespace wuplab::numtheory {

struct NotCoprime : std::domain_error {
  NotCoprime() : std::domain_error("mod_inv: arguments are not coprime") {}
};

// base^exp mod modulus by left-to-right square-and-multiply; modulus >= 2.
BigUint mod_pow(const BigUint& base, const BigUint& exp, const BigUint& modulus);

// x in [0, modulus) with a*x == 1 (mod modulus); throws NotCoprime.
BigUint mod_inv(const BigUint& a, const BigUint& modulus);

// Miller-Rabin. Below 2^64 a fixed witness set makes the answer exact; above,
// witnesses are drawn from a generator seeded from n itself so the function
// stays pure. Composite -> false always; prime -> false w.p. <= 4^-rounds.
bool is_probable_prime(const BigUint& n, unsigned rounds = 40);
bool is_prime_u64(std::uint64_t n);

// Probable prime with exactly `bits` bits (top bit set); bits >= 16.
BigUint gen_prime(unsigned bits, RandomSource& rng);

}  // namespace wuplab::numtheory
