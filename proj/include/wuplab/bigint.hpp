#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <string>

#include "wuplab/bytes.hpp"

namespace wuplab::numtheory {

// Arbitrary-precision non-negative integer. GMP supplies the raw arithmetic;
// everything number-theoretic on top of it lives in numtheory.hpp/factoring.hpp.
using BigUint = mpz_class;

// Deterministic, splittable randomness for key generation and sampling.
using RandomSource = std::mt19937_64;

BigUint from_decimal(const std::string& s);  // throws std::invalid_argument on non-digits
std::string to_decimal(const BigUint& x);

// Canonical external byte form is big-endian, minimal length (0 -> empty).
BigUint from_bytes_be(ByteView bytes);
Bytes to_bytes_be(const BigUint& x);
// Fixed-width big-endian, left-padded with zeros; throws if x needs more than `width` bytes.
Bytes to_bytes_be_padded(const BigUint& x, std::size_t width);

std::size_t bit_length(const BigUint& x);  // bit_length(0) == 0
bool test_bit(const BigUint& x, std::size_t i);

BigUint random_bits(RandomSource& rng, std::size_t bits);       // uniform in [0, 2^bits)
BigUint random_below(RandomSource& rng, const BigUint& bound);  // uniform in [0, bound), bound >= 1

// splitmix64 step; used to derive independent per-item seeds from one master seed
// so parallel kernels stay deterministic regardless of worker count.
std::uint64_t mix64(std::uint64_t x);

}  // namespace wuplab::numtheory
