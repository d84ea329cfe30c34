#include <doctest.h>

#include "wuplab/numtheory.hpp"

using namespace wuplab;
using namespace wuplab::numtheory;

namespace {

// brute-force oracle: multiply base by itself exp times, reducing as we go
BigUint naive_mod_pow(const BigUint& base, std::uint64_t exp, const BigUint& modulus) {
  BigUint r = 1 % modulus;
  for (std::uint64_t i = 0; i < exp; ++i) r = r * base % modulus;
  return r;
}

}  // namespace

TEST_CASE("mod_pow basic values") {
  CHECK(mod_pow(2, 10, 1000) == 24);
  CHECK(mod_pow(65, 17, 3233) == naive_mod_pow(65, 17, 3233));
  CHECK(mod_pow(65, 17, 3233) == 2790);
  CHECK(mod_pow(0, 0, 7) == 1);  // 0^0 == 1 by the square-and-multiply identity
  CHECK_THROWS_AS(mod_pow(2, 3, 1), std::domain_error);
  CHECK_THROWS_AS(mod_pow(2, 3, 0), std::domain_error);
}

TEST_CASE("mod_pow identity exponent") {
  RandomSource rng(1);
  for (int i = 0; i < 20; ++i) {
    BigUint n = 2 + random_bits(rng, 40);
    BigUint x = random_bits(rng, 48);
    CHECK(mod_pow(x, 1, n) == x % n);
  }
}

TEST_CASE("mod_pow matches the naive oracle on small instances") {
  RandomSource rng(2);
  for (int i = 0; i < 200; ++i) {
    BigUint a = random_bits(rng, 14);
    std::uint64_t b = rng() % 4096;
    BigUint m = 2 + random_bits(rng, 12);
    CAPTURE(a);
    CAPTURE(b);
    CAPTURE(m);
    CHECK(mod_pow(a, BigUint(static_cast<unsigned long>(b)), m) == naive_mod_pow(a, b, m));
  }
}

TEST_CASE("mod_inv") {
  CHECK(mod_inv(3, 7) == 5);
  CHECK(mod_inv(1, 97) == 1);
  CHECK_THROWS_AS(mod_inv(6, 9), NotCoprime);
  CHECK_THROWS_AS(mod_inv(0, 9), NotCoprime);

  RandomSource rng(3);
  int checked = 0;
  while (checked < 1000) {
    BigUint m = 2 + random_bits(rng, 64);
    BigUint a = random_below(rng, m);
    BigUint g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    if (g != 1) continue;
    BigUint inv = mod_inv(a, m);
    REQUIRE(inv >= 0);
    REQUIRE(inv < m);
    REQUIRE(a * inv % m == 1);
    ++checked;
  }
}

TEST_CASE("miller-rabin on the published factors") {
  CHECK(is_probable_prime(BigUint("17381019776996486069")));
  CHECK(is_probable_prime(BigUint("14119218591450688427")));
  CHECK_FALSE(is_probable_prime(4));
  CHECK_FALSE(is_probable_prime(BigUint("245406417573740884710047745869965023463")));
}

TEST_CASE("miller-rabin agrees with a sieve below 10^6") {
  constexpr std::uint32_t kLimit = 1'000'000;
  std::vector<bool> composite(kLimit, false);
  for (std::uint32_t i = 2; i < kLimit; ++i) {
    if (composite[i]) continue;
    for (std::uint64_t j = std::uint64_t(i) * i; j < kLimit; j += i) composite[j] = true;
  }
  for (std::uint32_t i = 2; i < kLimit; ++i) {
    if (!composite[i]) {
      if (!is_prime_u64(i)) {
        CAPTURE(i);
        REQUIRE(is_prime_u64(i));
      }
    }
  }
  // spot-check composites as well
  RandomSource rng(4);
  for (int i = 0; i < 10000; ++i) {
    std::uint32_t n = 4 + rng() % (kLimit - 4);
    CAPTURE(n);
    REQUIRE(is_prime_u64(n) == !composite[n]);
  }
}

TEST_CASE("miller-rabin rejects strong-pseudoprime bait") {
  // Carmichael numbers and base-2 pseudoprimes
  for (std::uint64_t n : {561ull, 1105ull, 1729ull, 2047ull, 3215031751ull, 341550071728321ull}) {
    CAPTURE(n);
    CHECK_FALSE(is_prime_u64(n));
  }
}

TEST_CASE("gen_prime") {
  RandomSource rng(5);
  BigUint p = gen_prime(512, rng);
  CHECK(bit_length(p) == 512);
  CHECK(is_probable_prime(p, 40));

  RandomSource rng_a(77), rng_b(77);
  CHECK(gen_prime(128, rng_a) == gen_prime(128, rng_b));
  CHECK_THROWS_AS(gen_prime(8, rng), std::invalid_argument);
}

TEST_CASE("biguint codecs round-trip") {
  RandomSource rng(6);
  for (int i = 0; i < 100; ++i) {
    BigUint x = random_bits(rng, 1 + rng() % 256);
    CHECK(from_decimal(to_decimal(x)) == x);
    CHECK(from_bytes_be(view(to_bytes_be(x))) == x);
  }
  CHECK(to_bytes_be(0).empty());
  CHECK(from_bytes_be({}) == 0);
  CHECK(to_bytes_be_padded(0x1234, 4) == Bytes{0x00, 0x00, 0x12, 0x34});
  CHECK_THROWS_AS(to_bytes_be_padded(0x123456, 2), std::invalid_argument);
  CHECK_THROWS_AS(from_decimal("12a3"), std::invalid_argument);
  CHECK_THROWS_AS(from_decimal(""), std::invalid_argument);
}
