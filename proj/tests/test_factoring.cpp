#include <doctest.h>

#include "wuplab/attacks/factor_modulus.hpp"
#include "wuplab/detail/mont128.hpp"
#include "wuplab/factoring.hpp"
#include "wuplab/numtheory.hpp"

using namespace wuplab;
using namespace wuplab::numtheory;

namespace {

// independent trial-division oracle for small inputs
std::vector<std::uint64_t> trial_division(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      out.push_back(p);
      n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace

TEST_CASE("factorize small values") {
  auto f15 = factorize(15);
  REQUIRE(f15.factors.size() == 2);
  CHECK(f15.factors[0].first == 3);
  CHECK(f15.factors[1].first == 5);

  auto f3233 = factorize(3233);
  REQUIRE(f3233.factors.size() == 2);
  CHECK(f3233.factors[0].first == 53);
  CHECK(f3233.factors[1].first == 61);

  CHECK(factorize(1).factors.empty());
  CHECK(factorize(1024).factors == std::vector<std::pair<BigUint, unsigned>>{{2, 10}});
  CHECK_THROWS_AS(factorize(0), std::invalid_argument);
}

TEST_CASE("factorize_u64 matches trial division") {
  RandomSource rng(7);
  for (int i = 0; i < 200; ++i) {
    std::uint64_t n = 1 + (rng() & 0xFFFFFF);  // 24-bit: trial division oracle stays fast
    CAPTURE(n);
    CHECK(factorize_u64(n) == trial_division(n));
  }
}

TEST_CASE("factorization product and primality invariants") {
  RandomSource rng(8);
  for (int i = 0; i < 100; ++i) {
    BigUint n = 1 + random_bits(rng, 48);
    auto f = factorize(n);
    CHECK(f.product() == n);
    for (const auto& [prime, exp] : f.factors) {
      CAPTURE(prime);
      CHECK(exp >= 1);
      CHECK(is_probable_prime(prime));
    }
  }
}

TEST_CASE("construct-and-factor on 64-bit semiprimes") {
  RandomSource rng(9);
  BigUint p = gen_prime(32, rng);
  BigUint q = gen_prime(32, rng);
  auto f = factorize(p * q);
  REQUIRE(f.factors.size() == 2);
  CHECK(f.factors[0].first == std::min(p, q));
  CHECK(f.factors[1].first == std::max(p, q));
}

TEST_CASE("construct-and-factor through the 128-bit montgomery engine") {
  RandomSource rng(10);
  BigUint p = gen_prime(40, rng);
  BigUint q = gen_prime(40, rng);
  BigUint n = p * q;   // 80 bits: must route through the u128 path
  REQUIRE(bit_length(n) > 64);
  auto f = factorize(n);
  REQUIRE(f.factors.size() == 2);
  CHECK(f.factors[0].first * f.factors[1].first == n);
  CHECK(f.iterations > 0);
}

TEST_CASE("factoring budget is enforced and reported") {
  RandomSource rng(11);
  BigUint p = gen_prime(56, rng);
  BigUint q = gen_prime(56, rng);
  FactorOptions opts;
  opts.budget = 1000;  // far too small for ~2^28 expected iterations
  try {
    factorize(p * q, opts);
    FAIL("expected BudgetExhausted");
  } catch (const BudgetExhausted& e) {
    CHECK(e.iterations >= 1000);
    CHECK(std::string(e.what()).find("budget") != std::string::npos);
  }
}

TEST_CASE("factor_modulus rejects non-composites") {
  CHECK_THROWS_AS(attacks::factor_modulus(BigUint("17381019776996486069")),
                  attacks::NotComposite);
  CHECK_THROWS_AS(attacks::factor_modulus(1), attacks::NotComposite);
  CHECK_THROWS_AS(attacks::factor_modulus(7), attacks::NotComposite);
  auto f = attacks::factor_modulus(3233);
  CHECK(f.factors.size() == 2);
}

TEST_CASE("montgomery core agrees with GMP") {
  using numtheory::detail::Mont128;
  using u128 = unsigned __int128;
  RandomSource rng(12);

  auto to_mpz = [](u128 x) -> BigUint {
    BigUint hi(static_cast<unsigned long>(x >> 64));
    return (hi << 64) + static_cast<unsigned long>(x);
  };
  auto to_u128 = [](const BigUint& x) {
    return (u128(BigUint(x >> 64).get_ui()) << 64) | x.get_ui();
  };

  for (int i = 0; i < 500; ++i) {
    unsigned bits = 65 + rng() % 63;
    BigUint nz = random_bits(rng, bits) | 1;
    if (nz < 3) continue;
    u128 n = to_u128(nz);
    Mont128 mont(n);
    u128 a = (u128(rng()) << 64 | rng()) % n;
    u128 b = (u128(rng()) << 64 | rng()) % n;

    CHECK(to_mpz(mont.from_mont(mont.to_mont(a))) == to_mpz(a));
    BigUint expect_mul = to_mpz(a) * to_mpz(b) % nz;
    CHECK(to_mpz(mont.from_mont(mont.mul(mont.to_mont(a), mont.to_mont(b)))) == expect_mul);
    BigUint expect_add = (to_mpz(a) + to_mpz(b)) % nz;
    CHECK(to_mpz(mont.add(a, b)) == expect_add);
    BigUint expect_sub = (to_mpz(a) - to_mpz(b) % nz + nz) % nz;
    CHECK(to_mpz(mont.sub(a, b)) == expect_sub);
  }
}

TEST_CASE("serial and parallel factoring agree") {
  RandomSource rng(13);
  for (int i = 0; i < 5; ++i) {
    BigUint p = gen_prime(36, rng);
    BigUint q = gen_prime(36, rng);
    BigUint n = p * q;
    FactorOptions serial{.budget = std::uint64_t(1) << 30, .exec = Exec::serial};
    FactorOptions parallel{.budget = std::uint64_t(1) << 30, .exec = Exec::parallel};
    CHECK(factorize(n, serial).factors == factorize(n, parallel).factors);
  }
}
