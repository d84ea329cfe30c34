#include <doctest.h>

#include <set>

#include "wuplab/bigint.hpp"
#include "wuplab/victim_prng.hpp"

using namespace wuplab;
using namespace wuplab::victim_prng;

TEST_CASE("seed scramble") {
  Lcg48 gen(0);
  CHECK(gen.state() == 0x5DEECE66Dull);  // seed 0: XOR with the multiplier
  gen.set_seed(0x5DEECE66Dull);
  CHECK(gen.state() == 0);
}

TEST_CASE("first draw after seed 0 matches the wide-arithmetic oracle") {
  // state1 = (0x5DEECE66D^2 + 0xB) mod 2^48, next(32) returns its top 32 bits
  numtheory::BigUint m(static_cast<unsigned long>(0x5DEECE66Dull));
  numtheory::BigUint state1 = (m * m + 0xB) % (numtheory::BigUint(1) << 48);
  numtheory::BigUint expected = state1 >> 16;
  Lcg48 gen(0);
  CHECK(gen.next(32) == expected.get_ui());
  CHECK(expected.get_ui() == 0xbb20b460u);
}

TEST_CASE("equal seeds, equal streams") {
  Lcg48 a(987654321), b(987654321);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next(32) == b.next(32));
}

TEST_CASE("state stays within 48 bits") {
  Lcg48 gen(0xDEADBEEF);
  for (int i = 0; i < 1'000'000; ++i) {
    gen.next(17);
    REQUIRE(gen.state() < (1ull << 48));
  }
}

TEST_CASE("next_int bounds") {
  Lcg48 gen(555);
  for (int i = 0; i < 100; ++i) CHECK(gen.next_int(1) == 0);
  for (int i = 0; i < 100'000; ++i) {
    std::int32_t v = gen.next_int(89999999);
    REQUIRE(v >= 0);
    REQUIRE(v < 89999999);
  }
  CHECK_THROWS_AS(gen.next_int(0), std::invalid_argument);
  CHECK_THROWS_AS(gen.next_int(-3), std::invalid_argument);
}

TEST_CASE("next_int reference trace, seed 12345") {
  // first ten nextInt(89999999) draws from the documented 48-bit LCG algorithm
  const std::int32_t expected[10] = {56966259, 22109092, 23588263, 79488849, 79050074,
                                     80902084, 71101382, 87722804, 55783506, 75883389};
  Lcg48 gen(12345);
  for (int i = 0; i < 10; ++i) CHECK(gen.next_int(89999999) == expected[i]);
}

TEST_CASE("next_bytes fills least-significant byte first") {
  Lcg48 gen(42);
  std::uint8_t out[8];
  gen.next_bytes(std::span(out, 8));
  Lcg48 ref(42);
  std::uint32_t r1 = ref.next(32), r2 = ref.next(32);
  for (int i = 0; i < 4; ++i) {
    CHECK(out[i] == static_cast<std::uint8_t>(r1 >> (8 * i)));
    CHECK(out[4 + i] == static_cast<std::uint8_t>(r2 >> (8 * i)));
  }
}

TEST_CASE("v6.3 keys are sixteen ASCII digits") {
  numtheory::RandomSource rng(30);
  for (int i = 0; i < 200; ++i) {
    SessionKey key = keygen_v63(rng(), rng());
    CHECK(key.origin == KeyOrigin::v63);
    for (std::uint8_t b : key.bytes) {
      REQUIRE(b >= '0');
      REQUIRE(b <= '9');
    }
  }
}

TEST_CASE("v6.3 key reference values and determinism") {
  SessionKey key = keygen_v63(1, 2);
  CHECK(to_hex(ByteView(key.bytes.data(), 16)) == "34393534393030323530313236313235");
  CHECK(to_string(ByteView(key.bytes.data(), 16)) == "4954900250126125");
  CHECK(keygen_v63(7, 8).bytes == keygen_v63(7, 8).bytes);
  CHECK(keygen_v63_at(1000).seed_millis == 1000);
}

TEST_CASE("v6.3 keyspace is below 2^53") {
  numtheory::BigUint space = numtheory::BigUint(89999999) * 89999999;
  CHECK(space < (numtheory::BigUint(1) << 53));
}

TEST_CASE("v6.5 key is a pure function of the timestamp") {
  numtheory::RandomSource rng(31);
  for (int i = 0; i < 1000; ++i) {
    std::int64_t t = static_cast<std::int64_t>(rng() % (1ull << 42));
    SessionKey a = keygen_v65(t);
    SessionKey b = keygen_v65(t);
    REQUIRE(a.bytes == b.bytes);
    REQUIRE(a.seed_millis == t);
  }
}

TEST_CASE("v6.5 adjacent timestamps do not collide") {
  numtheory::RandomSource rng(32);
  for (int i = 0; i < 10'000; ++i) {
    std::int64_t t = static_cast<std::int64_t>(rng() % (1ull << 42));
    REQUIRE(keygen_v65(t).bytes != keygen_v65(t + 1).bytes);
  }
}

TEST_CASE("v6.5 byte layout: first draw fills bytes 0-7, second 8-15") {
  const std::int64_t t = 1461234567890;
  SessionKey key = keygen_v65(t);
  Lcg48 gen(static_cast<std::uint64_t>(t));
  std::uint8_t first[8], second[8];
  gen.next_bytes(std::span(first, 8));
  gen.next_bytes(std::span(second, 8));
  for (int i = 0; i < 8; ++i) {
    CHECK(key.bytes[i] == first[i]);
    CHECK(key.bytes[8 + i] == second[i]);
  }
  // frozen trace from the documented generator algorithm
  CHECK(to_hex(ByteView(key.bytes.data(), 16)) == "f6dc1e9b70444a2c87b05f8755a5671c");
  CHECK(to_hex(ByteView(keygen_v65(0).bytes.data(), 16)) == "60b420bb3851d9d47acb933dbe70399b");
}

TEST_CASE("session_key_from_bytes validates length") {
  CHECK_THROWS_AS(session_key_from_bytes(Bytes(15, 0)), std::invalid_argument);
  Bytes raw(16, 0x7);
  CHECK(session_key_from_bytes(view(raw)).origin == KeyOrigin::external);
}
