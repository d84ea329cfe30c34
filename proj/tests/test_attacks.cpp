#include <doctest.h>

#include "helpers.hpp"
#include "wuplab/attacks/cca2.hpp"
#include "wuplab/attacks/prng_attack.hpp"

using namespace wuplab;
using namespace wuplab::attacks;
using numtheory::RandomSource;

TEST_CASE("cca2 recovers a random 128-bit key in exactly 128 queries") {
  rsa::RsaKeyPair kp = test::cached_key(1024);
  oracle::Oracle server({.key_pair = kp});
  RandomSource rng(70);
  auto victim_key = test::random_session_key(rng);
  wup::EncryptedSession victim = wup::seal_session(kp.pub, victim_key, test::sample_request());

  Cca2Result result = cca2_attack(victim, oracle::in_process_oracle(server), kp.pub);
  CHECK(result.recovered_key.bytes == victim_key.bytes);
  CHECK(result.queries == 128);
  CHECK(result.per_bit_outcomes.size() == 128);
  CHECK(result.recovered_valid);
  CHECK(server.transcript().size() == 128);
}

TEST_CASE("cca2 on the all-zero key gets 128 answers") {
  rsa::RsaKeyPair kp = test::cached_key(1024);
  oracle::Oracle server({.key_pair = kp});
  auto victim_key = victim_prng::session_key_from_bytes(Bytes(16, 0));
  wup::EncryptedSession victim = wup::seal_session(kp.pub, victim_key, test::sample_request());

  Cca2Result result = cca2_attack(victim, oracle::in_process_oracle(server), kp.pub);
  CHECK(result.recovered_key.bytes == victim_key.bytes);
  CHECK(result.queries == 128);
  for (bool accepted : result.per_bit_outcomes) CHECK(accepted);
  CHECK(server.transcript().accepted_count() == 128);
}

TEST_CASE("scaled-down 8-bit variant: brute force over all 256 keys") {
  rsa::RsaKeyPair kp = test::cached_key(128);
  for (unsigned k = 0; k < 256; ++k) {
    oracle::Oracle server({.key_pair = kp, .key_bits = 8});
    Bytes key_bytes(16, 0);
    key_bytes[15] = static_cast<std::uint8_t>(k);
    auto victim_key = victim_prng::session_key_from_bytes(view(key_bytes));
    wup::EncryptedSession victim = wup::seal_session(kp.pub, victim_key, test::sample_request());

    Cca2Result result = cca2_attack(victim, oracle::in_process_oracle(server), kp.pub, 8);
    REQUIRE(result.queries == 8);
    REQUIRE(result.recovered_key.bytes == victim_key.bytes);
    REQUIRE(server.transcript().size() == 8);
  }
}

TEST_CASE("cca2 against the padded oracle fails and never gets an accept") {
  rsa::RsaKeyPair kp = test::cached_key(1024);
  oracle::Oracle server({.key_pair = kp, .wrap = oracle::KeyWrap::oaep});
  RandomSource rng(71);
  auto victim_key = test::random_session_key(rng);
  wup::EncryptedSession victim =
      wup::seal_session_oaep(kp.pub, victim_key, test::sample_request(), rng);

  Cca2Result result = cca2_attack(victim, oracle::in_process_oracle(server), kp.pub);
  CHECK(result.queries == 128);
  CHECK_FALSE(result.recovered_valid);
  CHECK(result.recovered_key.bytes != victim_key.bytes);
  CHECK(server.transcript().accepted_count() == 0);
}

TEST_CASE("transport hiccups are retried without double-counting queries") {
  rsa::RsaKeyPair kp = test::cached_key(256);
  oracle::Oracle server({.key_pair = kp, .key_bits = 16});
  RandomSource rng(72);
  Bytes key_bytes(16, 0);
  key_bytes[14] = static_cast<std::uint8_t>(rng());
  key_bytes[15] = static_cast<std::uint8_t>(rng());
  auto victim_key = victim_prng::session_key_from_bytes(view(key_bytes));
  wup::EncryptedSession victim = wup::seal_session(kp.pub, victim_key, test::sample_request());

  int calls = 0;
  oracle::OracleFn flaky = [&](const wup::EncryptedSession& sess) -> std::optional<Bytes> {
    if (++calls % 3 == 0) throw oracle::TransportError("flaky");
    return server.handle_session(sess);
  };
  Cca2Result result = cca2_attack(victim, flaky, kp.pub, 16);
  CHECK(result.queries == 16);
  CHECK(result.recovered_key.bytes == victim_key.bytes);
}

TEST_CASE("seed search finds the key at the exact enumeration position") {
  const std::int64_t observed_at = 1'600'000'000'000;

  SUBCASE("zero offset, one guess") {
    auto victim = victim_prng::keygen_v65(observed_at);
    auto result = seed_search([&](const victim_prng::SessionKey& k) { return k == victim; },
                              observed_at, 100, Exec::serial);
    CHECK(result.guesses == 1);
    CHECK(result.key_millis == observed_at);
  }

  SUBCASE("offset -5000 lands within 10001 guesses") {
    auto victim = victim_prng::keygen_v65(observed_at - 5000);
    auto result = seed_search([&](const victim_prng::SessionKey& k) { return k == victim; },
                              observed_at, 35000);
    CHECK(result.guesses == 10001);
    CHECK(result.key_millis == observed_at - 5000);
  }

  SUBCASE("positive offsets are visited first") {
    auto victim = victim_prng::keygen_v65(observed_at + 7);
    auto result = seed_search([&](const victim_prng::SessionKey& k) { return k == victim; },
                              observed_at, 100);
    CHECK(result.guesses == 14);  // position of +7 in 0,+1,-1,+2,-2,...
  }
}

TEST_CASE("guess count is bounded by 2|offset|+1") {
  const std::int64_t observed_at = 1'600'000'000'000;
  RandomSource rng(73);
  for (int i = 0; i < 50; ++i) {
    std::int64_t offset = static_cast<std::int64_t>(rng() % 4001) - 2000;
    auto victim = victim_prng::keygen_v65(observed_at + offset);
    auto result = seed_search([&](const victim_prng::SessionKey& k) { return k == victim; },
                              observed_at, 2000, Exec::serial);
    CAPTURE(offset);
    CHECK(result.guesses <= 2 * static_cast<std::uint64_t>(std::abs(offset)) + 1);
    CHECK(result.key_millis == observed_at + offset);
  }
}

TEST_CASE("serial and parallel seed search agree") {
  const std::int64_t observed_at = 1'555'555'555'555;
  for (std::int64_t offset : {0ll, 1ll, -1ll, 123ll, -4096ll, 4097ll, -20000ll}) {
    auto victim = victim_prng::keygen_v65(observed_at + offset);
    attacks::KeyCheck check = [&](const victim_prng::SessionKey& k) { return k == victim; };
    auto serial = seed_search(check, observed_at, 25000, Exec::serial);
    auto parallel = seed_search(check, observed_at, 25000, Exec::parallel);
    CHECK(serial.guesses == parallel.guesses);
    CHECK(serial.key_millis == parallel.key_millis);
    CHECK(serial.key.bytes == parallel.key.bytes);
  }
}

TEST_CASE("radius exhaustion reports the guesses spent") {
  auto never = [](const victim_prng::SessionKey&) { return false; };
  try {
    seed_search(never, 0, 100, Exec::serial);
    FAIL("expected SeedNotInWindow");
  } catch (const SeedNotInWindow& e) {
    CHECK(e.guesses == 201);
  }
}

TEST_CASE("prng attack recovers a key from a captured v6.5 session") {
  rsa::RsaKeyPair kp = test::cached_key(1024);
  const std::int64_t key_time = 1'461'234'567'890;
  auto victim_key = victim_prng::keygen_v65(key_time);
  wup::EncryptedSession sess = wup::seal_session(kp.pub, victim_key, test::sample_request());

  // observed 1.2 seconds after the key was generated
  auto result = prng_attack(sess, key_time + 1200, 35000);
  CHECK(result.key.bytes == victim_key.bytes);
  CHECK(result.key_millis == key_time);
  CHECK(result.guesses <= 2 * 1200 + 1);
}
