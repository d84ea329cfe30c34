// Acceptance suite: one criterion per letter code, one PASS/FAIL line each.
// Usage: wuplab_acceptance [A1|A2|A3|A4|A5|A6|A7|all]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "wuplab/attacks/cca2.hpp"
#include "wuplab/attacks/factor_modulus.hpp"
#include "wuplab/attacks/mitm.hpp"
#include "wuplab/attacks/prng_attack.hpp"
#include "wuplab/oracle.hpp"
#include "wuplab/update_sim.hpp"

using namespace wuplab;
using numtheory::BigUint;
using numtheory::RandomSource;

namespace {

struct Check {
  std::vector<std::string> failures;
  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

victim_prng::SessionKey random_key(RandomSource& rng) {
  Bytes b(16);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng());
  return victim_prng::session_key_from_bytes(view(b));
}

wup::WupMessage client_request() {
  wup::WupMessage msg;
  msg.kind = wup::MsgKind::request;
  msg.add_field("imei", std::string_view("862012034001337"));
  msg.add_field("page", std::string_view("https://example.test/"));
  return msg;
}

rsa::RsaKeyPair fixture_key_1024() {
  RandomSource rng(0xA11CE);
  return rsa::keygen(1024, 65537, rng);
}

// A1: the 128-bit modulus factors into the two published primes.
Check criterion_a1() {
  Check c;
  BigUint n("245406417573740884710047745869965023463");
  auto f = attacks::factor_modulus(n);
  c.require(f.factors.size() == 2, "expected exactly two prime factors");
  if (f.factors.size() == 2) {
    c.require(f.factors[0].first == BigUint("14119218591450688427"),
              "smaller factor != 14119218591450688427");
    c.require(f.factors[0].second == 1, "smaller factor exponent != 1");
    c.require(f.factors[1].first == BigUint("17381019776996486069"),
              "larger factor != 17381019776996486069");
    c.require(f.factors[1].second == 1, "larger factor exponent != 1");
  }
  c.require(f.product() == n, "factor product mismatch");
  return c;
}

// A2: 50 random victim keys, each recovered with exactly 128 oracle queries.
Check criterion_a2() {
  Check c;
  rsa::RsaKeyPair kp = fixture_key_1024();
  RandomSource rng(0xBEEF);
  for (int i = 0; i < 50; ++i) {
    oracle::Oracle server({.key_pair = kp});
    auto victim_key = random_key(rng);
    wup::EncryptedSession victim = wup::seal_session(kp.pub, victim_key, client_request());
    auto result = attacks::cca2_attack(victim, oracle::in_process_oracle(server), kp.pub);
    c.require(result.recovered_key.bytes == victim_key.bytes,
              "key " + std::to_string(i) + ": recovered bytes differ");
    c.require(result.queries == 128, "key " + std::to_string(i) + ": queries != 128");
    c.require(server.transcript().size() == 128,
              "key " + std::to_string(i) + ": oracle transcript != 128 entries");
    c.require(result.recovered_valid, "key " + std::to_string(i) + ": local validation failed");
  }
  return c;
}

// A3: 20 sessions with offsets uniform inside +/-35s, all recovered in fewer
// than 70,000 guesses and within the 2|offset|+1 enumeration bound.
Check criterion_a3() {
  Check c;
  rsa::RsaKeyPair kp = fixture_key_1024();
  RandomSource rng(0xC0FFEE);
  const std::int64_t observed_at = 1'650'000'000'000;
  for (int i = 0; i < 20; ++i) {
    // uniform over [-34999, +34999]: the open interval the strict bound implies
    std::int64_t offset = static_cast<std::int64_t>(rng() % 69999) - 34999;
    auto victim_key = victim_prng::keygen_v65(observed_at + offset);
    wup::EncryptedSession sess = wup::seal_session(kp.pub, victim_key, client_request());
    auto result = attacks::prng_attack(sess, observed_at, 35000);
    c.require(result.key.bytes == victim_key.bytes,
              "session " + std::to_string(i) + ": wrong key");
    c.require(result.guesses < 70000,
              "session " + std::to_string(i) + ": guesses " + std::to_string(result.guesses) +
                  " not < 70000");
    c.require(result.guesses <= 2 * static_cast<std::uint64_t>(std::llabs(offset)) + 1,
              "session " + std::to_string(i) + ": guesses exceed 2|offset|+1");
  }
  return c;
}

// A4: Table-1 64-bit rows at 2000 samples, within +/-3 percentage points.
Check criterion_a4() {
  Check c;
  struct Row {
    unsigned m1, m2;
    double expected;
  };
  const Row rows[] = {{32, 32, 0.17}, {33, 33, 0.29}, {34, 34, 0.33}, {30, 36, 0.40}};
  for (const Row& row : rows) {
    RandomSource rng(0xD00D + row.m1 * 64 + row.m2);
    auto est = attacks::split_probability(64, row.m1, row.m2, 2000, rng);
    double diff = std::abs(est.probability - row.expected);
    char buf[160];
    std::snprintf(buf, sizeof(buf), "(%u,%u): got %.3f, expected %.2f +/- 0.03 (skipped %llu)",
                  row.m1, row.m2, est.probability, row.expected,
                  static_cast<unsigned long long>(est.skipped));
    c.require(diff <= 0.03, buf);
    c.require(est.skipped == 0, "64-bit sampling must not skip");
  }
  return c;
}

// A5: against the OAEP oracle the attack recovers nothing and the oracle
// accepts zero attacker queries.
Check criterion_a5() {
  Check c;
  rsa::RsaKeyPair kp = fixture_key_1024();
  RandomSource rng(0xFACE);
  oracle::Oracle server({.key_pair = kp, .wrap = oracle::KeyWrap::oaep});
  auto victim_key = random_key(rng);
  wup::EncryptedSession victim = wup::seal_session_oaep(kp.pub, victim_key, client_request(), rng);
  // sanity: an honest padded client is accepted
  c.require(server.handle_session(victim, "victim").has_value(), "honest OAEP session rejected");
  std::size_t before = server.transcript().accepted_count();

  auto result = attacks::cca2_attack(victim, oracle::in_process_oracle(server), kp.pub);
  c.require(!result.recovered_valid, "attack claims success against OAEP");
  c.require(result.recovered_key.bytes != victim_key.bytes, "attack recovered the OAEP key");
  c.require(server.transcript().accepted_count() == before,
            "oracle accepted attacker queries under OAEP");
  return c;
}

// A6: toy 20-bit keys recovered 100/100 via the table, plus the exact
// published cost figures.
Check criterion_a6() {
  Check c;
  RandomSource key_rng(0x5EED);
  rsa::RsaKeyPair kp = rsa::keygen(128, 65537, key_rng);
  auto table = attacks::mitm_build_table(kp.pub, 10);
  RandomSource rng(0x1DEA);
  int recovered = 0;
  for (int i = 0; i < 100; ++i) {
    BigUint m1 = 1 + rng() % 1024;
    BigUint m2 = 1 + rng() % 1024;
    BigUint k = m1 * m2;
    auto found = attacks::mitm_attack(table, rsa::encrypt_raw(kp.pub, k), 10);
    if (found && *found == k) ++recovered;
  }
  c.require(recovered == 100, "recovered " + std::to_string(recovered) + "/100 constructed keys");

  auto cost = attacks::mitm_cost(64, 64, 128);
  c.require(cost.table_bytes_human == "295,148 petabytes",
            "table size reads '" + cost.table_bytes_human + "'");
  c.require(cost.exponentiations == (BigUint(1) << 64), "exponentiations != 2^64");
  c.require(cost.table_bits == (BigUint(1) << 65) * 64, "table bits formula drifted");
  return c;
}

// A7: the six scripted update scenarios, plus the sandbox-escape ledger.
Check criterion_a7() {
  Check c;
#ifndef WUPLAB_SCENARIO_DIR
#error "WUPLAB_SCENARIO_DIR must point at the scenarios directory"
#endif
  const std::filesystem::path dir = WUPLAB_SCENARIO_DIR;
  const char* names[] = {
      "honest_android",         "android_hash_mismatch",       "android_v63_forged_metadata",
      "honest_windows",         "windows_directory_traversal", "windows_signed_substitution",
  };
  auto sandbox = std::filesystem::temp_directory_path() / "wuplab_acceptance_a7";
  std::filesystem::remove_all(sandbox);
  std::size_t outside_writes = 0;
  for (const char* name : names) {
    auto scenario = update_sim::load_scenario(dir / (std::string(name) + ".json"));
    auto result = update_sim::run_scenario(scenario, sandbox, 0x7777);
    for (const auto& m : result.mismatches) {
      c.require(false, std::string(name) + ": " + m);
    }
    outside_writes += result.writes_outside_sandbox;
  }
  c.require(outside_writes == 0, "sandbox-escape write count != 0");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::pair<const char*, std::function<Check()>>> criteria = {
      {"A1", {"128-bit modulus factors into the published primes", criterion_a1}},
      {"A2", {"CCA2 recovers 50/50 keys at exactly 128 queries each", criterion_a2}},
      {"A3", {"PRNG attack stays under 70,000 guesses across +/-35s offsets", criterion_a3}},
      {"A4", {"split probabilities reproduce the 64-bit table rows within 3pp", criterion_a4}},
      {"A5", {"OAEP remediation defeats the CCA2 attack outright", criterion_a5}},
      {"A6", {"toy meet-in-the-middle recovers 100/100; cost figures exact", criterion_a6}},
      {"A7", {"all six update scenarios match and nothing escapes the sandbox", criterion_a7}},
  };

  std::string selection = argc > 1 ? argv[1] : "all";
  int failures = 0;
  for (const auto& [code, entry] : criteria) {
    if (selection != "all" && selection != code) continue;
    auto start = std::chrono::steady_clock::now();
    Check result;
    try {
      result = entry.second();
    } catch (const std::exception& e) {
      result.failures.push_back(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (result.failures.empty()) {
      std::printf("[PASS] %s: %s (%.1fs)\n", code.c_str(), entry.first, secs);
    } else {
      ++failures;
      std::printf("[FAIL] %s: %s (%.1fs)\n", code.c_str(), entry.first, secs);
      for (const auto& f : result.failures) std::printf("       - %s\n", f.c_str());
    }
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
