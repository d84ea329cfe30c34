// wuplab: one binary tying the lab together. Subcommands mirror the attack
// catalogue; --json turns every subcommand into a machine-readable tool with
// deterministic output for a fixed --seed (timestamps are suppressed).

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "wuplab/attacks/cca2.hpp"
#include "wuplab/attacks/factor_modulus.hpp"
#include "wuplab/attacks/mitm.hpp"
#include "wuplab/attacks/prng_attack.hpp"
#include "wuplab/numtheory.hpp"
#include "wuplab/oracle.hpp"
#include "wuplab/update_sim.hpp"

using namespace wuplab;
using json = nlohmann::ordered_json;
using numtheory::BigUint;
using numtheory::RandomSource;

namespace {

constexpr int kExitAttackFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitOracleUnreachable = 3;

struct GlobalConfig {
  std::uint64_t seed = 0;
  bool json_output = false;
  int verbosity = 0;
};

void emit(const GlobalConfig& cfg, const json& doc, const std::string& human) {
  if (cfg.json_output) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << human;
  }
}

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& addr) {
  auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw CLI::ValidationError("address must be host:port");
  return {addr.substr(0, colon),
          static_cast<std::uint16_t>(std::stoul(addr.substr(colon + 1)))};
}

wup::WupMessage demo_request() {
  wup::WupMessage msg;
  msg.kind = wup::MsgKind::request;
  msg.add_field("imei", std::string_view("862012034001337"));
  msg.add_field("page", std::string_view("https://example.test/"));
  return msg;
}

victim_prng::SessionKey random_key(RandomSource& rng) {
  Bytes b(16);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng());
  return victim_prng::session_key_from_bytes(view(b));
}

std::string key_hex(const victim_prng::SessionKey& key) {
  return to_hex(ByteView(key.bytes.data(), key.bytes.size()));
}

volatile std::sig_atomic_t g_stop_requested = 0;
void handle_stop(int) { g_stop_requested = 1; }

// ---------------------------------------------------------------------------

int run_keygen(const GlobalConfig& cfg, unsigned bits, std::uint64_t e_value,
               const std::string& out_file) {
  RandomSource rng(cfg.seed);
  rsa::RsaKeyPair key = rsa::keygen(bits, BigUint(static_cast<unsigned long>(e_value)), rng);
  if (!out_file.empty()) {
    rsa::save_key_pair(key, std::filesystem::path(out_file));
  } else {
    rsa::save_key_pair(key, std::cout);
  }
  json doc{{"bits", bits},
           {"e", e_value},
           {"n", numtheory::to_decimal(key.pub.n)},
           {"file", out_file}};
  std::string human = "generated " + std::to_string(bits) + "-bit key pair" +
                      (out_file.empty() ? "" : " -> " + out_file) + "\n";
  if (!out_file.empty() || cfg.json_output) emit(cfg, doc, human);
  return 0;
}

int run_serve_oracle(const GlobalConfig& cfg, const std::string& key_file,
                     const std::string& listen, int latency_ms, bool oaep, unsigned key_bits,
                     const std::string& transcript_file) {
  oracle::OracleConfig ocfg;
  ocfg.key_pair = rsa::load_key_pair(std::filesystem::path(key_file));
  ocfg.artificial_latency_ms = latency_ms;
  ocfg.wrap = oaep ? oracle::KeyWrap::oaep : oracle::KeyWrap::textbook;
  ocfg.key_bits = key_bits;
  oracle::Oracle oracle_core(ocfg);

  auto [host, port] = parse_endpoint(listen);
  oracle::TcpOracleServer server(oracle_core, host, port);
  std::cerr << "oracle listening on " << host << ":" << server.port()
            << (oaep ? " (oaep)" : " (textbook)") << "\n";

  std::signal(SIGINT, handle_stop);
  std::signal(SIGTERM, handle_stop);
  while (!g_stop_requested) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  server.stop();

  if (!transcript_file.empty()) {
    std::ofstream out(transcript_file);
    oracle_core.transcript().write_jsonl(out);
  }
  json doc{{"connections", server.connections()},
           {"queries", oracle_core.transcript().size()},
           {"accepted", oracle_core.transcript().accepted_count()}};
  emit(cfg, doc,
       "served " + std::to_string(oracle_core.transcript().size()) + " queries (" +
           std::to_string(oracle_core.transcript().accepted_count()) + " accepted)\n");
  return 0;
}

struct OracleChoice {
  bool in_process = false;
  std::string oracle_addr;
  std::string pub_file;
};

int run_attack_cca2(const GlobalConfig& cfg, const OracleChoice& choice, unsigned key_bits,
                    bool oaep) {
  RandomSource rng(cfg.seed == 0 ? 0xA11CE : cfg.seed);
  std::optional<oracle::Oracle> local;
  oracle::OracleFn query;
  rsa::RsaPublicKey pub;

  victim_prng::SessionKey victim_key = random_key(rng);
  if (key_bits < 128) {
    // scaled-down protocol: only the low key_bits bits are in play
    for (unsigned i = 0; i < 128 - key_bits; ++i) {
      victim_key.bytes[i / 8] &= static_cast<std::uint8_t>(~(0x80u >> (i % 8)));
    }
  }

  if (choice.in_process) {
    oracle::OracleConfig ocfg;
    ocfg.key_pair = rsa::keygen(1024, 65537, rng);
    ocfg.wrap = oaep ? oracle::KeyWrap::oaep : oracle::KeyWrap::textbook;
    ocfg.key_bits = key_bits;
    local.emplace(std::move(ocfg));
    query = oracle::in_process_oracle(*local);
    pub = local->public_key();
  } else {
    auto [host, port] = parse_endpoint(choice.oracle_addr);
    std::ifstream in(choice.pub_file);
    if (!in) throw CLI::ValidationError("--pub file not readable");
    pub = rsa::load_public_key(in);
    query = oracle::tcp_oracle(host, port);
  }

  wup::EncryptedSession victim_session =
      oaep ? wup::seal_session_oaep(pub, victim_key, demo_request(), rng)
           : wup::seal_session(pub, victim_key, demo_request());

  auto result = attacks::cca2_attack(victim_session, query, pub, key_bits);
  bool recovered = result.recovered_valid && result.recovered_key.bytes == victim_key.bytes;

  json doc{{"queries", result.queries},
           {"recovered", recovered},
           {"recovered_valid", result.recovered_valid},
           {"victim_key", key_hex(victim_key)},
           {"recovered_key", key_hex(result.recovered_key)},
           {"key_bits", key_bits}};
  if (!cfg.json_output) doc["wall_seconds"] = result.wall_time.count();
  std::string human = std::string(recovered ? "recovered" : "FAILED to recover") +
                      " session key in " + std::to_string(result.queries) + " oracle queries\n" +
                      "victim:    " + key_hex(victim_key) + "\n" +
                      "recovered: " + key_hex(result.recovered_key) + "\n";
  emit(cfg, doc, human);
  return recovered ? 0 : kExitAttackFailed;
}

int run_attack_prng(const GlobalConfig& cfg, const OracleChoice& choice, std::int64_t offset_ms,
                    bool offset_set, std::int64_t radius_ms, bool serial) {
  RandomSource rng(cfg.seed == 0 ? 0xF00D : cfg.seed);
  rsa::RsaKeyPair kp = rsa::keygen(1024, 65537, rng);
  const std::int64_t observed_at = 1'650'000'000'000 + static_cast<std::int64_t>(rng() % 1000000);
  std::int64_t offset = offset_set
                            ? offset_ms
                            : static_cast<std::int64_t>(rng() % (2 * 34999 + 1)) - 34999;

  auto victim_key = victim_prng::keygen_v65(observed_at + offset);
  wup::EncryptedSession sess = wup::seal_session(kp.pub, victim_key, demo_request());

  try {
    auto result = attacks::prng_attack(sess, observed_at, radius_ms,
                                       serial ? Exec::serial : Exec::parallel);
    bool recovered = result.key.bytes == victim_key.bytes;

    bool oracle_confirmed = false;
    if (!choice.oracle_addr.empty()) {
      // confirm against the live oracle: an honest session under the
      // recovered key must draw a response
      auto [host, port] = parse_endpoint(choice.oracle_addr);
      std::ifstream in(choice.pub_file);
      if (!in) throw CLI::ValidationError("--pub file not readable");
      rsa::RsaPublicKey pub = rsa::load_public_key(in);
      auto remote = oracle::tcp_oracle(host, port);
      oracle_confirmed = remote(wup::seal_session(pub, result.key, demo_request())).has_value();
    }

    json doc{{"guesses", result.guesses},
             {"recovered", recovered},
             {"offset_ms", offset},
             {"radius_ms", radius_ms},
             {"recovered_key", key_hex(result.key)}};
    if (!choice.oracle_addr.empty()) doc["oracle_confirmed"] = oracle_confirmed;
    emit(cfg, doc,
         "recovered v6.5 session key in " + std::to_string(result.guesses) +
             " guesses (offset " + std::to_string(offset) + " ms)\nkey: " + key_hex(result.key) +
             "\n");
    return recovered ? 0 : kExitAttackFailed;
  } catch (const attacks::SeedNotInWindow& e) {
    json doc{{"recovered", false}, {"guesses", e.guesses}, {"error", "seed not in window"}};
    emit(cfg, doc, std::string("attack failed: ") + e.what() + "\n");
    return kExitAttackFailed;
  }
}

int run_attack_mitm(const GlobalConfig& cfg, unsigned m1, unsigned m2, unsigned key_bits,
                    unsigned trials, bool allow_large, bool serial) {
  RandomSource rng(cfg.seed == 0 ? 0x3417 : cfg.seed);
  rsa::RsaKeyPair kp = rsa::keygen(128, 65537, rng);
  auto table = attacks::mitm_build_table(kp.pub, m1, serial ? Exec::serial : Exec::parallel,
                                         allow_large);

  unsigned recovered = 0;
  for (unsigned i = 0; i < trials; ++i) {
    BigUint a = 1 + rng() % (std::uint64_t(1) << std::min(m1, key_bits / 2));
    BigUint b = 1 + rng() % (std::uint64_t(1) << std::min(m2, key_bits - key_bits / 2));
    BigUint k = a * b;
    auto found = attacks::mitm_attack(table, rsa::encrypt_raw(kp.pub, k), m2);
    if (found && *found == k) ++recovered;
  }
  json doc{{"m1", m1},
           {"m2", m2},
           {"key_bits", key_bits},
           {"trials", trials},
           {"recovered", recovered},
           {"table_entries", table.entries.size()}};
  emit(cfg, doc,
       "meet-in-the-middle: recovered " + std::to_string(recovered) + "/" +
           std::to_string(trials) + " constructed keys (table 2^" + std::to_string(m1) +
           " entries)\n");
  return recovered == trials ? 0 : kExitAttackFailed;
}

int run_split_prob(const GlobalConfig& cfg, unsigned bits, unsigned m1, unsigned m2,
                   std::uint64_t samples, std::uint64_t budget, bool serial) {
  RandomSource rng(cfg.seed == 0 ? 0x5EED : cfg.seed);
  attacks::SplitOptions opts;
  opts.per_sample_budget = budget;
  opts.exec = serial ? Exec::serial : Exec::parallel;
  auto est = attacks::split_probability(bits, m1, m2, samples, rng, opts);
  json doc{{"bit_length", est.bit_length}, {"m1", est.m1},
           {"m2", est.m2},                 {"samples", est.samples},
           {"successes", est.successes},   {"skipped", est.skipped},
           {"probability", est.probability}};
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "P(%u-bit value splits as M1*M2, M1<=2^%u, M2<=2^%u) ~ %.3f (%llu/%llu, %llu skipped)\n",
                bits, m1, m2, est.probability,
                static_cast<unsigned long long>(est.successes),
                static_cast<unsigned long long>(est.samples),
                static_cast<unsigned long long>(est.skipped));
  emit(cfg, doc, buf);
  return 0;
}

int run_mitm_cost(const GlobalConfig& cfg, unsigned m1, unsigned m2, unsigned key_bits) {
  auto cost = attacks::mitm_cost(m1, m2, key_bits);
  BigUint bytes = cost.table_bits / 8;
  BigUint petabytes = (bytes + BigUint("500000000000000")) / BigUint("1000000000000000");
  json doc{{"m1", m1},
           {"m2", m2},
           {"key_bits", key_bits},
           {"table_bits", numtheory::to_decimal(cost.table_bits)},
           {"table_bytes", numtheory::to_decimal(bytes)},
           {"petabytes", petabytes.fits_ulong_p() ? json(petabytes.get_ui())
                                                  : json(numtheory::to_decimal(petabytes))},
           {"human", cost.table_bytes_human},
           {"exponentiations", numtheory::to_decimal(cost.exponentiations)}};
  emit(cfg, doc,
       "table: " + cost.table_bytes_human + " (" + numtheory::to_decimal(cost.table_bits) +
           " bits), plus 2^" + std::to_string(m2) + " modular exponentiations\n");
  return 0;
}

int run_factor(const GlobalConfig& cfg, const std::string& n_str, std::uint64_t budget,
               bool serial) {
  BigUint n = numtheory::from_decimal(n_str);
  numtheory::FactorOptions opts;
  opts.budget = budget;
  opts.exec = serial ? Exec::serial : Exec::parallel;
  try {
    auto f = attacks::factor_modulus(n, opts);
    json factors = json::array();
    std::string product;
    for (const auto& [prime, exp] : f.factors) {
      factors.push_back({{"prime", numtheory::to_decimal(prime)}, {"exponent", exp}});
      for (unsigned i = 0; i < exp; ++i) {
        if (!product.empty()) product += " * ";
        product += numtheory::to_decimal(prime);
      }
    }
    json doc{{"n", numtheory::to_decimal(n)},
             {"factors", factors},
             {"iterations", f.iterations}};
    emit(cfg, doc,
         numtheory::to_decimal(n) + " = " + product + "\n(rho iterations: " +
             std::to_string(f.iterations) + ")\n");
    return 0;
  } catch (const attacks::NotComposite& e) {
    json doc{{"n", numtheory::to_decimal(n)}, {"error", e.what()}};
    emit(cfg, doc, std::string(e.what()) + "\n");
    return kExitAttackFailed;
  } catch (const numtheory::BudgetExhausted& e) {
    json doc{{"n", numtheory::to_decimal(n)},
             {"error", e.what()},
             {"iterations", e.iterations}};
    emit(cfg, doc, std::string(e.what()) + "\n");
    return kExitAttackFailed;
  }
}

int run_update_sim(const GlobalConfig& cfg, const std::string& scenario_file,
                   const std::string& sandbox) {
  auto scenario = update_sim::load_scenario(scenario_file);
  std::filesystem::path root = sandbox.empty()
      ? std::filesystem::temp_directory_path() / "wuplab_update_sim"
      : std::filesystem::path(sandbox);
  auto result = update_sim::run_scenario(scenario, root, cfg.seed == 0 ? 0x7777 : cfg.seed);

  json doc{{"scenario", scenario.name},
           {"matched", result.matched},
           {"outcome", std::string(update_sim::to_string(result.outcome.kind))},
           {"halt_reason", std::string(update_sim::to_string(result.outcome.halt_reason))},
           {"payload_md5", to_hex(ByteView(result.outcome.payload_md5.data(), 16))},
           {"escaped_write", result.outcome.escaped_write},
           {"overwrite_target", result.outcome.overwrite_target},
           {"escapes_detected", result.escapes_detected},
           {"writes_outside_sandbox", result.writes_outside_sandbox},
           {"mismatches", result.mismatches}};
  std::string human = scenario.name + ": outcome " +
                      std::string(update_sim::to_string(result.outcome.kind)) +
                      (result.matched ? " (as expected)\n" : " (MISMATCH)\n");
  for (const auto& m : result.mismatches) human += "  - " + m + "\n";
  emit(cfg, doc, human);
  return result.matched ? 0 : kExitAttackFailed;
}

int run_demo_all(const GlobalConfig& cfg, const std::string& scenario_dir, bool quick) {
  json stages = json::array();
  auto note = [&](const std::string& name, const json& detail, bool ok) {
    json stage{{"stage", name}, {"ok", ok}};
    stage.update(detail);
    stages.push_back(stage);
    if (!cfg.json_output) {
      std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << "  " << detail.dump() << "\n";
    }
    return ok;
  };
  bool all_ok = true;
  RandomSource rng(cfg.seed == 0 ? 0xDE30 : cfg.seed);

  // 1. key generation
  rsa::RsaKeyPair kp = rsa::keygen(1024, 65537, rng);
  all_ok &= note("keygen", {{"bits", 1024}}, true);

  // 2. the weak 128-bit modulus: reproduce the published factorization
  {
    BigUint weak_n("245406417573740884710047745869965023463");
    numtheory::FactorOptions fopts;
    if (quick) {
      RandomSource frng(7);
      weak_n = numtheory::gen_prime(28, frng) * numtheory::gen_prime(28, frng);
    }
    auto f = attacks::factor_modulus(weak_n, fopts);
    all_ok &= note("factor-weak-modulus",
                   {{"n", numtheory::to_decimal(weak_n)},
                    {"factors", f.factors.size()},
                    {"iterations", f.iterations}},
                   f.product() == weak_n && f.factors.size() == 2);
  }

  // 3. CCA2 bit-at-a-time attack against the in-process oracle
  {
    oracle::Oracle server({.key_pair = kp});
    auto victim_key = random_key(rng);
    auto sess = wup::seal_session(kp.pub, victim_key, demo_request());
    auto result = attacks::cca2_attack(sess, oracle::in_process_oracle(server), kp.pub);
    all_ok &= note("attack-cca2", {{"queries", result.queries}},
                   result.recovered_key.bytes == victim_key.bytes && result.queries == 128);
  }

  // 4. the same attack dies against the OAEP oracle
  {
    oracle::Oracle server({.key_pair = kp, .wrap = oracle::KeyWrap::oaep});
    auto victim_key = random_key(rng);
    auto sess = wup::seal_session_oaep(kp.pub, victim_key, demo_request(), rng);
    auto result = attacks::cca2_attack(sess, oracle::in_process_oracle(server), kp.pub);
    all_ok &= note("attack-cca2-vs-oaep",
                   {{"queries", result.queries},
                    {"oracle_accepts", server.transcript().accepted_count()}},
                   !result.recovered_valid && server.transcript().accepted_count() == 0);
  }

  // 5. PRNG seed search
  {
    std::int64_t observed_at = 1'650'000'000'000;
    std::int64_t offset = static_cast<std::int64_t>(rng() % 69999) - 34999;
    auto victim_key = victim_prng::keygen_v65(observed_at + offset);
    auto sess = wup::seal_session(kp.pub, victim_key, demo_request());
    auto result = attacks::prng_attack(sess, observed_at, 35000);
    all_ok &= note("attack-prng", {{"offset_ms", offset}, {"guesses", result.guesses}},
                   result.key.bytes == victim_key.bytes && result.guesses < 70000);
  }

  // 6. meet-in-the-middle at desk scale plus the real-scale cost
  {
    RandomSource toy_rng(rng());
    rsa::RsaKeyPair toy = rsa::keygen(128, 65537, toy_rng);
    auto table = attacks::mitm_build_table(toy.pub, 10);
    unsigned recovered = 0;
    const unsigned trials = quick ? 20 : 100;
    for (unsigned i = 0; i < trials; ++i) {
      BigUint k = BigUint(1 + toy_rng() % 1024) * static_cast<unsigned long>(1 + toy_rng() % 1024);
      auto found = attacks::mitm_attack(table, rsa::encrypt_raw(toy.pub, k), 10);
      if (found && *found == k) ++recovered;
    }
    auto cost = attacks::mitm_cost(64, 64, 128);
    all_ok &= note("attack-mitm",
                   {{"recovered", recovered},
                    {"trials", trials},
                    {"full_scale_table", cost.table_bytes_human}},
                   recovered == trials && cost.table_bytes_human == "295,148 petabytes");
  }

  // 7. split probability, one table row
  {
    RandomSource srng(rng());
    auto est = attacks::split_probability(64, 32, 32, quick ? 200 : 2000, srng);
    all_ok &= note("split-prob",
                   {{"probability", est.probability}},
                   est.probability > 0.10 && est.probability < 0.25);
  }

  // 8. update-mechanism scenarios
  {
    auto sandbox = std::filesystem::temp_directory_path() / "wuplab_demo_all";
    std::filesystem::remove_all(sandbox);
    std::size_t matched = 0, total = 0, outside = 0;
    for (const auto& entry : std::filesystem::directory_iterator(scenario_dir)) {
      if (entry.path().extension() != ".json") continue;
      ++total;
      auto scenario = update_sim::load_scenario(entry.path());
      auto result = update_sim::run_scenario(scenario, sandbox, 0x7777);
      matched += result.matched;
      outside += result.writes_outside_sandbox;
    }
    all_ok &= note("update-sim",
                   {{"scenarios", total}, {"matched", matched}, {"escaped_sandbox", outside}},
                   total > 0 && matched == total && outside == 0);
  }

  if (cfg.json_output) std::cout << json{{"stages", stages}, {"ok", all_ok}}.dump(2) << "\n";
  return all_ok ? 0 : kExitAttackFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wuplab: a lab for breaking the WUP update/telemetry protocol"};
  app.require_subcommand(1);

  GlobalConfig cfg;
  app.add_option("--seed", cfg.seed, "deterministic seed for all randomness (0 = defaults)");
  app.add_flag("--json", cfg.json_output, "machine-readable JSON on stdout");
  app.add_flag("-v,--verbose", cfg.verbosity, "more logging");

  // keygen
  auto* keygen_cmd = app.add_subcommand("keygen", "generate a textbook RSA key pair");
  unsigned kg_bits = 1024;
  std::uint64_t kg_e = 65537;
  std::string kg_out;
  keygen_cmd->add_option("--bits", kg_bits, "modulus size")
      ->check(CLI::IsMember({128, 256, 512, 1024, 2048}));
  keygen_cmd->add_option("--e", kg_e, "public exponent");
  keygen_cmd->add_option("--out", kg_out, "key file (stdout when omitted)");

  // serve-oracle
  auto* serve_cmd = app.add_subcommand("serve-oracle", "run the WUP decryption oracle over TCP");
  std::string sv_key, sv_listen = "127.0.0.1:7777", sv_transcript;
  int sv_latency = 0;
  bool sv_oaep = false;
  unsigned sv_key_bits = 128;
  serve_cmd->add_option("--key", sv_key, "key pair file")->required();
  serve_cmd->add_option("--listen", sv_listen, "host:port (port 0 = ephemeral)");
  serve_cmd->add_option("--latency-ms", sv_latency, "artificial reply latency");
  serve_cmd->add_flag("--oaep", sv_oaep, "wrap keys with OAEP (remediated server)");
  serve_cmd->add_option("--key-bits", sv_key_bits, "truncation width of the key blob");
  serve_cmd->add_option("--transcript", sv_transcript, "JSON-lines transcript on shutdown");

  // shared oracle options for attacks
  auto add_oracle_opts = [](CLI::App* cmd, OracleChoice& choice) {
    auto* in_proc = cmd->add_flag("--in-process", choice.in_process, "spawn the oracle locally");
    auto* addr = cmd->add_option("--oracle", choice.oracle_addr, "host:port of a running oracle");
    auto* pub = cmd->add_option("--pub", choice.pub_file, "server public key file");
    addr->excludes(in_proc);
    pub->needs(addr);
    return std::make_pair(in_proc, addr);
  };

  // attack-cca2
  auto* cca2_cmd = app.add_subcommand("attack-cca2", "bit-at-a-time chosen-ciphertext attack");
  OracleChoice cca2_oracle;
  unsigned cca2_bits = 128;
  bool cca2_oaep = false;
  auto [cca2_inproc_flag, cca2_addr_opt] = add_oracle_opts(cca2_cmd, cca2_oracle);
  cca2_cmd->add_option("--key-bits", cca2_bits, "session key width (scaled-down variants)");
  cca2_cmd->add_flag("--oaep", cca2_oaep, "attack the OAEP-remediated oracle (expected to fail)");

  // attack-prng
  auto* prng_cmd = app.add_subcommand("attack-prng", "timestamp seed search on v6.5 keygen");
  OracleChoice prng_oracle;
  std::int64_t prng_offset = 0, prng_radius = 35000;
  bool prng_serial = false;
  add_oracle_opts(prng_cmd, prng_oracle);
  auto* prng_offset_opt =
      prng_cmd->add_option("--offset-ms", prng_offset, "victim key time offset (default: random)");
  prng_cmd->add_option("--radius-ms", prng_radius, "search radius");
  prng_cmd->add_flag("--serial", prng_serial, "force the serial search kernel");

  // attack-mitm
  auto* mitm_cmd = app.add_subcommand("attack-mitm", "meet-in-the-middle key recovery (toy scale)");
  unsigned mitm_m1 = 10, mitm_m2 = 10, mitm_bits = 20, mitm_trials = 100;
  bool mitm_large = false, mitm_serial = false;
  mitm_cmd->add_option("--m1", mitm_m1, "table bound exponent");
  mitm_cmd->add_option("--m2", mitm_m2, "search bound exponent");
  mitm_cmd->add_option("--key-bits", mitm_bits, "toy session key width");
  mitm_cmd->add_option("--trials", mitm_trials, "constructed keys to recover");
  mitm_cmd->add_flag("--allow-large", mitm_large, "override the desk-scale table guard");
  mitm_cmd->add_flag("--serial", mitm_serial, "force the serial table builder");

  // split-prob
  auto* split_cmd = app.add_subcommand("split-prob", "probability a key splits into two factors");
  unsigned sp_bits = 64, sp_m1 = 32, sp_m2 = 32;
  std::uint64_t sp_samples = 2000, sp_budget = std::uint64_t(1) << 26;
  bool sp_serial = false;
  split_cmd->add_option("--bits", sp_bits, "sampled value width (<=128)");
  split_cmd->add_option("--m1", sp_m1, "first factor bound exponent");
  split_cmd->add_option("--m2", sp_m2, "second factor bound exponent");
  split_cmd->add_option("--samples", sp_samples, "sample count (>=100)");
  split_cmd->add_option("--per-sample-budget", sp_budget, "rho budget per sample (128-bit mode)");
  split_cmd->add_flag("--serial", sp_serial, "force the serial sampler");

  // mitm-cost
  auto* cost_cmd = app.add_subcommand("mitm-cost", "table size and work for the full-scale attack");
  unsigned mc_m1 = 64, mc_m2 = 64, mc_bits = 128;
  cost_cmd->add_option("--m1", mc_m1, "table bound exponent")->required();
  cost_cmd->add_option("--m2", mc_m2, "search bound exponent")->required();
  cost_cmd->add_option("--key-bits", mc_bits, "session key width");

  // factor
  auto* factor_cmd = app.add_subcommand("factor", "factor a composite (the 128-bit modulus attack)");
  std::string fc_n;
  std::uint64_t fc_budget = std::uint64_t(1) << 34;
  bool fc_serial = false;
  factor_cmd->add_option("--n", fc_n, "composite integer, decimal")->required();
  factor_cmd->add_option("--budget", fc_budget, "rho iteration budget");
  factor_cmd->add_flag("--serial", fc_serial, "force the serial rho engine");

  // update-sim
  auto* update_cmd = app.add_subcommand("update-sim", "run an update-attack scenario file");
  std::string us_scenario, us_sandbox;
  update_cmd->add_option("--scenario", us_scenario, "scenario JSON file")->required();
  update_cmd->add_option("--sandbox", us_sandbox, "sandbox root (default: temp dir)");

  // demo-all
  auto* demo_cmd = app.add_subcommand("demo-all", "run the whole attack narrative");
  std::string da_scenarios = "scenarios";
  bool da_quick = false;
  demo_cmd->add_option("--scenarios", da_scenarios, "scenario directory");
  demo_cmd->add_flag("--quick", da_quick, "smaller sample counts and a small demo modulus");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (app.got_subcommand(keygen_cmd)) return run_keygen(cfg, kg_bits, kg_e, kg_out);
    if (app.got_subcommand(serve_cmd)) {
      return run_serve_oracle(cfg, sv_key, sv_listen, sv_latency, sv_oaep, sv_key_bits,
                              sv_transcript);
    }
    if (app.got_subcommand(cca2_cmd)) {
      if (!cca2_oracle.in_process && cca2_oracle.oracle_addr.empty()) {
        std::cerr << "attack-cca2: pass --in-process or --oracle host:port\n";
        return kExitUsage;
      }
      return run_attack_cca2(cfg, cca2_oracle, cca2_bits, cca2_oaep);
    }
    if (app.got_subcommand(prng_cmd)) {
      return run_attack_prng(cfg, prng_oracle, prng_offset, prng_offset_opt->count() > 0,
                             prng_radius, prng_serial);
    }
    if (app.got_subcommand(mitm_cmd)) {
      return run_attack_mitm(cfg, mitm_m1, mitm_m2, mitm_bits, mitm_trials, mitm_large,
                             mitm_serial);
    }
    if (app.got_subcommand(split_cmd)) {
      return run_split_prob(cfg, sp_bits, sp_m1, sp_m2, sp_samples, sp_budget, sp_serial);
    }
    if (app.got_subcommand(cost_cmd)) return run_mitm_cost(cfg, mc_m1, mc_m2, mc_bits);
    if (app.got_subcommand(factor_cmd)) return run_factor(cfg, fc_n, fc_budget, fc_serial);
    if (app.got_subcommand(update_cmd)) return run_update_sim(cfg, us_scenario, us_sandbox);
    if (app.got_subcommand(demo_cmd)) return run_demo_all(cfg, da_scenarios, da_quick);
  } catch (const oracle::TransportError& e) {
    std::cerr << "oracle unreachable: " << e.what() << "\n";
    return kExitOracleUnreachable;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAttackFailed;
  }
  return kExitUsage;
}
