#include "wuplab/update_sim.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "wuplab/aes128.hpp"
#include "wuplab/attacks/prng_attack.hpp"
#include "wuplab/sha256.hpp"
#include "wuplab/tea.hpp"
#include "wuplab/wup.hpp"

namespace wuplab::update_sim {

using nlohmann::json;

int compare_versions(const std::string& a, const std::string& b) {
  auto parse = [](const std::string& s) {
    std::vector<long> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, '.')) parts.push_back(item.empty() ? 0 : std::stol(item));
    return parts;
  };
  std::vector<long> va = parse(a), vb = parse(b);
  std::size_t n = std::max(va.size(), vb.size());
  va.resize(n, 0);
  vb.resize(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (va[i] != vb[i]) return va[i] < vb[i] ? -1 : 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// VirtualFs

namespace {

// The victim machine's notional layout: downloads land in a temp directory a
// few levels below the root, deep enough for "../.." chains to matter.
const std::filesystem::path kNotionalTemp = "/users/victim/appdata/local/temp";

std::string normalize_separators(std::string_view name) {
  // the target kernel accepts both separators
  std::string out(name);
  std::replace(out.begin(), out.end(), '\\', '/');
  return out;
}

bool lexically_under(const std::filesystem::path& p, const std::filesystem::path& base) {
  auto pit = p.begin();
  for (auto bit = base.begin(); bit != base.end(); ++bit, ++pit) {
    if (pit == p.end() || *pit != *bit) return false;
  }
  return true;
}

std::filesystem::path sanitize_for_mirror(const std::filesystem::path& notional) {
  // turn an absolute notional path into a relative one usable under the mirror
  std::filesystem::path rel;
  for (const auto& part : notional) {
    std::string s = part.string();
    if (s == "/" || s.empty()) continue;
    std::replace(s.begin(), s.end(), ':', '_');
    rel /= s;
  }
  return rel;
}

}  // namespace

VirtualFs::VirtualFs(std::filesystem::path root) : root_(std::filesystem::absolute(root)) {
  std::filesystem::create_directories(root_);
}

const WriteRecord& VirtualFs::write(std::string_view requested_name, ByteView data) {
  std::string normalized = normalize_separators(requested_name);
  std::filesystem::path requested(normalized);
  std::filesystem::path notional =
      (requested.is_absolute() ? requested : kNotionalTemp / requested).lexically_normal();
  bool escaped = !lexically_under(notional, kNotionalTemp);

  std::filesystem::path landed =
      escaped ? root_ / "escaped" / sanitize_for_mirror(notional)
              : root_ / "temp" / notional.lexically_relative(kNotionalTemp);
  landed = landed.lexically_normal();
  // hard guarantee: nothing lands outside the sandbox, ever
  if (!lexically_under(landed, root_)) landed = root_ / "escaped" / "quarantined.bin";

  std::filesystem::create_directories(landed.parent_path());
  std::ofstream out(landed, std::ios::binary);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  out.close();

  writes_.push_back({std::string(requested_name), notional.generic_string(), landed, escaped});
  return writes_.back();
}

std::size_t VirtualFs::escape_count() const {
  std::size_t n = 0;
  for (const auto& w : writes_) n += w.escaped_root;
  return n;
}

std::size_t VirtualFs::landed_outside_count() const {
  std::size_t n = 0;
  for (const auto& w : writes_) {
    if (!lexically_under(w.landed.lexically_normal(), root_)) ++n;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Mock CA and artifacts

void MockCa::register_signer(const std::string& name, ByteView key) {
  keys_[name] = Bytes(key.begin(), key.end());
}

Bytes MockCa::sign(const std::string& signer, ByteView body) const {
  auto it = keys_.find(signer);
  if (it == keys_.end()) throw std::invalid_argument("mock ca: unknown signer " + signer);
  Bytes buf = it->second;
  buf.insert(buf.end(), body.begin(), body.end());
  auto digest = sha256(view(buf));
  return Bytes(digest.begin(), digest.end());
}

bool MockCa::verify(const std::string& signer, ByteView body, ByteView signature) const {
  if (!keys_.contains(signer)) return false;
  Bytes expected = sign(signer, body);
  return expected.size() == signature.size() &&
         std::equal(expected.begin(), expected.end(), signature.begin());
}

Bytes make_mock_apk(const std::string& package, const std::string& version,
                    const std::string& signer) {
  json j = {{"format", "mock-apk"}, {"package", package}, {"version", version}, {"signer", signer}};
  return to_bytes(j.dump());
}

namespace {

json exe_body(const std::string& kind, const std::string& version, const std::string& signer,
              const std::string& second_stage_url) {
  return json{{"format", "mock-exe"},
              {"kind", kind},
              {"version", version},
              {"signer", signer},
              {"second_stage_url", second_stage_url}};
}

}  // namespace

Bytes make_mock_exe(const MockCa& ca, const std::string& kind, const std::string& version,
                    const std::string& signer, const std::string& second_stage_url) {
  json body = exe_body(kind, version, signer, second_stage_url);
  Bytes sig = ca.sign(signer, view(to_bytes(body.dump())));
  body["sig"] = to_hex(view(sig));
  return to_bytes(body.dump());
}

Bytes make_unsigned_exe(const std::string& version) {
  json body = exe_body("payload", version, "", "");
  body["sig"] = "";
  return to_bytes(body.dump());
}

std::string_view to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::install_upgrade_prompt: return "install_upgrade_prompt";
    case OutcomeKind::install_new_package_prompt: return "install_new_package_prompt";
    case OutcomeKind::execute: return "execute";
    case OutcomeKind::halt: return "halt";
  }
  return "?";
}

std::string_view to_string(HaltReason reason) {
  switch (reason) {
    case HaltReason::none: return "none";
    case HaltReason::no_update: return "no_update";
    case HaltReason::decrypt_failure: return "decrypt_failure";
    case HaltReason::bad_metadata: return "bad_metadata";
    case HaltReason::download_failed: return "download_failed";
    case HaltReason::hash_mismatch: return "hash_mismatch";
    case HaltReason::downgrade_refused: return "downgrade_refused";
    case HaltReason::upgrade_signer_mismatch: return "upgrade_signer_mismatch";
    case HaltReason::signature_invalid: return "signature_invalid";
    case HaltReason::invalid_package: return "invalid_package";
    case HaltReason::fs_refused: return "fs_refused";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Honest servers

namespace {

ByteView tea_key() {
  return ByteView(reinterpret_cast<const std::uint8_t*>(wup::HardcodedKeys::kTeaResponseKey.data()),
                  wup::HardcodedKeys::kTeaResponseKey.size());
}

wup::WupMessage metadata_to_wup(const UpdateMetadata& meta) {
  wup::WupMessage msg;
  msg.kind = wup::MsgKind::update_info;
  msg.add_field("url", std::string_view(meta.url));
  msg.add_field("md5", std::string_view(to_hex(ByteView(meta.md5.data(), meta.md5.size()))));
  msg.add_field("version", std::string_view(meta.version));
  return msg;
}

wup::WupMessage no_update_wup() {
  wup::WupMessage msg;
  msg.kind = wup::MsgKind::update_info;
  msg.add_field("no_update", std::string_view("1"));
  return msg;
}

Bytes encrypt_android_response(CryptoMode mode, const victim_prng::SessionKey& session_key,
                               const wup::WupMessage& msg) {
  Bytes plain = wup::serialize(msg);
  if (mode == CryptoMode::v63_hardcoded) return tea::cbc_encrypt(tea_key(), view(plain));
  return aes::ecb_encrypt(ByteView(session_key.bytes.data(), 16), view(plain));
}

}  // namespace

AndroidUpdateServer::AndroidUpdateServer(rsa::RsaKeyPair key_pair, CryptoMode mode,
                                         UpdateCatalog catalog)
    : key_pair_(std::move(key_pair)), mode_(mode), catalog_(std::move(catalog)) {}

Bytes AndroidUpdateServer::exchange(const Bytes& request_body) {
  try {
    wup::EncryptedSession sess = wup::decode_session(view(request_body), key_pair_.pub.modulus_bytes());
    auto [session_key, query] = wup::open_session(key_pair_, sess);
    if (query.kind != wup::MsgKind::update_query) return {};
    std::string client_version = query.field_text("version");
    if (compare_versions(catalog_.latest_version, client_version) > 0) {
      UpdateMetadata meta;
      meta.variant = Variant::android_wup;
      meta.url = catalog_.download_url;
      meta.md5 = md5(view(catalog_.artifact));
      meta.version = catalog_.latest_version;
      return encrypt_android_response(mode_, session_key, metadata_to_wup(meta));
    }
    return encrypt_android_response(mode_, session_key, no_update_wup());
  } catch (const wup::InvalidRequest&) {
    return {};  // the real server answers garbage with silence
  }
}

std::optional<Bytes> AndroidUpdateServer::fetch(const std::string& url) {
  if (url == catalog_.download_url) return catalog_.artifact;
  return std::nullopt;
}

std::string WindowsUpdateServer::exchange(const std::string& query_json) {
  std::string client_version;
  try {
    client_version = json::parse(query_json).value("version", "");
  } catch (const json::exception&) {
    return json{{"update", false}}.dump();
  }
  if (compare_versions(catalog_.latest_version, client_version) > 0) {
    return json{{"update", true},
                {"url", catalog_.download_url},
                {"md5", to_hex(md5(view(catalog_.artifact)))},
                {"save_as", catalog_.save_as.value_or("qqbrowser_update.exe")},
                {"version", catalog_.latest_version}}
        .dump();
  }
  return json{{"update", false}}.dump();
}

std::optional<Bytes> WindowsUpdateServer::fetch(const std::string& url) {
  if (url == catalog_.download_url) return catalog_.artifact;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// MITM proxies

namespace {

Md5Digest md5_of(ByteView data) { return md5(data); }

void autofill_md5(UpdateMetadata& meta, const std::map<std::string, Bytes>& attacker_files) {
  if (meta.md5 != Md5Digest{}) return;
  auto it = attacker_files.find(meta.url);
  if (it != attacker_files.end()) meta.md5 = md5_of(view(it->second));
}

}  // namespace

AndroidMitmProxy::AndroidMitmProxy(ForgeScript script, AndroidChannel& upstream, CryptoMode mode,
                                   const rsa::RsaPublicKey* pub)
    : script_(std::move(script)), upstream_(upstream), mode_(mode), pub_(pub) {}

Bytes AndroidMitmProxy::exchange(const Bytes& request_body) {
  if (script_.secure_transport || script_.mode != ForgeMode::forge_metadata) {
    return upstream_.exchange(request_body);
  }
  if (!script_.forged_metadata) throw ForgeKeyMissing();
  UpdateMetadata meta = *script_.forged_metadata;
  autofill_md5(meta, script_.attacker_files);

  if (mode_ == CryptoMode::v63_hardcoded) {
    // forging v6.3 responses takes nothing but the shipped constant
    if (script_.key_source != KeySource::hardcoded_v63) throw ForgeKeyMissing();
    return tea::cbc_encrypt(tea_key(), view(wup::serialize(metadata_to_wup(meta))));
  }

  victim_prng::SessionKey key;
  switch (script_.key_source) {
    case KeySource::supplied:
      if (!script_.supplied_key) throw ForgeKeyMissing();
      key = *script_.supplied_key;
      break;
    case KeySource::recover_prng: {
      if (!pub_) throw ForgeKeyMissing();
      wup::EncryptedSession sess = wup::decode_session(view(request_body), pub_->modulus_bytes());
      auto result = attacks::prng_attack(sess, script_.observed_at_millis, script_.prng_radius_ms);
      key_recovery_guesses_ = result.guesses;
      key = result.key;
      break;
    }
    default:
      throw ForgeKeyMissing();
  }
  return aes::ecb_encrypt(ByteView(key.bytes.data(), 16),
                          view(wup::serialize(metadata_to_wup(meta))));
}

std::optional<Bytes> AndroidMitmProxy::fetch(const std::string& url) {
  if (script_.secure_transport) return upstream_.fetch(url);
  auto it = script_.attacker_files.find(url);
  if (it != script_.attacker_files.end()) return it->second;
  auto bytes = upstream_.fetch(url);
  if (bytes && script_.mode == ForgeMode::corrupt_download && !bytes->empty()) {
    (*bytes)[0] ^= 0xFF;
  }
  return bytes;
}

WindowsMitmProxy::WindowsMitmProxy(ForgeScript script, WindowsChannel& upstream)
    : script_(std::move(script)), upstream_(upstream) {}

std::string WindowsMitmProxy::exchange(const std::string& query_json) {
  if (script_.secure_transport || script_.mode != ForgeMode::forge_metadata) {
    return upstream_.exchange(query_json);
  }
  if (!script_.forged_metadata) throw ForgeKeyMissing();
  // plaintext JSON: no key material needed at all
  UpdateMetadata meta = *script_.forged_metadata;
  autofill_md5(meta, script_.attacker_files);
  return json{{"update", true},
              {"url", meta.url},
              {"md5", to_hex(ByteView(meta.md5.data(), meta.md5.size()))},
              {"save_as", meta.save_as.value_or("qqbrowser_update.exe")},
              {"version", meta.version}}
      .dump();
}

std::optional<Bytes> WindowsMitmProxy::fetch(const std::string& url) {
  if (script_.secure_transport) return upstream_.fetch(url);
  auto it = script_.attacker_files.find(url);
  if (it != script_.attacker_files.end()) return it->second;
  auto bytes = upstream_.fetch(url);
  if (bytes && script_.mode == ForgeMode::corrupt_download && !bytes->empty()) {
    (*bytes)[0] ^= 0xFF;
  }
  return bytes;
}

// ---------------------------------------------------------------------------
// Victims

namespace {

UpdateOutcome halt(HaltReason reason) {
  UpdateOutcome out;
  out.kind = OutcomeKind::halt;
  out.halt_reason = reason;
  return out;
}

std::optional<UpdateMetadata> metadata_from_wup(const wup::WupMessage& msg, Variant variant) {
  if (msg.kind != wup::MsgKind::update_info) return std::nullopt;
  if (msg.find_field("no_update")) return UpdateMetadata{};  // empty url == no update
  UpdateMetadata meta;
  meta.variant = variant;
  meta.url = msg.field_text("url");
  meta.version = msg.field_text("version");
  try {
    Bytes digest = from_hex(msg.field_text("md5"));
    if (digest.size() != 16) return std::nullopt;
    std::copy(digest.begin(), digest.end(), meta.md5.begin());
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
  return meta;
}

}  // namespace

UpdateOutcome victim_update_android(const AndroidVictimConfig& cfg, AndroidChannel& channel) {
  victim_prng::SessionKey key = cfg.crypto == CryptoMode::v65_session
                                    ? victim_prng::keygen_v65(cfg.clock_millis)
                                    : victim_prng::keygen_v63_at(cfg.clock_millis);

  wup::WupMessage query;
  query.kind = wup::MsgKind::update_query;
  query.add_field("version", std::string_view(cfg.installed_version));
  Bytes request = wup::encode_session(wup::seal_session(cfg.server_pub, key, query));

  Bytes response = channel.exchange(request);
  if (response.empty()) return halt(HaltReason::decrypt_failure);

  wup::WupMessage info;
  try {
    Bytes plain = cfg.crypto == CryptoMode::v63_hardcoded
                      ? tea::cbc_decrypt(tea_key(), view(response))
                      : aes::ecb_decrypt(ByteView(key.bytes.data(), 16), view(response));
    info = wup::parse(view(plain));
  } catch (const std::exception&) {
    return halt(HaltReason::decrypt_failure);
  }

  auto meta = metadata_from_wup(info, Variant::android_wup);
  if (!meta) return halt(HaltReason::bad_metadata);
  if (meta->url.empty()) return halt(HaltReason::no_update);

  auto apk_bytes = channel.fetch(meta->url);
  if (!apk_bytes) return halt(HaltReason::download_failed);
  if (md5(view(*apk_bytes)) != meta->md5) return halt(HaltReason::hash_mismatch);

  std::string package, version, signer;
  try {
    json apk = json::parse(wuplab::to_string(view(*apk_bytes)));
    if (apk.value("format", "") != "mock-apk") return halt(HaltReason::invalid_package);
    package = apk.value("package", "");
    version = apk.value("version", "");
    signer = apk.value("signer", "");
  } catch (const json::exception&) {
    return halt(HaltReason::invalid_package);
  }

  UpdateOutcome out;
  out.payload_md5 = md5(view(*apk_bytes));
  out.package = package;
  if (package == cfg.installed_package) {
    // upgrades must come from the same signing key and may never downgrade
    if (signer != cfg.installed_signer) return halt(HaltReason::upgrade_signer_mismatch);
    if (compare_versions(version, cfg.installed_version) < 0) {
      return halt(HaltReason::downgrade_refused);
    }
    out.kind = OutcomeKind::install_upgrade_prompt;
  } else {
    out.kind = OutcomeKind::install_new_package_prompt;
  }
  return out;
}

UpdateOutcome victim_update_windows(const WindowsVictimConfig& cfg, WindowsChannel& channel,
                                    VirtualFs& fs, const MockCa& ca) {
  std::string response = channel.exchange(json{{"version", cfg.installed_version}}.dump());

  UpdateMetadata meta;
  try {
    json j = json::parse(response);
    if (!j.value("update", false)) return halt(HaltReason::no_update);
    meta.variant = Variant::windows_json;
    meta.url = j.value("url", "");
    meta.version = j.value("version", "");
    meta.save_as = j.value("save_as", "qqbrowser_update.exe");
    Bytes digest = from_hex(j.value("md5", ""));
    if (digest.size() != 16) return halt(HaltReason::bad_metadata);
    std::copy(digest.begin(), digest.end(), meta.md5.begin());
  } catch (const std::exception&) {
    return halt(HaltReason::bad_metadata);
  }

  std::string save_as = meta.save_as.value_or("qqbrowser_update.exe");
  if (cfg.sanitize_filenames) {
    std::string normalized = normalize_separators(save_as);
    if (normalized.find("..") != std::string::npos || normalized.find('/') != std::string::npos ||
        normalized.find(':') != std::string::npos) {
      return halt(HaltReason::fs_refused);
    }
  }

  auto exe_bytes = channel.fetch(meta.url);
  if (!exe_bytes) return halt(HaltReason::download_failed);

  // the file is saved with the server-supplied name BEFORE any verification
  const WriteRecord& record = fs.write(save_as, view(*exe_bytes));

  UpdateOutcome out;
  out.escaped_write = record.escaped_root;
  if (record.escaped_root) out.overwrite_target = record.notional_target;

  if (md5(view(*exe_bytes)) != meta.md5) {
    UpdateOutcome halted = halt(HaltReason::hash_mismatch);
    halted.escaped_write = out.escaped_write;
    halted.overwrite_target = out.overwrite_target;
    return halted;
  }

  std::string kind, signer, sig_hex, second_stage_url;
  try {
    json exe = json::parse(wuplab::to_string(view(*exe_bytes)));
    if (exe.value("format", "") != "mock-exe") throw std::runtime_error("not a mock exe");
    kind = exe.value("kind", "");
    signer = exe.value("signer", "");
    sig_hex = exe.value("sig", "");
    second_stage_url = exe.value("second_stage_url", "");
    json body = exe;
    body.erase("sig");
    bool ok = signer == cfg.expected_signer &&
              ca.verify(signer, view(to_bytes(body.dump())), view(from_hex(sig_hex)));
    if (!ok) throw std::runtime_error("bad signature");
  } catch (const std::exception&) {
    UpdateOutcome halted = halt(HaltReason::signature_invalid);
    halted.escaped_write = out.escaped_write;
    halted.overwrite_target = out.overwrite_target;
    return halted;
  }

  // signature verified: the browser runs whatever Tencent signed
  out.kind = OutcomeKind::execute;
  out.signer = signer;
  out.executed_kind = kind;
  out.payload_md5 = md5(view(*exe_bytes));

  if (kind == "web-installer" && !second_stage_url.empty()) {
    // the web installer downloads its real payload with no verification at all
    auto stage2 = channel.fetch(second_stage_url);
    if (stage2) {
      fs.write("second_stage.exe", view(*stage2));
      out.second_stage = SecondStage{md5(view(*stage2)), false};
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scenarios

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("scenario: cannot open " + path.string());
  json j = json::parse(in);

  Scenario s;
  s.name = j.value("name", path.stem().string());
  std::string victim = j.value("victim", "android");
  if (victim == "android") {
    s.variant = Variant::android_wup;
  } else if (victim == "windows") {
    s.variant = Variant::windows_json;
  } else {
    throw std::runtime_error("scenario: victim must be android or windows");
  }
  std::string crypto = j.value("crypto", "v65_session");
  if (crypto == "v63_hardcoded") {
    s.crypto = CryptoMode::v63_hardcoded;
  } else if (crypto == "v65_session") {
    s.crypto = CryptoMode::v65_session;
  } else {
    throw std::runtime_error("scenario: crypto must be v63_hardcoded or v65_session");
  }
  s.installed_version = j.value("installed_version", "6.5.0.2170");
  s.server_version = j.value("server_version", "6.6.0.0");
  s.sanitize_filenames = j.value("sanitize_filenames", false);
  s.secure_transport = j.value("secure_transport", false);
  s.clock_skew_ms = j.value("clock_skew_ms", std::int64_t(0));

  if (j.contains("forge")) {
    const json& f = j["forge"];
    s.forge_mode = f.value("mode", "none");
    s.key_source = f.value("key_source", "none");
    s.attacker_payload = f.value("payload", "");
    if (f.contains("save_as")) s.forged_save_as = f["save_as"].get<std::string>();
    if (f.contains("version")) s.forged_version = f["version"].get<std::string>();
  }

  const json& e = j.at("expect");
  s.expect.kind = e.at("kind").get<std::string>();
  if (e.contains("halt_reason")) s.expect.halt_reason = e["halt_reason"].get<std::string>();
  if (e.contains("payload")) s.expect.payload = e["payload"].get<std::string>();
  if (e.contains("escaped_write")) s.expect.escaped_write = e["escaped_write"].get<bool>();
  if (e.contains("overwrite_target_suffix")) {
    s.expect.overwrite_target_suffix = e["overwrite_target_suffix"].get<std::string>();
  }
  if (e.contains("executed_kind")) s.expect.executed_kind = e["executed_kind"].get<std::string>();
  if (e.contains("second_stage_payload")) {
    s.expect.second_stage_payload = e["second_stage_payload"].get<std::string>();
  }
  if (e.contains("second_stage_verified")) {
    s.expect.second_stage_verified = e["second_stage_verified"].get<bool>();
  }
  return s;
}

namespace {

constexpr std::string_view kAttackerApkUrl = "http://attacker.example/payload.apk";
constexpr std::string_view kAttackerExeUrl = "http://attacker.example/payload.exe";
constexpr std::string_view kSecondStageUrl = "http://attacker.example/stage2.exe";

struct ScenarioWorld {
  MockCa ca;
  UpdateCatalog catalog;
  Bytes official_artifact;
  Bytes attacker_artifact;      // artifact at the forged URL, when any
  Bytes second_stage_artifact;  // chain scenarios only
  ForgeScript script;
  std::int64_t clock_millis = 0;
};

ScenarioWorld build_world(const Scenario& s, std::uint64_t seed) {
  ScenarioWorld w;
  numtheory::RandomSource rng(seed);
  Bytes ca_key(32);
  for (auto& b : ca_key) b = static_cast<std::uint8_t>(rng());
  w.ca.register_signer("Tencent-mock", view(ca_key));
  w.clock_millis = 1'700'000'000'000 + static_cast<std::int64_t>(rng() % 1'000'000);

  if (s.variant == Variant::android_wup) {
    w.official_artifact = make_mock_apk("com.tencent.mtt", s.server_version, "tencent-release-key");
    w.catalog = {s.server_version, "http://update.qq-mock/official.apk", w.official_artifact, {}};
  } else {
    w.official_artifact = make_mock_exe(w.ca, "browser-update", s.server_version, "Tencent-mock");
    w.catalog = {s.server_version, "http://update.qq-mock/official.exe", w.official_artifact,
                 "qqbrowser_update.exe"};
  }

  ForgeScript& script = w.script;
  script.secure_transport = s.secure_transport;
  script.observed_at_millis = w.clock_millis + s.clock_skew_ms;

  if (s.forge_mode == "forge_metadata") {
    script.mode = ForgeMode::forge_metadata;
  } else if (s.forge_mode == "corrupt_download") {
    script.mode = ForgeMode::corrupt_download;
  } else if (s.forge_mode == "none") {
    script.mode = ForgeMode::none;
  } else {
    throw std::runtime_error("scenario: unknown forge mode " + s.forge_mode);
  }

  std::string forged_url;
  if (s.attacker_payload == "malicious_apk") {
    w.attacker_artifact = make_mock_apk("com.evil.app", "1.0.0", "evil-key");
    forged_url = std::string(kAttackerApkUrl);
    script.attacker_files[forged_url] = w.attacker_artifact;
  } else if (s.attacker_payload == "unsigned_exe") {
    w.attacker_artifact = make_unsigned_exe("6.6.6");
    forged_url = std::string(kAttackerExeUrl);
    script.attacker_files[forged_url] = w.attacker_artifact;
  } else if (s.attacker_payload == "web_installer_chain") {
    w.attacker_artifact =
        make_mock_exe(w.ca, "web-installer", "1.2.3", "Tencent-mock", std::string(kSecondStageUrl));
    w.second_stage_artifact = make_unsigned_exe("6.6.6");
    forged_url = std::string(kAttackerExeUrl);
    script.attacker_files[forged_url] = w.attacker_artifact;
    script.attacker_files[std::string(kSecondStageUrl)] = w.second_stage_artifact;
  } else if (!s.attacker_payload.empty()) {
    throw std::runtime_error("scenario: unknown attacker payload " + s.attacker_payload);
  }

  if (script.mode == ForgeMode::forge_metadata) {
    UpdateMetadata meta;
    meta.variant = s.variant;
    meta.url = forged_url;
    meta.version = s.forged_version.value_or("99.0.0");
    meta.save_as = s.forged_save_as;
    script.forged_metadata = meta;  // md5 autofilled from attacker_files
  }

  if (s.key_source == "hardcoded_v63") {
    script.key_source = KeySource::hardcoded_v63;
  } else if (s.key_source == "supplied") {
    script.key_source = KeySource::supplied;
    script.supplied_key = victim_prng::keygen_v65(w.clock_millis);  // e.g. from the CCA2 attack
  } else if (s.key_source == "wrong_key") {
    script.key_source = KeySource::supplied;
    script.supplied_key = victim_prng::session_key_from_bytes(Bytes(16, 0x42));
  } else if (s.key_source == "recover_prng") {
    script.key_source = KeySource::recover_prng;
  } else if (s.key_source == "none") {
    script.key_source = KeySource::none;
  } else {
    throw std::runtime_error("scenario: unknown key source " + s.key_source);
  }
  return w;
}

void check_expectation(const Scenario& s, const ScenarioWorld& w, const UpdateOutcome& outcome,
                       ScenarioResult& result) {
  auto mismatch = [&](const std::string& what, const std::string& expected,
                      const std::string& got) {
    result.mismatches.push_back(what + ": expected " + expected + ", got " + got);
  };

  if (std::string(to_string(outcome.kind)) != s.expect.kind) {
    mismatch("kind", s.expect.kind, std::string(to_string(outcome.kind)));
  }
  if (s.expect.halt_reason &&
      std::string(to_string(outcome.halt_reason)) != *s.expect.halt_reason) {
    mismatch("halt_reason", *s.expect.halt_reason, std::string(to_string(outcome.halt_reason)));
  }
  if (s.expect.payload) {
    Md5Digest want{};
    if (*s.expect.payload == "official") {
      want = md5(view(w.official_artifact));
    } else if (*s.expect.payload == "attacker") {
      want = md5(view(w.attacker_artifact));
    } else {
      mismatch("expect.payload", "official|attacker", *s.expect.payload);
    }
    if (outcome.payload_md5 != want) {
      mismatch("payload_md5", *s.expect.payload, to_hex(ByteView(outcome.payload_md5.data(), 16)));
    }
  }
  if (s.expect.escaped_write && outcome.escaped_write != *s.expect.escaped_write) {
    mismatch("escaped_write", *s.expect.escaped_write ? "true" : "false",
             outcome.escaped_write ? "true" : "false");
  }
  if (s.expect.overwrite_target_suffix &&
      !outcome.overwrite_target.ends_with(*s.expect.overwrite_target_suffix)) {
    mismatch("overwrite_target", "*" + *s.expect.overwrite_target_suffix, outcome.overwrite_target);
  }
  if (s.expect.executed_kind && outcome.executed_kind != *s.expect.executed_kind) {
    mismatch("executed_kind", *s.expect.executed_kind, outcome.executed_kind);
  }
  if (s.expect.second_stage_payload) {
    if (!outcome.second_stage) {
      mismatch("second_stage", *s.expect.second_stage_payload, "absent");
    } else if (*s.expect.second_stage_payload == "attacker" &&
               outcome.second_stage->md5 != md5(view(w.second_stage_artifact))) {
      mismatch("second_stage_md5", "attacker", to_hex(ByteView(outcome.second_stage->md5.data(), 16)));
    }
  }
  if (s.expect.second_stage_verified && outcome.second_stage &&
      outcome.second_stage->verified != *s.expect.second_stage_verified) {
    mismatch("second_stage_verified", *s.expect.second_stage_verified ? "true" : "false",
             outcome.second_stage->verified ? "true" : "false");
  }
  result.matched = result.mismatches.empty();
}

}  // namespace

ScenarioResult run_scenario(const Scenario& scenario, const std::filesystem::path& sandbox_root,
                            std::uint64_t seed) {
  ScenarioWorld world = build_world(scenario, seed);
  ScenarioResult result;

  if (scenario.variant == Variant::android_wup) {
    numtheory::RandomSource key_rng(numtheory::mix64(seed));
    unsigned bits = scenario.crypto == CryptoMode::v63_hardcoded ? 128 : 1024;
    rsa::RsaKeyPair key_pair = rsa::keygen(bits, 65537, key_rng);

    AndroidUpdateServer server(key_pair, scenario.crypto, world.catalog);
    AndroidMitmProxy proxy(world.script, server, scenario.crypto, &key_pair.pub);

    AndroidVictimConfig cfg;
    cfg.installed_version = scenario.installed_version;
    cfg.crypto = scenario.crypto;
    cfg.server_pub = key_pair.pub;
    cfg.clock_millis = world.clock_millis;

    result.outcome = victim_update_android(cfg, proxy);
    result.key_recovery_guesses = proxy.key_recovery_guesses();
  } else {
    WindowsUpdateServer server(world.catalog);
    WindowsMitmProxy proxy(world.script, server);
    VirtualFs fs(sandbox_root / scenario.name);

    WindowsVictimConfig cfg;
    cfg.installed_version = scenario.installed_version;
    cfg.sanitize_filenames = scenario.sanitize_filenames;

    result.outcome = victim_update_windows(cfg, proxy, fs, world.ca);
    result.escapes_detected = fs.escape_count();
    result.writes_outside_sandbox = fs.landed_outside_count();
  }

  check_expectation(scenario, world, result.outcome, result);
  return result;
}

}  // namespace wuplab::update_sim
