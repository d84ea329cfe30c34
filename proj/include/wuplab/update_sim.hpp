#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wuplab/bytes.hpp"
#include "wuplab/md5.hpp"
#include "wuplab/rsa.hpp"
#include "wuplab/victim_prng.hpp"

namespace wuplab::update_sim {

enum class Variant { android_wup, windows_json };
enum class CryptoMode { v63_hardcoded, v65_session };

struct UpdateMetadata {
  Variant variant = Variant::android_wup;
  std::string url;
  Md5Digest md5{};
  std::optional<std::string> save_as;  // windows only
  std::string version;
};

// -1 / 0 / +1 over dotted numeric versions ("6.5.0.2170").
int compare_versions(const std::string& a, const std::string& b);

// ---------------------------------------------------------------------------
// Sandboxed filesystem. Escape attempts are detected and logged but the bytes
// always land inside the sandbox (escapes are redirected into an "escaped"
// mirror subtree). No write ever touches a real path outside root.

struct WriteRecord {
  std::string requested;        // file name as provided by the metadata
  std::string notional_target;  // where the write would have landed unsandboxed
  std::filesystem::path landed; // real file inside the sandbox
  bool escaped_root = false;
};

class VirtualFs {
 public:
  explicit VirtualFs(std::filesystem::path root);
  const std::filesystem::path& root() const { return root_; }
  const WriteRecord& write(std::string_view requested_name, ByteView data);
  const std::vector<WriteRecord>& writes() const { return writes_; }
  std::size_t escape_count() const;
  // Writes that physically resolved outside the sandbox; zero by construction.
  std::size_t landed_outside_count() const;

 private:
  std::filesystem::path root_;
  std::vector<WriteRecord> writes_;
};

// ---------------------------------------------------------------------------
// Authenticode stand-in: a keyed hash per signer name held by a mock CA.
// Verification asserts signer identity, nothing about what the payload does.

class MockCa {
 public:
  void register_signer(const std::string& name, ByteView key);
  Bytes sign(const std::string& signer, ByteView body) const;  // throws on unknown signer
  bool verify(const std::string& signer, ByteView body, ByteView signature) const;

 private:
  std::map<std::string, Bytes> keys_;
};

struct SignedBlob {
  Bytes payload;
  std::string signer;
  Bytes signature;
};

// Mock artifacts are tiny JSON documents; nothing is ever executed, outcomes
// only record digests and identities.
Bytes make_mock_apk(const std::string& package, const std::string& version,
                    const std::string& signer);
Bytes make_mock_exe(const MockCa& ca, const std::string& kind, const std::string& version,
                    const std::string& signer, const std::string& second_stage_url = "");
Bytes make_unsigned_exe(const std::string& version);

// ---------------------------------------------------------------------------
// Outcomes

enum class OutcomeKind { install_upgrade_prompt, install_new_package_prompt, execute, halt };

enum class HaltReason {
  none,
  no_update,
  decrypt_failure,
  bad_metadata,
  download_failed,
  hash_mismatch,
  downgrade_refused,
  upgrade_signer_mismatch,
  signature_invalid,
  invalid_package,
  fs_refused,
};

std::string_view to_string(OutcomeKind kind);
std::string_view to_string(HaltReason reason);

struct SecondStage {
  Md5Digest md5{};
  bool verified = false;
};

struct UpdateOutcome {
  OutcomeKind kind = OutcomeKind::halt;
  HaltReason halt_reason = HaltReason::none;
  Md5Digest payload_md5{};
  std::string package;        // android
  std::string signer;         // windows
  std::string executed_kind;  // windows: "browser-update" / "web-installer" / "payload"
  std::optional<SecondStage> second_stage;
  bool escaped_write = false;
  std::string overwrite_target;  // notional target of an escaped write
};

// ---------------------------------------------------------------------------
// Channels: the victim's only way to talk to its update server. A MITM proxy
// implements the same interface around an upstream channel.

class AndroidChannel {
 public:
  virtual ~AndroidChannel() = default;
  // One sealed WUP exchange; empty return means no (usable) response.
  virtual Bytes exchange(const Bytes& request_body) = 0;
  virtual std::optional<Bytes> fetch(const std::string& url) = 0;  // plain-HTTP download
};

class WindowsChannel {
 public:
  virtual ~WindowsChannel() = default;
  virtual std::string exchange(const std::string& query_json) = 0;
  virtual std::optional<Bytes> fetch(const std::string& url) = 0;
};

struct UpdateCatalog {
  std::string latest_version;
  std::string download_url;
  Bytes artifact;
  std::optional<std::string> save_as;  // windows
};

class AndroidUpdateServer final : public AndroidChannel {
 public:
  AndroidUpdateServer(rsa::RsaKeyPair key_pair, CryptoMode mode, UpdateCatalog catalog);
  Bytes exchange(const Bytes& request_body) override;
  std::optional<Bytes> fetch(const std::string& url) override;
  const rsa::RsaPublicKey& public_key() const { return key_pair_.pub; }

 private:
  rsa::RsaKeyPair key_pair_;
  CryptoMode mode_;
  UpdateCatalog catalog_;
};

class WindowsUpdateServer final : public WindowsChannel {
 public:
  explicit WindowsUpdateServer(UpdateCatalog catalog) : catalog_(std::move(catalog)) {}
  std::string exchange(const std::string& query_json) override;
  std::optional<Bytes> fetch(const std::string& url) override;

 private:
  UpdateCatalog catalog_;
};

// ---------------------------------------------------------------------------
// The scriptable man-in-the-middle.

struct ForgeKeyMissing : std::runtime_error {
  ForgeKeyMissing() : std::runtime_error("forge: required key material not available") {}
};

enum class ForgeMode { none, forge_metadata, corrupt_download };
enum class KeySource { none, hardcoded_v63, supplied, recover_prng };

struct ForgeScript {
  ForgeMode mode = ForgeMode::none;
  KeySource key_source = KeySource::none;
  std::optional<UpdateMetadata> forged_metadata;
  std::map<std::string, Bytes> attacker_files;  // URLs the attacker will serve
  std::optional<victim_prng::SessionKey> supplied_key;
  std::int64_t observed_at_millis = 0;  // for recover_prng
  std::int64_t prng_radius_ms = 35000;
  bool secure_transport = false;  // remediation toggle: tampering impossible
};

class AndroidMitmProxy final : public AndroidChannel {
 public:
  // pub is needed only for key recovery (splitting the observed session).
  AndroidMitmProxy(ForgeScript script, AndroidChannel& upstream, CryptoMode mode,
                   const rsa::RsaPublicKey* pub);
  Bytes exchange(const Bytes& request_body) override;
  std::optional<Bytes> fetch(const std::string& url) override;
  std::uint64_t key_recovery_guesses() const { return key_recovery_guesses_; }

 private:
  ForgeScript script_;
  AndroidChannel& upstream_;
  CryptoMode mode_;
  const rsa::RsaPublicKey* pub_;
  std::uint64_t key_recovery_guesses_ = 0;
};

class WindowsMitmProxy final : public WindowsChannel {
 public:
  WindowsMitmProxy(ForgeScript script, WindowsChannel& upstream);
  std::string exchange(const std::string& query_json) override;
  std::optional<Bytes> fetch(const std::string& url) override;

 private:
  ForgeScript script_;
  WindowsChannel& upstream_;
};

// ---------------------------------------------------------------------------
// Victims

struct AndroidVictimConfig {
  std::string installed_version = "6.5.0.2170";
  std::string installed_package = "com.tencent.mtt";
  std::string installed_signer = "tencent-release-key";
  CryptoMode crypto = CryptoMode::v65_session;
  rsa::RsaPublicKey server_pub;
  std::int64_t clock_millis = 0;  // seeds the session-key generator
};

UpdateOutcome victim_update_android(const AndroidVictimConfig& cfg, AndroidChannel& channel);

struct WindowsVictimConfig {
  std::string installed_version = "9.5.0";
  std::string expected_signer = "Tencent-mock";
  bool sanitize_filenames = false;  // remediation toggle for traversal
};

UpdateOutcome victim_update_windows(const WindowsVictimConfig& cfg, WindowsChannel& channel,
                                    VirtualFs& fs, const MockCa& ca);

// ---------------------------------------------------------------------------
// Scenario files

struct ScenarioExpect {
  std::string kind;  // outcome kind string
  std::optional<std::string> halt_reason;
  std::optional<std::string> payload;  // "official" | "attacker" | "second_stage"
  std::optional<bool> escaped_write;
  std::optional<std::string> overwrite_target_suffix;
  std::optional<std::string> executed_kind;
  std::optional<std::string> second_stage_payload;  // "attacker"
  std::optional<bool> second_stage_verified;
};

struct Scenario {
  std::string name;
  Variant variant = Variant::android_wup;
  CryptoMode crypto = CryptoMode::v65_session;
  std::string installed_version;
  std::string server_version;
  std::string forge_mode = "none";
  std::string key_source = "none";
  std::string attacker_payload;  // "malicious_apk" | "unsigned_exe" | "web_installer_chain" | ""
  std::optional<std::string> forged_save_as;
  std::optional<std::string> forged_version;
  std::int64_t clock_skew_ms = 0;
  bool sanitize_filenames = false;
  bool secure_transport = false;
  ScenarioExpect expect;
};

Scenario load_scenario(const std::filesystem::path& path);

struct ScenarioResult {
  UpdateOutcome outcome;
  bool matched = false;
  std::vector<std::string> mismatches;
  std::size_t escapes_detected = 0;
  std::size_t writes_outside_sandbox = 0;  // must be zero, always
  std::uint64_t key_recovery_guesses = 0;
};

ScenarioResult run_scenario(const Scenario& scenario, const std::filesystem::path& sandbox_root,
                            std::uint64_t seed);

}  // namespace wuplab::update_sim
