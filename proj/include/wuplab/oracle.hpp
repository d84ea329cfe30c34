#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "wuplab/sha256.hpp"
#include "wuplab/wup.hpp"

namespace wuplab::oracle {

enum class KeyWrap { textbook, oaep };

struct OracleConfig {
  rsa::RsaKeyPair key_pair;
  bool respond_on_valid = true;
  bool log_queries = true;
  int artificial_latency_ms = 0;
  KeyWrap wrap = KeyWrap::textbook;
  unsigned key_bits = 128;  // truncation width of the decrypted key blob
};

struct TranscriptEntry {
  std::int64_t timestamp_ms;
  std::string client_id;
  bool accepted;
  Sha256Digest rsa_blob_digest;
};

// Append-only, safe for concurrent appends; one entry per query served.
class OracleTranscript {
 public:
  void append(TranscriptEntry entry);
  std::vector<TranscriptEntry> snapshot() const;
  std::size_t size() const;
  std::size_t accepted_count() const;
  void clear();
  void write_jsonl(std::ostream& out) const;

 private:
  mutable std::mutex mutex_;
  std::vector<TranscriptEntry> entries_;
};

// The simulated WUP server. Holds the private key, applies protocol steps 5-7
// and answers with either an encrypted response payload or nothing at all;
// silence is the entire oracle signal.
class Oracle {
 public:
  explicit Oracle(OracleConfig cfg) : cfg_(std::move(cfg)) {}

  std::optional<Bytes> handle_session(const wup::EncryptedSession& sess,
                                      std::string_view client_id = "inproc");
  std::optional<Bytes> handle_body(ByteView body, std::string_view client_id);

  const OracleConfig& config() const { return cfg_; }
  const rsa::RsaPublicKey& public_key() const { return cfg_.key_pair.pub; }
  OracleTranscript& transcript() { return transcript_; }
  const OracleTranscript& transcript() const { return transcript_; }

  static wup::WupMessage response_message();

 private:
  OracleConfig cfg_;
  OracleTranscript transcript_;
};

struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One frame in, at most one frame out, then close. Per-connection failures
// never take the service down.
class TcpOracleServer {
 public:
  // port 0 binds an ephemeral port; see port() after construction.
  TcpOracleServer(Oracle& oracle, const std::string& host = "127.0.0.1", std::uint16_t port = 0);
  ~TcpOracleServer();

  TcpOracleServer(const TcpOracleServer&) = delete;
  TcpOracleServer& operator=(const TcpOracleServer&) = delete;

  void stop();
  std::uint16_t port() const { return port_; }
  std::string host() const { return host_; }
  std::size_t connections() const { return connections_.load(); }

 private:
  void accept_loop();

  Oracle& oracle_;
  std::string host_;
  std::uint16_t port_ = 0;
  int listen_fd_ = -1;
  std::atomic<bool> stopping_{false};
  std::atomic<std::size_t> connections_{0};
  std::vector<std::thread> workers_;
  std::mutex workers_mutex_;
  std::thread acceptor_;
};

// Attack-side view of the oracle: returns the response payload, or nullopt
// when the server stayed silent. Throws TransportError on connection trouble.
using OracleFn = std::function<std::optional<Bytes>(const wup::EncryptedSession&)>;

OracleFn in_process_oracle(Oracle& oracle);
OracleFn tcp_oracle(std::string host, std::uint16_t port, int timeout_ms = 2000);

}  // namespace wuplab::oracle
