#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wuplab/bytes.hpp"
#include "wuplab/rsa.hpp"
#include "wuplab/victim_prng.hpp"

namespace wuplab::wup {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FramingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Every server-side failure collapses into this one error: AES padding, CRC,
// magic, layout. One merged reject is exactly what makes the oracle one bit.
struct InvalidRequest : std::runtime_error {
  InvalidRequest() : std::runtime_error("invalid request") {}
};

enum class MsgKind : std::uint8_t { request = 0, response = 1, update_query = 2, update_info = 3 };

// Wire layout: "WUP1" | kind(1B) | field-count(2B BE) |
//   (name-len 1B | name | value-len 4B BE | value)* | CRC-32(4B BE)
struct WupMessage {
  MsgKind kind = MsgKind::request;
  std::vector<std::pair<std::string, Bytes>> fields;

  void add_field(std::string name, ByteView value);
  void add_field(std::string name, std::string_view value);
  const Bytes* find_field(std::string_view name) const;
  std::string field_text(std::string_view name) const;  // "" when absent

  bool operator==(const WupMessage&) const = default;
};

inline constexpr std::array<std::uint8_t, 4> kMagic = {'W', 'U', 'P', '1'};

Bytes serialize(const WupMessage& msg);
WupMessage parse(ByteView data);  // throws ParseError

// RSA-wrapped key blob plus the AES-ECB payload (protocol steps 1-4).
struct EncryptedSession {
  Bytes rsa_blob;  // big-endian, exactly modulus-length bytes
  Bytes payload;   // AES-128-ECB ciphertext, length a positive multiple of 16
};

// The constants the legacy client shipped with.
struct HardcodedKeys {
  static constexpr std::array<std::uint8_t, 8> kDesMacKey = {0x25, 0x92, 0x3C, 0x7F,
                                                             0x2A, 0xE5, 0xEF, 0x92};
  static constexpr std::string_view kTeaResponseKey = "sDf434ol*123+-KD";  // 16 ASCII bytes
};

EncryptedSession seal_session(const rsa::RsaPublicKey& pub, const victim_prng::SessionKey& key,
                              const WupMessage& msg);

// Server side of steps 5-6: RSA-decrypt the blob, keep only the low `key_bits`
// bits of the plaintext as the AES key, then decrypt and parse the payload.
// Throws InvalidRequest on any failure.
std::pair<victim_prng::SessionKey, WupMessage> open_session(const rsa::RsaKeyPair& key_pair,
                                                            const EncryptedSession& sess,
                                                            unsigned key_bits = 128);

// OAEP-wrapped variants (the remediation comparison target).
EncryptedSession seal_session_oaep(const rsa::RsaPublicKey& pub, const victim_prng::SessionKey& key,
                                   const WupMessage& msg, rsa::RandomSource& rng);
std::pair<victim_prng::SessionKey, WupMessage> open_session_oaep(const rsa::RsaKeyPair& key_pair,
                                                                 const EncryptedSession& sess);

Bytes encode_session(const EncryptedSession& sess);
EncryptedSession decode_session(ByteView body, std::size_t modulus_bytes);  // throws InvalidRequest

// ---------------------------------------------------------------------------
// Length-prefixed framing: 4-byte big-endian length then the body, 1 MiB cap.

inline constexpr std::size_t kMaxFrame = std::size_t(1) << 20;

class ByteStream {
 public:
  virtual ~ByteStream() = default;
  // Returns bytes read (0 only at end of stream).
  virtual std::size_t read_some(std::span<std::uint8_t> out) = 0;
  virtual void write(ByteView data) = 0;
};

class MemoryStream final : public ByteStream {
 public:
  std::size_t read_some(std::span<std::uint8_t> out) override;
  void write(ByteView data) override;
  const Bytes& buffer() const { return buffer_; }

 private:
  Bytes buffer_;
  std::size_t read_pos_ = 0;
};

void frame_write(ByteStream& stream, ByteView body);  // throws FramingError on oversize
// nullopt on clean end-of-stream; throws FramingError on oversize or truncation.
std::optional<Bytes> frame_read(ByteStream& stream);

}  // namespace wuplab::wup
