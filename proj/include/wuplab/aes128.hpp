#pragma once

#include <array>
#include <stdexcept>

#include "wuplab/bytes.hpp"

namespace wuplab::aes {

// Single error covers bad length and bad padding so the reject reason leaks nothing.
struct DecryptError : std::runtime_error {
  DecryptError() : std::runtime_error("aes: decryption failed") {}
};

using Block = std::array<std::uint8_t, 16>;

class Aes128 {
 public:
  explicit Aes128(ByteView key);  // key must be 16 bytes
  Block encrypt_block(const Block& in) const;
  Block decrypt_block(const Block& in) const;

 private:
  std::array<std::uint8_t, 176> round_keys_{};
};

// AES-128-ECB with PKCS#7 padding. Deterministic and structure-leaking by
// design: this is the victim protocol's cipher mode, not a recommendation.
Bytes ecb_encrypt(ByteView key, ByteView plaintext);
Bytes ecb_decrypt(ByteView key, ByteView ciphertext);  // throws DecryptError

}  // namespace wuplab::aes
