#pragma once

#include "wuplab/aes128.hpp"
#include "wuplab/bytes.hpp"

namespace wuplab::tea {

// Standard TEA (64 Feistel rounds, delta 0x9E3779B9) in CBC with a zero IV and
// PKCS#7 padding over 8-byte blocks. Stand-in for the victim's undocumented
// modified-TEA response cipher; words are serialized big-endian.
Bytes cbc_encrypt(ByteView key16, ByteView plaintext);
Bytes cbc_decrypt(ByteView key16, ByteView ciphertext);  // throws aes::DecryptError

void encrypt_block(std::uint32_t v[2], const std::uint32_t key[4]);
void decrypt_block(std::uint32_t v[2], const std::uint32_t key[4]);

}  // namespace wuplab::tea
