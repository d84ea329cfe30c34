#include "wuplab/tea.hpp"

#include <stdexcept>

namespace wuplab::tea {

namespace {

constexpr std::uint32_t kDelta = 0x9E3779B9u;

std::uint32_t load_be(const std::uint8_t* p) {
  return std::uint32_t(p[0]) << 24 | std::uint32_t(p[1]) << 16 | std::uint32_t(p[2]) << 8 | p[3];
}

void store_be(std::uint8_t* p, std::uint32_t v) {
  p[0] = std::uint8_t(v >> 24);
  p[1] = std::uint8_t(v >> 16);
  p[2] = std::uint8_t(v >> 8);
  p[3] = std::uint8_t(v);
}

}  // namespace

void encrypt_block(std::uint32_t v[2], const std::uint32_t key[4]) {
  std::uint32_t v0 = v[0], v1 = v[1], sum = 0;
  for (int i = 0; i < 32; ++i) {
    sum += kDelta;
    v0 += ((v1 << 4) + key[0]) ^ (v1 + sum) ^ ((v1 >> 5) + key[1]);
    v1 += ((v0 << 4) + key[2]) ^ (v0 + sum) ^ ((v0 >> 5) + key[3]);
  }
  v[0] = v0;
  v[1] = v1;
}

void decrypt_block(std::uint32_t v[2], const std::uint32_t key[4]) {
  std::uint32_t v0 = v[0], v1 = v[1], sum = kDelta * 32;
  for (int i = 0; i < 32; ++i) {
    v1 -= ((v0 << 4) + key[2]) ^ (v0 + sum) ^ ((v0 >> 5) + key[3]);
    v0 -= ((v1 << 4) + key[0]) ^ (v1 + sum) ^ ((v1 >> 5) + key[1]);
    sum -= kDelta;
  }
  v[0] = v0;
  v[1] = v1;
}

Bytes cbc_encrypt(ByteView key16, ByteView plaintext) {
  if (key16.size() != 16) throw std::invalid_argument("tea: key must be 16 bytes");
  std::uint32_t key[4];
  for (int i = 0; i < 4; ++i) key[i] = load_be(key16.data() + 4 * i);

  std::size_t pad = 8 - plaintext.size() % 8;
  Bytes out;
  out.reserve(plaintext.size() + pad);
  std::uint32_t iv[2] = {0, 0};
  for (std::size_t off = 0; off + 8 <= plaintext.size() + pad; off += 8) {
    std::uint8_t buf[8];
    for (std::size_t i = 0; i < 8; ++i) {
      std::size_t idx = off + i;
      buf[i] = idx < plaintext.size() ? plaintext[idx] : static_cast<std::uint8_t>(pad);
    }
    std::uint32_t v[2] = {load_be(buf) ^ iv[0], load_be(buf + 4) ^ iv[1]};
    encrypt_block(v, key);
    iv[0] = v[0];
    iv[1] = v[1];
    std::uint8_t enc[8];
    store_be(enc, v[0]);
    store_be(enc + 4, v[1]);
    out.insert(out.end(), enc, enc + 8);
  }
  return out;
}

Bytes cbc_decrypt(ByteView key16, ByteView ciphertext) {
  if (key16.size() != 16) throw std::invalid_argument("tea: key must be 16 bytes");
  if (ciphertext.empty() || ciphertext.size() % 8 != 0) throw aes::DecryptError();
  std::uint32_t key[4];
  for (int i = 0; i < 4; ++i) key[i] = load_be(key16.data() + 4 * i);

  Bytes out(ciphertext.size());
  std::uint32_t iv[2] = {0, 0};
  for (std::size_t off = 0; off < ciphertext.size(); off += 8) {
    std::uint32_t c[2] = {load_be(ciphertext.data() + off), load_be(ciphertext.data() + off + 4)};
    std::uint32_t v[2] = {c[0], c[1]};
    decrypt_block(v, key);
    store_be(out.data() + off, v[0] ^ iv[0]);
    store_be(out.data() + off + 4, v[1] ^ iv[1]);
    iv[0] = c[0];
    iv[1] = c[1];
  }
  std::uint8_t pad = out.back();
  if (pad == 0 || pad > 8) throw aes::DecryptError();
  for (std::size_t i = out.size() - pad; i < out.size(); ++i) {
    if (out[i] != pad) throw aes::DecryptError();
  }
  out.resize(out.size() - pad);
  return out;
}

}  // namespace wuplab::tea
