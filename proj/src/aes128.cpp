#include "wuplab/aes128.hpp"

#include <cstring>

namespace wuplab::aes {

namespace {

std::uint8_t gmul(std::uint8_t a, std::uint8_t b) {
  std::uint8_t p = 0;
  for (int i = 0; i < 8; ++i) {
    if (b & 1) p ^= a;
    bool hi = a & 0x80;
    a <<= 1;
    if (hi) a ^= 0x1B;  // x^8 + x^4 + x^3 + x + 1
    b >>= 1;
  }
  return p;
}

struct SboxTables {
  std::array<std::uint8_t, 256> fwd{};
  std::array<std::uint8_t, 256> inv{};
  SboxTables() {
    // S-box = affine transform of the GF(2^8) multiplicative inverse;
    // generated rather than hand-typed.
    auto rotl8 = [](std::uint8_t x, int s) -> std::uint8_t {
      return static_cast<std::uint8_t>(x << s | x >> (8 - s));
    };
    for (int x = 0; x < 256; ++x) {
      std::uint8_t xinv = 0;
      if (x != 0) {
        for (int y = 1; y < 256; ++y) {
          if (gmul(static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y)) == 1) {
            xinv = static_cast<std::uint8_t>(y);
            break;
          }
        }
      }
      std::uint8_t s = xinv ^ rotl8(xinv, 1) ^ rotl8(xinv, 2) ^ rotl8(xinv, 3) ^ rotl8(xinv, 4) ^ 0x63;
      fwd[x] = s;
      inv[s] = static_cast<std::uint8_t>(x);
    }
  }
};

const SboxTables& tables() {
  static const SboxTables t;
  return t;
}

void add_round_key(Block& s, const std::uint8_t* rk) {
  for (int i = 0; i < 16; ++i) s[i] ^= rk[i];
}

void mix_columns(Block& s) {
  for (int c = 0; c < 4; ++c) {
    std::uint8_t a0 = s[4 * c], a1 = s[4 * c + 1], a2 = s[4 * c + 2], a3 = s[4 * c + 3];
    s[4 * c] = gmul(a0, 2) ^ gmul(a1, 3) ^ a2 ^ a3;
    s[4 * c + 1] = a0 ^ gmul(a1, 2) ^ gmul(a2, 3) ^ a3;
    s[4 * c + 2] = a0 ^ a1 ^ gmul(a2, 2) ^ gmul(a3, 3);
    s[4 * c + 3] = gmul(a0, 3) ^ a1 ^ a2 ^ gmul(a3, 2);
  }
}

void inv_mix_columns(Block& s) {
  for (int c = 0; c < 4; ++c) {
    std::uint8_t a0 = s[4 * c], a1 = s[4 * c + 1], a2 = s[4 * c + 2], a3 = s[4 * c + 3];
    s[4 * c] = gmul(a0, 14) ^ gmul(a1, 11) ^ gmul(a2, 13) ^ gmul(a3, 9);
    s[4 * c + 1] = gmul(a0, 9) ^ gmul(a1, 14) ^ gmul(a2, 11) ^ gmul(a3, 13);
    s[4 * c + 2] = gmul(a0, 13) ^ gmul(a1, 9) ^ gmul(a2, 14) ^ gmul(a3, 11);
    s[4 * c + 3] = gmul(a0, 11) ^ gmul(a1, 13) ^ gmul(a2, 9) ^ gmul(a3, 14);
  }
}

// state byte layout: index = row + 4*column (FIPS-197 column-major)
void shift_rows(Block& s) {
  Block t = s;
  for (int r = 1; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) s[r + 4 * c] = t[r + 4 * ((c + r) % 4)];
  }
}

void inv_shift_rows(Block& s) {
  Block t = s;
  for (int r = 1; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) s[r + 4 * ((c + r) % 4)] = t[r + 4 * c];
  }
}

void sub_bytes(Block& s, const std::array<std::uint8_t, 256>& box) {
  for (auto& b : s) b = box[b];
}

}  // namespace

Aes128::Aes128(ByteView key) {
  if (key.size() != 16) throw std::invalid_argument("aes: key must be 16 bytes");
  const auto& sbox = tables().fwd;
  std::memcpy(round_keys_.data(), key.data(), 16);
  std::uint8_t rcon = 1;
  for (int i = 16; i < 176; i += 4) {
    std::uint8_t t[4];
    std::memcpy(t, &round_keys_[i - 4], 4);
    if (i % 16 == 0) {
      std::uint8_t tmp = t[0];
      t[0] = sbox[t[1]] ^ rcon;
      t[1] = sbox[t[2]];
      t[2] = sbox[t[3]];
      t[3] = sbox[tmp];
      rcon = gmul(rcon, 2);
    }
    for (int k = 0; k < 4; ++k) round_keys_[i + k] = round_keys_[i - 16 + k] ^ t[k];
  }
}

Block Aes128::encrypt_block(const Block& in) const {
  const auto& sbox = tables().fwd;
  Block s = in;
  add_round_key(s, &round_keys_[0]);
  for (int round = 1; round < 10; ++round) {
    sub_bytes(s, sbox);
    shift_rows(s);
    mix_columns(s);
    add_round_key(s, &round_keys_[16 * round]);
  }
  sub_bytes(s, sbox);
  shift_rows(s);
  add_round_key(s, &round_keys_[160]);
  return s;
}

Block Aes128::decrypt_block(const Block& in) const {
  const auto& inv = tables().inv;
  Block s = in;
  add_round_key(s, &round_keys_[160]);
  for (int round = 9; round >= 1; --round) {
    inv_shift_rows(s);
    sub_bytes(s, inv);
    add_round_key(s, &round_keys_[16 * round]);
    inv_mix_columns(s);
  }
  inv_shift_rows(s);
  sub_bytes(s, inv);
  add_round_key(s, &round_keys_[0]);
  return s;
}

Bytes ecb_encrypt(ByteView key, ByteView plaintext) {
  Aes128 cipher(key);
  std::size_t pad = 16 - plaintext.size() % 16;
  Bytes out;
  out.reserve(plaintext.size() + pad);
  Block block;
  for (std::size_t off = 0; off + 16 <= plaintext.size() + pad; off += 16) {
    for (std::size_t i = 0; i < 16; ++i) {
      std::size_t idx = off + i;
      block[i] = idx < plaintext.size() ? plaintext[idx] : static_cast<std::uint8_t>(pad);
    }
    Block enc = cipher.encrypt_block(block);
    out.insert(out.end(), enc.begin(), enc.end());
  }
  return out;
}

Bytes ecb_decrypt(ByteView key, ByteView ciphertext) {
  if (ciphertext.empty() || ciphertext.size() % 16 != 0) throw DecryptError();
  Aes128 cipher(key);
  Bytes out(ciphertext.size());
  Block block;
  for (std::size_t off = 0; off < ciphertext.size(); off += 16) {
    std::memcpy(block.data(), ciphertext.data() + off, 16);
    Block dec = cipher.decrypt_block(block);
    std::memcpy(out.data() + off, dec.data(), 16);
  }
  std::uint8_t pad = out.back();
  if (pad == 0 || pad > 16) throw DecryptError();
  for (std::size_t i = out.size() - pad; i < out.size(); ++i) {
    if (out[i] != pad) throw DecryptError();
  }
  out.resize(out.size() - pad);
  return out;
}

}  // namespace wuplab::aes
