#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "wuplab/bigint.hpp"

namespace wuplab::rsa {

using numtheory::BigUint;
using numtheory::RandomSource;

struct KeygenError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Single error for every padding failure so callers cannot distinguish them.
struct PaddingError : std::runtime_error {
  PaddingError() : std::runtime_error("oaep: decode failed") {}
};

struct RsaPublicKey {
  BigUint n;
  BigUint e;
  std::size_t modulus_bytes() const;
};

struct RsaKeyPair {
  RsaPublicKey pub;
  BigUint d;
  BigUint p;
  BigUint q;
};

// Textbook RSA over a modulus of exactly `bits` bits.
// bits must be one of 128, 256, 512, 1024, 2048 (128 models the weak legacy key).
RsaKeyPair keygen(unsigned bits, const BigUint& e, RandomSource& rng);

// m^e mod n, no padding of any kind. Requires 0 <= m < n.
BigUint encrypt_raw(const RsaPublicKey& pub, const BigUint& m);
// c^d mod n. Requires 0 <= c < n.
BigUint decrypt_raw(const RsaKeyPair& key, const BigUint& c);

// C_b = C * (2^(b*e) mod n) mod n: the ciphertext of 2^b * k where k = dec(C),
// computed from the public key alone. C*2^(be) == k^e*2^(be) == (2^b*k)^e (mod n).
BigUint shift_ciphertext(const RsaPublicKey& pub, const BigUint& c, unsigned b);

// OAEP variant (SHA-256, MGF1), present only to show the bit-shift attack dies
// once padding is in place. Label: rsa-oaep-demo, not production crypto.
BigUint encrypt_padded(const RsaPublicKey& pub, ByteView msg, RandomSource& rng);
Bytes decrypt_padded(const RsaKeyPair& key, const BigUint& c);  // throws PaddingError
std::size_t oaep_capacity(const RsaPublicKey& pub);

// Plain textual key format: one decimal field per line, "name: value",
// in the order n, e, d, p, q (public files carry just n and e).
void save_key_pair(const RsaKeyPair& key, std::ostream& out);
void save_key_pair(const RsaKeyPair& key, const std::filesystem::path& path);
RsaKeyPair load_key_pair(std::istream& in);
RsaKeyPair load_key_pair(const std::filesystem::path& path);
void save_public_key(const RsaPublicKey& pub, std::ostream& out);
RsaPublicKey load_public_key(std::istream& in);

}  // namespace wuplab::rsa
