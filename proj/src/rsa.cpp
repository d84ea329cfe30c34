#include "wuplab/rsa.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "wuplab/numtheory.hpp"
#include "wuplab/sha256.hpp"

namespace wuplab::rsa {

using numtheory::bit_length;
using numtheory::from_bytes_be;
using numtheory::mod_inv;
using numtheory::mod_pow;
using numtheory::to_bytes_be_padded;

std::size_t RsaPublicKey::modulus_bytes() const { return (bit_length(n) + 7) / 8; }

namespace {

bool valid_keygen_bits(unsigned bits) {
  return bits == 128 || bits == 256 || bits == 512 || bits == 1024 || bits == 2048;
}

// Probable prime of exactly `bits` bits with the two top bits set, so p*q has
// exactly 2*bits bits.
numtheory::BigUint gen_prime_top2(unsigned bits, RandomSource& rng) {
  for (;;) {
    BigUint cand = numtheory::random_bits(rng, bits);
    mpz_setbit(cand.get_mpz_t(), bits - 1);
    mpz_setbit(cand.get_mpz_t(), bits - 2);
    mpz_setbit(cand.get_mpz_t(), 0);
    if (numtheory::is_probable_prime(cand, 40)) return cand;
  }
}

}  // namespace

RsaKeyPair keygen(unsigned bits, const BigUint& e, RandomSource& rng) {
  if (!valid_keygen_bits(bits)) {
    throw std::invalid_argument("keygen: bits must be one of 128, 256, 512, 1024, 2048");
  }
  if (e < 3 || mpz_even_p(e.get_mpz_t())) throw std::invalid_argument("keygen: e must be odd and >= 3");

  constexpr int kMaxAttempts = 64;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    BigUint p = gen_prime_top2(bits / 2, rng);
    BigUint q = gen_prime_top2(bits / 2, rng);
    if (p == q) continue;
    if (p < q) std::swap(p, q);
    BigUint lambda;
    mpz_lcm(lambda.get_mpz_t(), BigUint(p - 1).get_mpz_t(), BigUint(q - 1).get_mpz_t());
    BigUint g;
    mpz_gcd(g.get_mpz_t(), e.get_mpz_t(), lambda.get_mpz_t());
    if (g != 1) continue;
    RsaKeyPair key;
    key.pub.n = p * q;
    key.pub.e = e;
    key.d = mod_inv(e, lambda);  // Carmichael lambda(n) = lcm(p-1, q-1)
    key.p = p;
    key.q = q;
    return key;
  }
  throw KeygenError("keygen: e not coprime with lambda(n) after bounded retries");
}

BigUint encrypt_raw(const RsaPublicKey& pub, const BigUint& m) {
  if (m < 0 || m >= pub.n) throw std::domain_error("encrypt_raw: message out of range");
  return mod_pow(m, pub.e, pub.n);
}

BigUint decrypt_raw(const RsaKeyPair& key, const BigUint& c) {
  if (c < 0 || c >= key.pub.n) throw std::domain_error("decrypt_raw: ciphertext out of range");
  return mod_pow(c, key.d, key.pub.n);
}

BigUint shift_ciphertext(const RsaPublicKey& pub, const BigUint& c, unsigned b) {
  if (c < 0 || c >= pub.n) throw std::domain_error("shift_ciphertext: ciphertext out of range");
  BigUint exponent = BigUint(b) * pub.e;
  return c * mod_pow(2, exponent, pub.n) % pub.n;
}

// ---------------------------------------------------------------------------
// OAEP (SHA-256 / MGF1), RFC 8017 EME-OAEP with an empty label.

namespace {

constexpr std::size_t kHashLen = 32;

Bytes mgf1(ByteView seed, std::size_t out_len) {
  Bytes out;
  out.reserve(out_len + kHashLen);
  for (std::uint32_t counter = 0; out.size() < out_len; ++counter) {
    Bytes block(seed.begin(), seed.end());
    block.push_back(std::uint8_t(counter >> 24));
    block.push_back(std::uint8_t(counter >> 16));
    block.push_back(std::uint8_t(counter >> 8));
    block.push_back(std::uint8_t(counter));
    auto digest = sha256(block);
    out.insert(out.end(), digest.begin(), digest.end());
  }
  out.resize(out_len);
  return out;
}

const Sha256Digest& empty_label_hash() {
  static const Sha256Digest h = sha256({});
  return h;
}

}  // namespace

std::size_t oaep_capacity(const RsaPublicKey& pub) {
  std::size_t k = pub.modulus_bytes();
  return k >= 2 * kHashLen + 2 ? k - 2 * kHashLen - 2 : 0;
}

BigUint encrypt_padded(const RsaPublicKey& pub, ByteView msg, RandomSource& rng) {
  std::size_t k = pub.modulus_bytes();
  if (msg.size() > oaep_capacity(pub)) throw std::invalid_argument("oaep: message too long");

  Bytes db;
  db.reserve(k - kHashLen - 1);
  const auto& lhash = empty_label_hash();
  db.insert(db.end(), lhash.begin(), lhash.end());
  db.resize(k - kHashLen - 1 - msg.size() - 1, 0);
  db.push_back(0x01);
  db.insert(db.end(), msg.begin(), msg.end());

  Bytes seed(kHashLen);
  for (auto& b : seed) b = static_cast<std::uint8_t>(rng());

  Bytes db_mask = mgf1(seed, db.size());
  for (std::size_t i = 0; i < db.size(); ++i) db[i] ^= db_mask[i];
  Bytes seed_mask = mgf1(db, kHashLen);
  for (std::size_t i = 0; i < kHashLen; ++i) seed[i] ^= seed_mask[i];

  Bytes em;
  em.reserve(k);
  em.push_back(0x00);
  em.insert(em.end(), seed.begin(), seed.end());
  em.insert(em.end(), db.begin(), db.end());
  return encrypt_raw(pub, from_bytes_be(em));
}

Bytes decrypt_padded(const RsaKeyPair& key, const BigUint& c) {
  std::size_t k = key.pub.modulus_bytes();
  if (k < 2 * kHashLen + 2) throw PaddingError();
  if (c < 0 || c >= key.pub.n) throw PaddingError();
  Bytes em = to_bytes_be_padded(decrypt_raw(key, c), k);

  bool ok = em[0] == 0x00;
  Bytes seed(em.begin() + 1, em.begin() + 1 + kHashLen);
  Bytes db(em.begin() + 1 + kHashLen, em.end());
  Bytes seed_mask = mgf1(db, kHashLen);
  for (std::size_t i = 0; i < kHashLen; ++i) seed[i] ^= seed_mask[i];
  Bytes db_mask = mgf1(seed, db.size());
  for (std::size_t i = 0; i < db.size(); ++i) db[i] ^= db_mask[i];

  const auto& lhash = empty_label_hash();
  for (std::size_t i = 0; i < kHashLen; ++i) ok &= db[i] == lhash[i];
  // first non-zero byte after lHash must be the 0x01 separator
  std::size_t sep = 0;
  for (std::size_t i = kHashLen; i < db.size(); ++i) {
    if (db[i] == 0x01 && sep == 0) sep = i;
    if (db[i] != 0x00 && sep == 0) break;
  }
  ok &= sep != 0;
  if (!ok) throw PaddingError();
  return Bytes(db.begin() + static_cast<std::ptrdiff_t>(sep) + 1, db.end());
}

// ---------------------------------------------------------------------------
// Textual key files

namespace {

void write_field(std::ostream& out, const char* name, const BigUint& v) {
  out << name << ": " << numtheory::to_decimal(v) << "\n";
}

BigUint read_field(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("key file: missing field " + name);
  auto colon = line.find(": ");
  if (colon == std::string::npos || line.substr(0, colon) != name) {
    throw std::runtime_error("key file: expected field " + name);
  }
  return numtheory::from_decimal(line.substr(colon + 2));
}

}  // namespace

void save_key_pair(const RsaKeyPair& key, std::ostream& out) {
  write_field(out, "n", key.pub.n);
  write_field(out, "e", key.pub.e);
  write_field(out, "d", key.d);
  write_field(out, "p", key.p);
  write_field(out, "q", key.q);
}

void save_key_pair(const RsaKeyPair& key, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("key file: cannot open " + path.string());
  save_key_pair(key, out);
}

RsaKeyPair load_key_pair(std::istream& in) {
  RsaKeyPair key;
  key.pub.n = read_field(in, "n");
  key.pub.e = read_field(in, "e");
  key.d = read_field(in, "d");
  key.p = read_field(in, "p");
  key.q = read_field(in, "q");
  if (key.p * key.q != key.pub.n) throw std::runtime_error("key file: n != p*q");
  return key;
}

RsaKeyPair load_key_pair(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("key file: cannot open " + path.string());
  return load_key_pair(in);
}

void save_public_key(const RsaPublicKey& pub, std::ostream& out) {
  write_field(out, "n", pub.n);
  write_field(out, "e", pub.e);
}

RsaPublicKey load_public_key(std::istream& in) {
  RsaPublicKey pub;
  pub.n = read_field(in, "n");
  pub.e = read_field(in, "e");
  return pub;
}

}  // namespace wuplab::rsa
