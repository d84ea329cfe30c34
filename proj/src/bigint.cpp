#include "wuplab/bigint.hpp"

#include <stdexcept>

namespace wuplab::numtheory {

BigUint from_decimal(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("from_decimal: empty string");
  for (char c : s) {
    if (c < '0' || c > '9') throw std::invalid_argument("from_decimal: non-digit character");
  }
  return BigUint(s, 10);
}

std::string to_decimal(const BigUint& x) { return x.get_str(10); }

BigUint from_bytes_be(ByteView bytes) {
  BigUint x;
  if (!bytes.empty()) {
    mpz_import(x.get_mpz_t(), bytes.size(), 1 /*msb first*/, 1, 0, 0, bytes.data());
  }
  return x;
}

Bytes to_bytes_be(const BigUint& x) {
  if (x == 0) return {};
  std::size_t count = 0;
  Bytes out((mpz_sizeinbase(x.get_mpz_t(), 2) + 7) / 8);
  mpz_export(out.data(), &count, 1, 1, 0, 0, x.get_mpz_t());
  out.resize(count);
  return out;
}

Bytes to_bytes_be_padded(const BigUint& x, std::size_t width) {
  Bytes raw = to_bytes_be(x);
  if (raw.size() > width) throw std::invalid_argument("to_bytes_be_padded: value too wide");
  Bytes out(width, 0);
  std::copy(raw.begin(), raw.end(), out.begin() + static_cast<std::ptrdiff_t>(width - raw.size()));
  return out;
}

std::size_t bit_length(const BigUint& x) {
  if (x == 0) return 0;
  return mpz_sizeinbase(x.get_mpz_t(), 2);
}

bool test_bit(const BigUint& x, std::size_t i) {
  return mpz_tstbit(x.get_mpz_t(), i) != 0;
}

BigUint random_bits(RandomSource& rng, std::size_t bits) {
  BigUint x = 0;
  std::size_t full = bits / 64;
  for (std::size_t i = 0; i < full; ++i) {
    x <<= 64;
    x += BigUint(static_cast<unsigned long>(rng()));
  }
  std::size_t rest = bits % 64;
  if (rest) {
    x <<= rest;
    x += BigUint(static_cast<unsigned long>(rng() >> (64 - rest)));
  }
  return x;
}

BigUint random_below(RandomSource& rng, const BigUint& bound) {
  if (bound < 1) throw std::invalid_argument("random_below: bound must be >= 1");
  std::size_t bits = bit_length(bound);
  // rejection sampling keeps the draw uniform
  for (;;) {
    BigUint x = random_bits(rng, bits);
    if (x < bound) return x;
  }
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace wuplab::numtheory
