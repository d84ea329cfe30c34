#include "wuplab/victim_prng.hpp"

#include <algorithm>
#include <stdexcept>

namespace wuplab::victim_prng {

std::int32_t Lcg48::next_int(std::int32_t bound) {
  if (bound <= 0) throw std::invalid_argument("next_int: bound must be positive");
  if ((bound & -bound) == bound) {  // power of two
    return static_cast<std::int32_t>((static_cast<std::int64_t>(bound) * next(31)) >> 31);
  }
  for (;;) {
    std::int32_t r = static_cast<std::int32_t>(next(31));
    std::int32_t v = r % bound;
    // reject if r - v + (bound - 1) would overflow 31 bits
    if (static_cast<std::int64_t>(r) - v + (bound - 1) <= 0x7FFFFFFF) return v;
  }
}

void Lcg48::next_bytes(std::span<std::uint8_t> out) {
  for (std::size_t i = 0; i < out.size();) {
    std::uint32_t rnd = next(32);
    for (std::size_t n = std::min<std::size_t>(out.size() - i, 4); n-- > 0; rnd >>= 8) {
      out[i++] = static_cast<std::uint8_t>(rnd);
    }
  }
}

SessionKey keygen_v63(std::uint64_t seed_i, std::uint64_t seed_j) {
  Lcg48 gen_i(seed_i);
  Lcg48 gen_j(seed_j);
  std::int32_t i = 10000000 + gen_i.next_int(89999999);
  std::int32_t j = 10000000 + gen_j.next_int(89999999);
  SessionKey key;
  key.origin = KeyOrigin::v63;
  // both values are always 8 decimal digits
  for (int pos = 7; pos >= 0; --pos, i /= 10) key.bytes[pos] = static_cast<std::uint8_t>('0' + i % 10);
  for (int pos = 15; pos >= 8; --pos, j /= 10) key.bytes[pos] = static_cast<std::uint8_t>('0' + j % 10);
  return key;
}

SessionKey keygen_v63_at(std::int64_t millis) {
  SessionKey key = keygen_v63(static_cast<std::uint64_t>(millis), static_cast<std::uint64_t>(millis) + 1);
  key.seed_millis = millis;
  return key;
}

SessionKey keygen_v65(std::int64_t millis) {
  Lcg48 gen(static_cast<std::uint64_t>(millis));
  SessionKey key;
  key.origin = KeyOrigin::v65;
  key.seed_millis = millis;
  gen.next_bytes(std::span(key.bytes.data(), 8));
  gen.next_bytes(std::span(key.bytes.data() + 8, 8));
  return key;
}

SessionKey session_key_from_bytes(ByteView key16) {
  if (key16.size() != 16) throw std::invalid_argument("session key must be 16 bytes");
  SessionKey key;
  key.origin = KeyOrigin::external;
  std::copy(key16.begin(), key16.end(), key.bytes.begin());
  return key;
}

}  // namespace wuplab::victim_prng
