#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>

#include "wuplab/bytes.hpp"

namespace wuplab::victim_prng {

// Bit-exact replica of the victim platform's 48-bit linear congruential
// generator (java.util.Random):
//   seed scramble: state0   = (seed XOR 0x5DEECE66D) mod 2^48
//   step:          statese' = (state * 0x5DEECE66D + 0xB) mod 2^48
//   next(bits):    top `bits` bits of the new state
class Lcg48 {
 public:
  static constexpr std::uint64_t kMultiplier = 0x5DEECE66Dull;
  static constexpr std::uint64_t kIncrement = 0xBull;
  static constexpr std::uint64_t kMask = (std::uint64_t(1) << 48) - 1;

  explicit Lcg48(std::uint64_t seed) { set_seed(seed); }

  void set_seed(std::uint64_t seed) { state_ = (seed ^ kMultiplier) & kMask; }
  std::uint64_t state() const { return state_; }

  // bits in 1..32
  std::uint32_t next(unsigned bits) {
    state_ = (state_ * kMultiplier + kIncrement) & kMask;
    return static_cast<std::uint32_t>(state_ >> (48 - bits));
  }

  // Java nextInt(bound): power-of-two fast path, otherwise rejection sampling
  // of candidates that would bias the modulo.
  std::int32_t next_int(std::int32_t bound);

  // Java nextBytes: one next(32) per 4-byte chunk, emitted LSB first.
  void next_bytes(std::span<std::uint8_t> out);

 private:
  std::uint64_t state_ = 0;
};

enum class KeyOrigin { v63, v65, external };

struct SessionKey {
  std::array<std::uint8_t, 16> bytes{};  // exactly 128 bits
  KeyOrigin origin = KeyOrigin::external;
  std::optional<std::int64_t> seed_millis;

  bool operator==(const SessionKey& other) const { return bytes == other.bytes; }
};

// v6.3 keygen: i, j = 10000000 + nextInt(89999999) from two independently
// seeded generators; key = ASCII of the 8+8 digit concatenation. Output
// entropy is below 2^53 no matter how the generators are seeded.
SessionKey keygen_v63(std::uint64_t seed_i, std::uint64_t seed_j);
// Convenience wrapper standing in for two back-to-back unseeded constructions.
SessionKey keygen_v63_at(std::int64_t millis);

// v6.5 keygen: one generator seeded with the wall clock, two nextBytes(8)
// draws concatenated. A pure function of the millisecond timestamp, which is
// the entire vulnerability.
SessionKey keygen_v65(std::int64_t millis);

SessionKey session_key_from_bytes(ByteView key16);

}  // namespace wuplab::victim_prng
