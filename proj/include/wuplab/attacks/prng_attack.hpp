#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>

#include "wuplab/exec.hpp"
#include "wuplab/victim_prng.hpp"
#include "wuplab/wup.hpp"

namespace wuplab::attacks {

struct SeedNotInWindow : std::runtime_error {
  std::uint64_t guesses;
  explicit SeedNotInWindow(std::uint64_t g)
      : std::runtime_error("prng attack: seed not in window"), guesses(g) {}
};

struct PrngAttackResult {
  victim_prng::SessionKey key;
  std::uint64_t guesses;       // candidates tested, including the hit
  std::int64_t key_millis;     // recovered generation timestamp
};

using KeyCheck = std::function<bool(const victim_prng::SessionKey&)>;

// Walks candidate timestamps outward from the observation time in the order
// t, t+1, t-1, t+2, t-2, ... regenerating the v6.5 key for each and testing
// it; an offset of magnitude d is reached within 2d+1 guesses. The parallel
// kernel scans fixed-size chunks of the same order and returns the identical
// first hit, so results match the serial twin exactly.
PrngAttackResult seed_search(const KeyCheck& is_victim_key, std::int64_t observed_at_ms,
                             std::int64_t radius_ms, Exec exec = Exec::parallel);

// Local key check for a captured session: AES-decrypt the payload and accept
// when it parses as a WUP message.
KeyCheck payload_key_check(Bytes payload);

PrngAttackResult prng_attack(const wup::EncryptedSession& observed, std::int64_t observed_at_ms,
                             std::int64_t radius_ms, Exec exec = Exec::parallel);

}  // namespace wuplab::attacks
