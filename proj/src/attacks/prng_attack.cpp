#include "wuplab/attacks/prng_attack.hpp"

#include <algorithm>

#include "wuplab/aes128.hpp"

namespace wuplab::attacks {

namespace {

// Canonical enumeration: index 0 -> offset 0, odd index i -> +(i+1)/2,
// even index i -> -(i/2).
std::int64_t offset_at(std::uint64_t index) {
  if (index == 0) return 0;
  if (index % 2 == 1) return static_cast<std::int64_t>((index + 1) / 2);
  return -static_cast<std::int64_t>(index / 2);
}

}  // namespace

PrngAttackResult seed_search(const KeyCheck& is_victim_key, std::int64_t observed_at_ms,
                             std::int64_t radius_ms, Exec exec) {
  if (radius_ms < 0) throw std::invalid_argument("seed_search: radius must be >= 0");
  const std::uint64_t total = 2 * static_cast<std::uint64_t>(radius_ms) + 1;

  auto test_index = [&](std::uint64_t index) -> bool {
    std::int64_t t = observed_at_ms + offset_at(index);
    return is_victim_key(victim_prng::keygen_v65(t));
  };

  std::uint64_t hit = total;  // sentinel: not found
  if (exec == Exec::serial) {
    for (std::uint64_t i = 0; i < total; ++i) {
      if (test_index(i)) {
        hit = i;
        break;
      }
    }
  } else {
    // Chunks run in order; indices inside a chunk run concurrently and the
    // minimal hit wins, so the outcome is independent of worker count.
    constexpr std::uint64_t kChunk = 4096;
    for (std::uint64_t base = 0; base < total && hit == total; base += kChunk) {
      const std::uint64_t end = std::min(base + kChunk, total);
      std::uint64_t local_hit = total;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(min : local_hit)
#endif
      for (std::int64_t i = static_cast<std::int64_t>(base); i < static_cast<std::int64_t>(end); ++i) {
        if (test_index(static_cast<std::uint64_t>(i))) {
          local_hit = std::min(local_hit, static_cast<std::uint64_t>(i));
        }
      }
      if (local_hit != total) hit = local_hit;
    }
  }

  if (hit == total) throw SeedNotInWindow(total);
  std::int64_t t = observed_at_ms + offset_at(hit);
  return {victim_prng::keygen_v65(t), hit + 1, t};
}

KeyCheck payload_key_check(Bytes payload) {
  return [payload = std::move(payload)](const victim_prng::SessionKey& key) {
    try {
      Bytes plain = aes::ecb_decrypt(ByteView(key.bytes.data(), key.bytes.size()), view(payload));
      wup::parse(view(plain));
      return true;
    } catch (const aes::DecryptError&) {
      return false;
    } catch (const wup::ParseError&) {
      return false;
    }
  };
}

PrngAttackResult prng_attack(const wup::EncryptedSession& observed, std::int64_t observed_at_ms,
                             std::int64_t radius_ms, Exec exec) {
  return seed_search(payload_key_check(observed.payload), observed_at_ms, radius_ms, exec);
}

}  // namespace wuplab::attacks
