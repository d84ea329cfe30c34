#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

#include "wuplab/oracle.hpp"

namespace wuplab::attacks {

struct Cca2Result {
  victim_prng::SessionKey recovered_key;
  std::uint64_t queries = 0;           // oracle queries made (one per key bit)
  std::vector<bool> per_bit_outcomes;  // oracle accepted, in query order (high shift first)
  std::chrono::duration<double> wall_time{};
  // recovered key re-checked locally against the captured payload; false means
  // the attack failed (it does against a padded oracle).
  bool recovered_valid = false;
};

// Bit-at-a-time chosen-ciphertext attack on the unpadded key blob.
//
// With C = k^e mod n, the shifted ciphertext C_b = C*(2^(b*e) mod n) mod n
// decrypts to 2^b*k, of which the server keeps the low key_bits bits. At step
// b the low (key_bits-1-b) bits of k are already known, so the candidate key
// (known bits shifted up by b, next unknown bit guessed 0) is right exactly
// when that bit of k is 0 -- and then the sealed probe decrypts and the server
// answers. Silence means the bit was 1. One query per bit, key_bits in total,
// starting from b = key_bits-1 (the lowest key bit parked at the top).
Cca2Result cca2_attack(const wup::EncryptedSession& target, const oracle::OracleFn& query,
                       const rsa::RsaPublicKey& pub, unsigned key_bits = 128);

}  // namespace wuplab::attacks
