#pragma once

#include <map>

#include "wuplab/rsa.hpp"
#include "wuplab/victim_prng.hpp"
#include "wuplab/wup.hpp"

namespace wuplab::test {

// 3233 = 53 * 61, e = 17, d = 413 (mod lcm(52, 60) = 780)
inline rsa::RsaKeyPair toy_key() {
  rsa::RsaKeyPair key;
  key.pub.n = 3233;
  key.pub.e = 17;
  key.d = 413;
  key.p = 61;
  key.q = 53;
  return key;
}

inline rsa::RsaKeyPair cached_key(unsigned bits, std::uint64_t seed = 42) {
  // keygen is deterministic per (bits, seed); cache the common fixtures
  static std::map<std::pair<unsigned, std::uint64_t>, rsa::RsaKeyPair> cache;
  auto it = cache.find({bits, seed});
  if (it != cache.end()) return it->second;
  numtheory::RandomSource rng(seed);
  rsa::RsaKeyPair key = rsa::keygen(bits, 65537, rng);
  cache.emplace(std::make_pair(bits, seed), key);
  return key;
}

inline victim_prng::SessionKey random_session_key(numtheory::RandomSource& rng) {
  Bytes b(16);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng());
  return victim_prng::session_key_from_bytes(view(b));
}

inline wup::WupMessage sample_request(std::string_view marker = "hello") {
  wup::WupMessage msg;
  msg.kind = wup::MsgKind::request;
  msg.add_field("imei", std::string_view("862012034001337"));
  msg.add_field("payload", marker);
  return msg;
}

}  // namespace wuplab::test
