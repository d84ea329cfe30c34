#include "wuplab/wup.hpp"

#include <algorithm>
#include <cstring>

#include "wuplab/aes128.hpp"
#include "wuplab/crc32.hpp"
#include "wuplab/numtheory.hpp"

namespace wuplab::wup {

using numtheory::BigUint;
using numtheory::from_bytes_be;
using numtheory::to_bytes_be_padded;

void WupMessage::add_field(std::string name, ByteView value) {
  fields.emplace_back(std::move(name), Bytes(value.begin(), value.end()));
}

void WupMessage::add_field(std::string name, std::string_view value) {
  fields.emplace_back(std::move(name), to_bytes(value));
}

const Bytes* WupMessage::find_field(std::string_view name) const {
  for (const auto& [fname, fvalue] : fields) {
    if (fname == name) return &fvalue;
  }
  return nullptr;
}

std::string WupMessage::field_text(std::string_view name) const {
  const Bytes* v = find_field(name);
  return v ? to_string(*v) : std::string();
}

namespace {

void put_u16_be(Bytes& out, std::uint16_t v) {
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v));
}

void put_u32_be(Bytes& out, std::uint32_t v) {
  out.push_back(std::uint8_t(v >> 24));
  out.push_back(std::uint8_t(v >> 16));
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v));
}

struct Cursor {
  ByteView data;
  std::size_t pos = 0;
  std::uint8_t u8() {
    if (pos + 1 > data.size()) throw ParseError("wup: truncated");
    return data[pos++];
  }
  std::uint16_t u16_be() { return std::uint16_t(u8()) << 8 | u8(); }
  std::uint32_t u32_be() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = v << 8 | u8();
    return v;
  }
  ByteView take(std::size_t n) {
    if (pos + n > data.size()) throw ParseError("wup: truncated");
    ByteView v = data.subspan(pos, n);
    pos += n;
    return v;
  }
};

}  // namespace

Bytes serialize(const WupMessage& msg) {
  if (msg.fields.size() > 0xFFFF) throw std::invalid_argument("wup: too many fields");
  Bytes out(kMagic.begin(), kMagic.end());
  out.push_back(static_cast<std::uint8_t>(msg.kind));
  put_u16_be(out, static_cast<std::uint16_t>(msg.fields.size()));
  for (const auto& [name, value] : msg.fields) {
    if (name.size() > 0xFF) throw std::invalid_argument("wup: field name too long");
    out.push_back(static_cast<std::uint8_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    put_u32_be(out, static_cast<std::uint32_t>(value.size()));
    out.insert(out.end(), value.begin(), value.end());
  }
  put_u32_be(out, crc32(out));
  return out;
}

WupMessage parse(ByteView data) {
  if (data.size() < kMagic.size() + 1 + 2 + 4) throw ParseError("wup: too short");
  ByteView body = data.first(data.size() - 4);
  std::uint32_t stored = std::uint32_t(data[data.size() - 4]) << 24 |
                         std::uint32_t(data[data.size() - 3]) << 16 |
                         std::uint32_t(data[data.size() - 2]) << 8 | data[data.size() - 1];
  if (crc32(body) != stored) throw ParseError("wup: checksum mismatch");

  Cursor cur{body};
  if (!std::equal(kMagic.begin(), kMagic.end(), cur.take(4).begin())) throw ParseError("wup: bad magic");
  std::uint8_t kind = cur.u8();
  if (kind > static_cast<std::uint8_t>(MsgKind::update_info)) throw ParseError("wup: bad kind");
  WupMessage msg;
  msg.kind = static_cast<MsgKind>(kind);
  std::uint16_t count = cur.u16_be();
  for (std::uint16_t i = 0; i < count; ++i) {
    std::uint8_t name_len = cur.u8();
    ByteView name = cur.take(name_len);
    std::uint32_t value_len = cur.u32_be();
    ByteView value = cur.take(value_len);
    msg.fields.emplace_back(std::string(name.begin(), name.end()), Bytes(value.begin(), value.end()));
  }
  if (cur.pos != body.size()) throw ParseError("wup: trailing bytes");
  return msg;
}

EncryptedSession seal_session(const rsa::RsaPublicKey& pub, const victim_prng::SessionKey& key,
                              const WupMessage& msg) {
  BigUint k = from_bytes_be(ByteView(key.bytes.data(), key.bytes.size()));
  EncryptedSession sess;
  sess.rsa_blob = to_bytes_be_padded(rsa::encrypt_raw(pub, k), pub.modulus_bytes());
  sess.payload = aes::ecb_encrypt(ByteView(key.bytes.data(), key.bytes.size()), serialize(msg));
  return sess;
}

namespace {

std::pair<victim_prng::SessionKey, WupMessage> open_with_key(const victim_prng::SessionKey& key,
                                                             const EncryptedSession& sess) {
  try {
    Bytes plain = aes::ecb_decrypt(ByteView(key.bytes.data(), key.bytes.size()), sess.payload);
    return {key, parse(plain)};
  } catch (const aes::DecryptError&) {
    throw InvalidRequest();
  } catch (const ParseError&) {
    throw InvalidRequest();
  }
}

}  // namespace

std::pair<victim_prng::SessionKey, WupMessage> open_session(const rsa::RsaKeyPair& key_pair,
                                                            const EncryptedSession& sess,
                                                            unsigned key_bits) {
  if (key_bits == 0 || key_bits > 128) throw std::invalid_argument("open_session: key_bits must be 1..128");
  if (sess.rsa_blob.size() != key_pair.pub.modulus_bytes()) throw InvalidRequest();
  if (sess.payload.empty() || sess.payload.size() % 16 != 0) throw InvalidRequest();

  BigUint c = from_bytes_be(view(sess.rsa_blob));
  if (c >= key_pair.pub.n) throw InvalidRequest();
  // every bit above key_bits of the decrypted plaintext is discarded
  BigUint plain = rsa::decrypt_raw(key_pair, c);
  BigUint truncated = plain & ((BigUint(1) << key_bits) - 1);
  Bytes key_bytes = to_bytes_be_padded(truncated, 16);
  return open_with_key(victim_prng::session_key_from_bytes(view(key_bytes)), sess);
}

EncryptedSession seal_session_oaep(const rsa::RsaPublicKey& pub, const victim_prng::SessionKey& key,
                                   const WupMessage& msg, rsa::RandomSource& rng) {
  EncryptedSession sess;
  BigUint c = rsa::encrypt_padded(pub, ByteView(key.bytes.data(), key.bytes.size()), rng);
  sess.rsa_blob = to_bytes_be_padded(c, pub.modulus_bytes());
  sess.payload = aes::ecb_encrypt(ByteView(key.bytes.data(), key.bytes.size()), serialize(msg));
  return sess;
}

std::pair<victim_prng::SessionKey, WupMessage> open_session_oaep(const rsa::RsaKeyPair& key_pair,
                                                                 const EncryptedSession& sess) {
  if (sess.rsa_blob.size() != key_pair.pub.modulus_bytes()) throw InvalidRequest();
  if (sess.payload.empty() || sess.payload.size() % 16 != 0) throw InvalidRequest();
  Bytes key_bytes;
  try {
    key_bytes = rsa::decrypt_padded(key_pair, from_bytes_be(view(sess.rsa_blob)));
  } catch (const rsa::PaddingError&) {
    throw InvalidRequest();
  }
  if (key_bytes.size() != 16) throw InvalidRequest();
  return open_with_key(victim_prng::session_key_from_bytes(view(key_bytes)), sess);
}

Bytes encode_session(const EncryptedSession& sess) {
  Bytes out = sess.rsa_blob;
  out.insert(out.end(), sess.payload.begin(), sess.payload.end());
  return out;
}

EncryptedSession decode_session(ByteView body, std::size_t modulus_bytes) {
  if (body.size() < modulus_bytes + 16) throw InvalidRequest();
  EncryptedSession sess;
  sess.rsa_blob.assign(body.begin(), body.begin() + static_cast<std::ptrdiff_t>(modulus_bytes));
  sess.payload.assign(body.begin() + static_cast<std::ptrdiff_t>(modulus_bytes), body.end());
  return sess;
}

// ---------------------------------------------------------------------------

std::size_t MemoryStream::read_some(std::span<std::uint8_t> out) {
  std::size_t n = std::min(out.size(), buffer_.size() - read_pos_);
  std::memcpy(out.data(), buffer_.data() + read_pos_, n);
  read_pos_ += n;
  return n;
}

void MemoryStream::write(ByteView data) { buffer_.insert(buffer_.end(), data.begin(), data.end()); }

namespace {

// Reads exactly out.size() bytes. Returns false on end-of-stream before the
// first byte; throws on a mid-read truncation when `started` is set.
bool read_exact(ByteStream& stream, std::span<std::uint8_t> out, bool started) {
  std::size_t got = 0;
  while (got < out.size()) {
    std::size_t n = stream.read_some(out.subspan(got));
    if (n == 0) {
      if (got == 0 && !started) return false;
      throw FramingError("frame: truncated");
    }
    got += n;
  }
  return true;
}

}  // namespace

void frame_write(ByteStream& stream, ByteView body) {
  if (body.size() > kMaxFrame) throw FramingError("frame: oversize");
  std::uint8_t header[4] = {std::uint8_t(body.size() >> 24), std::uint8_t(body.size() >> 16),
                            std::uint8_t(body.size() >> 8), std::uint8_t(body.size())};
  stream.write(ByteView(header, 4));
  stream.write(body);
}

std::optional<Bytes> frame_read(ByteStream& stream) {
  std::uint8_t header[4];
  if (!read_exact(stream, std::span(header, 4), false)) return std::nullopt;
  std::size_t len = std::size_t(header[0]) << 24 | std::size_t(header[1]) << 16 |
                    std::size_t(header[2]) << 8 | header[3];
  if (len > kMaxFrame) throw FramingError("frame: oversize");
  Bytes body(len);
  read_exact(stream, std::span(body.data(), body.size()), true);
  return body;
}

}  // namespace wuplab::wup
