#include <doctest.h>

#include "helpers.hpp"
#include "wuplab/numtheory.hpp"
#include "wuplab/crc32.hpp"
#include "wuplab/wup.hpp"

using namespace wuplab;
using namespace wuplab::wup;
using numtheory::BigUint;
using numtheory::RandomSource;

namespace {

WupMessage random_message(RandomSource& rng) {
  WupMessage msg;
  msg.kind = static_cast<MsgKind>(rng() % 4);
  std::size_t nfields = rng() % 6;
  for (std::size_t i = 0; i < nfields; ++i) {
    std::string name = "f" + std::to_string(rng() % 100);
    Bytes value(rng() % 40);
    for (auto& b : value) b = static_cast<std::uint8_t>(rng());
    msg.add_field(name, view(value));
  }
  return msg;
}

}  // namespace

TEST_CASE("message serialization round-trips") {
  RandomSource rng(50);
  for (int i = 0; i < 300; ++i) {
    WupMessage msg = random_message(rng);
    CHECK(parse(view(serialize(msg))) == msg);
  }
}

TEST_CASE("message layout is bit-exact") {
  WupMessage msg;
  msg.kind = MsgKind::response;
  msg.add_field("ab", std::string_view("xyz"));
  Bytes wire = serialize(msg);
  // "WUP1" | kind | count | name-len "ab" | value-len "xyz" | crc
  Bytes expected = to_bytes("WUP1");
  expected.push_back(0x01);
  expected.push_back(0x00);
  expected.push_back(0x01);
  expected.push_back(0x02);
  expected.push_back('a');
  expected.push_back('b');
  expected.insert(expected.end(), {0x00, 0x00, 0x00, 0x03});
  expected.push_back('x');
  expected.push_back('y');
  expected.push_back('z');
  std::uint32_t crc = crc32(view(expected));
  expected.insert(expected.end(),
                  {std::uint8_t(crc >> 24), std::uint8_t(crc >> 16), std::uint8_t(crc >> 8),
                   std::uint8_t(crc)});
  CHECK(wire == expected);
}

TEST_CASE("parse rejects corruption") {
  WupMessage msg = test::sample_request();
  Bytes wire = serialize(msg);

  Bytes tampered = wire;
  tampered[6] ^= 0x01;
  CHECK_THROWS_AS(parse(view(tampered)), ParseError);  // checksum breaks

  Bytes bad_magic = wire;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(parse(view(bad_magic)), ParseError);

  CHECK_THROWS_AS(parse(Bytes{1, 2, 3}), ParseError);

  Bytes bad_kind = wire;
  bad_kind[4] = 9;  // fix the crc so only the kind check can reject
  Bytes body(bad_kind.begin(), bad_kind.end() - 4);
  std::uint32_t crc = crc32(view(body));
  bad_kind[bad_kind.size() - 4] = std::uint8_t(crc >> 24);
  bad_kind[bad_kind.size() - 3] = std::uint8_t(crc >> 16);
  bad_kind[bad_kind.size() - 2] = std::uint8_t(crc >> 8);
  bad_kind[bad_kind.size() - 1] = std::uint8_t(crc);
  CHECK_THROWS_AS(parse(view(bad_kind)), ParseError);
}

TEST_CASE("seal/open round-trips for a thousand random pairs") {
  rsa::RsaKeyPair key = test::cached_key(256);
  RandomSource rng(51);
  for (int i = 0; i < 1000; ++i) {
    auto session_key = test::random_session_key(rng);
    WupMessage msg = random_message(rng);
    EncryptedSession sess = seal_session(key.pub, session_key, msg);
    auto [recovered_key, recovered_msg] = open_session(key, sess);
    CHECK(recovered_key.bytes == session_key.bytes);
    CHECK(recovered_msg == msg);
  }
}

TEST_CASE("seal is deterministic") {
  rsa::RsaKeyPair key = test::cached_key(256);
  RandomSource rng(52);
  auto session_key = test::random_session_key(rng);
  WupMessage msg = test::sample_request();
  EncryptedSession a = seal_session(key.pub, session_key, msg);
  EncryptedSession b = seal_session(key.pub, session_key, msg);
  CHECK(a.rsa_blob == b.rsa_blob);
  CHECK(a.payload == b.payload);
  CHECK(a.rsa_blob.size() == key.pub.modulus_bytes());
}

TEST_CASE("rsa blob is exactly 128 bytes under a 1024-bit key") {
  rsa::RsaKeyPair key = test::cached_key(1024);
  RandomSource rng(53);
  EncryptedSession sess = seal_session(key.pub, test::random_session_key(rng), test::sample_request());
  CHECK(sess.rsa_blob.size() == 128);
}

TEST_CASE("server keeps only the low 128 bits of the decrypted blob") {
  rsa::RsaKeyPair key = test::cached_key(1024);
  RandomSource rng(54);

  SUBCASE("garbage above bit 200 is ignored") {
    auto session_key = test::random_session_key(rng);
    WupMessage msg = test::sample_request();
    EncryptedSession sess = seal_session(key.pub, session_key, msg);
    BigUint k = numtheory::from_bytes_be(view(Bytes(session_key.bytes.begin(), session_key.bytes.end())));
    BigUint plaintext = k + (BigUint(rng() % 1000 + 1) << 200);
    sess.rsa_blob = numtheory::to_bytes_be_padded(rsa::encrypt_raw(key.pub, plaintext),
                                                  key.pub.modulus_bytes());
    auto [recovered, recovered_msg] = open_session(key, sess);
    CHECK(recovered.bytes == session_key.bytes);
    CHECK(recovered_msg == msg);
  }

  SUBCASE("random wide plaintexts truncate to x mod 2^128") {
    for (int i = 0; i < 50; ++i) {
      BigUint x = numtheory::random_below(rng, key.pub.n);
      BigUint truncated = x & ((BigUint(1) << 128) - 1);
      Bytes key_bytes = numtheory::to_bytes_be_padded(truncated, 16);
      auto session_key = victim_prng::session_key_from_bytes(view(key_bytes));
      WupMessage msg = test::sample_request();
      EncryptedSession sess;
      sess.rsa_blob =
          numtheory::to_bytes_be_padded(rsa::encrypt_raw(key.pub, x), key.pub.modulus_bytes());
      sess.payload = seal_session(key.pub, session_key, msg).payload;
      auto [recovered, recovered_msg] = open_session(key, sess);
      CHECK(recovered.bytes == session_key.bytes);
    }
  }
}

TEST_CASE("open_session rejects tampering and wrong keys") {
  rsa::RsaKeyPair key = test::cached_key(256);
  RandomSource rng(55);
  auto session_key = test::random_session_key(rng);
  EncryptedSession sess = seal_session(key.pub, session_key, test::sample_request());

  SUBCASE("payload byte flip") {
    sess.payload[3] ^= 0x40;
    CHECK_THROWS_AS(open_session(key, sess), InvalidRequest);
  }
  SUBCASE("bad lengths") {
    EncryptedSession bad = sess;
    bad.rsa_blob.pop_back();
    CHECK_THROWS_AS(open_session(key, bad), InvalidRequest);
    bad = sess;
    bad.payload.resize(bad.payload.size() - 1);
    CHECK_THROWS_AS(open_session(key, bad), InvalidRequest);
    bad = sess;
    bad.payload.clear();
    CHECK_THROWS_AS(open_session(key, bad), InvalidRequest);
  }
  SUBCASE("a thousand random wrong keys never open it") {
    int accepts = 0;
    for (int i = 0; i < 1000; ++i) {
      auto wrong = test::random_session_key(rng);
      EncryptedSession forged = sess;
      forged.rsa_blob = numtheory::to_bytes_be_padded(
          rsa::encrypt_raw(key.pub, numtheory::from_bytes_be(ByteView(wrong.bytes.data(), 16))),
          key.pub.modulus_bytes());
      try {
        open_session(key, forged);
        ++accepts;
      } catch (const InvalidRequest&) {
      }
    }
    CHECK(accepts == 0);
  }
}

TEST_CASE("oaep session variant round-trips") {
  rsa::RsaKeyPair key = test::cached_key(1024);
  RandomSource rng(56);
  auto session_key = test::random_session_key(rng);
  WupMessage msg = test::sample_request();
  EncryptedSession sess = seal_session_oaep(key.pub, session_key, msg, rng);
  auto [recovered, recovered_msg] = open_session_oaep(key, sess);
  CHECK(recovered.bytes == session_key.bytes);
  CHECK(recovered_msg == msg);
  // a textbook blob does not survive the padded open
  EncryptedSession textbook = seal_session(key.pub, session_key, msg);
  CHECK_THROWS_AS(open_session_oaep(key, textbook), InvalidRequest);
}

TEST_CASE("framing round-trip") {
  MemoryStream stream;
  Bytes body = to_bytes("framed body");
  frame_write(stream, view(body));
  frame_write(stream, {});
  auto first = frame_read(stream);
  REQUIRE(first.has_value());
  CHECK(*first == body);
  auto second = frame_read(stream);
  REQUIRE(second.has_value());
  CHECK(second->empty());
  CHECK_FALSE(frame_read(stream).has_value());  // clean end of stream
}

TEST_CASE("framing enforces the cap and detects truncation") {
  MemoryStream oversize;
  oversize.write(Bytes{0x40, 0x00, 0x00, 0x00});  // claims 2^30 bytes
  CHECK_THROWS_AS(frame_read(oversize), FramingError);

  MemoryStream truncated;
  truncated.write(Bytes{0x00, 0x00, 0x00, 0x10, 0xAA});  // promises 16, delivers 1
  CHECK_THROWS_AS(frame_read(truncated), FramingError);

  MemoryStream sink;
  CHECK_THROWS_AS(frame_write(sink, Bytes(kMaxFrame + 1, 0)), FramingError);
}
