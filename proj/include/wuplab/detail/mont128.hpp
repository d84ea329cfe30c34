#pragma once

#include <cstdint>

namespace wuplab::numtheory::detail {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// Montgomery arithmetic over an odd modulus below 2^128, R = 2^128, limbs of
// 64 bits. This is the inner loop of the factoring engine; tests compare it
// limb-for-limb against GMP.
struct Mont128 {
  u128 n;
  u64 ninv;  // -n^{-1} mod 2^64
  u128 r2;   // (2^128)^2 mod n
  u128 one;  // 2^128 mod n

  explicit Mont128(u128 mod) : n(mod) {
    u64 inv = static_cast<u64>(n);  // Newton iteration; n odd
    for (int i = 0; i < 6; ++i) inv *= 2 - static_cast<u64>(n) * inv;
    ninv = ~inv + 1;
    one = static_cast<u128>(-n) % n;  // (2^128 - n) mod n
    u128 r = one;
    for (int i = 0; i < 128; ++i) r = dbl(r);
    r2 = r;
  }

  u128 dbl(u128 a) const { return a >= n - a ? a - (n - a) : a << 1; }

  u128 add(u128 a, u128 b) const {
    u128 s = a + b;               // may wrap: s == a+b-2^128
    if (s < a || s >= n) s -= n;  // the second wrap restores a+b-n
    return s;
  }

  u128 sub(u128 a, u128 b) const { return a >= b ? a - b : (n - b) + a; }

  // CIOS multiply-reduce: a*b*2^-128 mod n.
  u128 mul(u128 a, u128 b) const {
    u64 a0 = static_cast<u64>(a), a1 = static_cast<u64>(a >> 64);
    u64 b0 = static_cast<u64>(b), b1 = static_cast<u64>(b >> 64);
    u64 n0 = static_cast<u64>(n), n1 = static_cast<u64>(n >> 64);

    u128 t0 = static_cast<u128>(a0) * b0;
    u128 t1 = static_cast<u128>(a0) * b1 + static_cast<u64>(t0 >> 64);
    u64 r0 = static_cast<u64>(t0), r1 = static_cast<u64>(t1), r2hi = static_cast<u64>(t1 >> 64);

    u64 m = r0 * ninv;
    u128 c = (static_cast<u128>(m) * n0 + r0) >> 64;
    c += static_cast<u128>(m) * n1 + r1;
    r0 = static_cast<u64>(c);
    u128 cc = static_cast<u128>(r2hi) + static_cast<u64>(c >> 64);
    r1 = static_cast<u64>(cc);
    u64 r2b = static_cast<u64>(cc >> 64);

    u128 s = static_cast<u128>(a1) * b0 + r0;
    r0 = static_cast<u64>(s);
    u128 s1 = static_cast<u128>(a1) * b1 + r1 + static_cast<u64>(s >> 64);
    r1 = static_cast<u64>(s1);
    r2b += static_cast<u64>(s1 >> 64);

    m = r0 * ninv;
    c = (static_cast<u128>(m) * n0 + r0) >> 64;
    c += static_cast<u128>(m) * n1 + r1;
    u64 out0 = static_cast<u64>(c);
    u128 out1w = static_cast<u128>(r2b) + static_cast<u64>(c >> 64);

    u128 res = (out1w << 64) | out0;
    if ((out1w >> 64) != 0 || res >= n) res -= n;
    return res;
  }

  u128 to_mont(u128 x) const { return mul(x % n, r2); }
  u128 from_mont(u128 x) const { return mul(x, 1); }
};

inline u128 gcd_u128(u128 a, u128 b) {
  while (b) {
    u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace wuplab::numtheory::detail
