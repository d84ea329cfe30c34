#include "wuplab/factoring.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <numeric>
#include <optional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "wuplab/detail/mont128.hpp"
#include "wuplab/numtheory.hpp"

namespace wuplab::numtheory {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

namespace {

constexpr u64 kTrialDivisionLimit = 10000;
constexpr u64 kGcdBatch = 128;

const std::vector<u64>& small_primes() {
  static const std::vector<u64> primes = [] {
    std::vector<bool> comp(kTrialDivisionLimit, false);
    std::vector<u64> out;
    for (u64 i = 2; i < kTrialDivisionLimit; ++i) {
      if (comp[i]) continue;
      out.push_back(i);
      for (u64 j = i * i; j < kTrialDivisionLimit; j += i) comp[j] = true;
    }
    return out;
  }();
  return primes;
}

u64 gcd_u64(u64 a, u64 b) {
  while (b) {
    u64 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

using detail::gcd_u128;
using detail::Mont128;

u64 mulmod_u64(u64 a, u64 b, u64 n) { return static_cast<u64>(static_cast<u128>(a) * b % n); }

// ---------------------------------------------------------------------------
// 64-bit engine

// Brent's cycle-finding rho with batched gcd. Returns a nontrivial factor of
// composite odd n (> small primes) and adds the iterations spent to `iters`.
u64 brent_rho_u64(u64 n, u64& iters) {
  for (u64 c = 1;; ++c) {
    u64 y = 2, r = 1, q = 1, g = 1, x = 0, ys = 0;
    while (g == 1) {
      x = y;
      for (u64 i = 0; i < r; ++i) y = (mulmod_u64(y, y, n) + c) % n;
      for (u64 k = 0; k < r && g == 1;) {
        ys = y;
        u64 lim = std::min(kGcdBatch, r - k);
        for (u64 i = 0; i < lim; ++i) {
          y = (mulmod_u64(y, y, n) + c) % n;
          q = mulmod_u64(q, x > y ? x - y : y - x, n);
        }
        g = gcd_u64(q, n);
        k += lim;
        iters += lim;
      }
      r <<= 1;
    }
    if (g == n) {
      // gcd batch overshot the factor; walk the saved segment one step at a time
      g = 1;
      while (g == 1) {
        ys = (mulmod_u64(ys, ys, n) + c) % n;
        ++iters;
        g = gcd_u64(x > ys ? x - ys : ys - x, n);
      }
    }
    if (g != n) return g;
    // whole-cycle degeneracy: retry with the next polynomial constant
  }
}

// ---------------------------------------------------------------------------
// 128-bit engine (Montgomery arithmetic from detail/mont128.hpp)

// One Brent walk over x^2 + c; nullopt when the budget runs out first.
std::optional<u128> brent_walk_u128(const Mont128& M, u64 c_plain, u64 budget, u64& iters,
                                    const std::atomic<bool>* stop = nullptr) {
  const u128 n = M.n;
  u128 c = M.to_mont(c_plain);
  u128 y = M.to_mont(2 + c_plain);
  u128 g = 1, x = 0, ys = 0;
  u128 q = M.one;  // 1 in Montgomery form
  u64 r = 1;
  u64 used = 0;
  while (g == 1) {
    x = y;
    for (u64 i = 0; i < r; ++i) y = M.add(M.mul(y, y), c);
    for (u64 k = 0; k < r && g == 1;) {
      ys = y;
      u64 lim = std::min(kGcdBatch, r - k);
      for (u64 i = 0; i < lim; ++i) {
        y = M.add(M.mul(y, y), c);
        q = M.mul(q, M.sub(x, y));
      }
      g = gcd_u128(M.from_mont(q), n);
      k += lim;
      used += lim;
      if (used > budget) {
        iters += used;
        return std::nullopt;
      }
      if (stop && stop->load(std::memory_order_relaxed)) {
        iters += used;
        return std::nullopt;
      }
    }
    r <<= 1;
  }
  iters += used;
  if (g == n) {
    g = 1;
    while (g == 1) {
      ys = M.add(M.mul(ys, ys), c);
      ++iters;
      g = gcd_u128(M.from_mont(M.sub(x, ys)), n);
    }
  }
  if (g != n) return g;
  return std::nullopt;  // degenerate cycle; caller restarts with a new c
}

std::optional<u128> brent_rho_u128(u128 n, u64 budget, u64& iters, Exec exec) {
  Mont128 M(n);
#ifdef _OPENMP
  if (exec == Exec::parallel && omp_get_max_threads() > 1) {
    int workers = omp_get_max_threads();
    std::atomic<bool> found{false};
    std::atomic<u64> total{0};
    u128 result = 0;
    u64 share = budget / static_cast<u64>(workers) + 1;
#pragma omp parallel num_threads(workers)
    {
      int tid = omp_get_thread_num();
      u64 local_iters = 0;
      for (u64 c = 1 + static_cast<u64>(tid); local_iters < share && !found.load(std::memory_order_relaxed);
           c += static_cast<u64>(workers)) {
        u64 before = local_iters;
        auto f = brent_walk_u128(M, c, share - before, local_iters, &found);
        if (f) {
          found.store(true, std::memory_order_relaxed);
#pragma omp critical
          if (result == 0) result = *f;
          break;
        }
      }
      total += local_iters;
    }
    iters += total.load();
    if (result != 0) return result;
    return std::nullopt;
  }
#else
  (void)exec;
#endif
  u64 used = 0;
  for (u64 c = 1; used <= budget; ++c) {
    auto f = brent_walk_u128(M, c, budget - used, used, nullptr);
    if (f) {
      iters += used;
      return f;
    }
  }
  iters += used;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// GMP engine for anything wider than 128 bits

std::optional<BigUint> brent_rho_mpz(const BigUint& n, u64 budget, u64& iters) {
  u64 used = 0;
  for (u64 c = 1; used <= budget; ++c) {
    BigUint y = 2 + static_cast<long>(c % 1024), g = 1, q = 1, x, ys;
    u64 r = 1;
    while (g == 1) {
      x = y;
      for (u64 i = 0; i < r; ++i) y = (y * y + static_cast<long>(c)) % n;
      for (u64 k = 0; k < r && g == 1;) {
        ys = y;
        u64 lim = std::min(kGcdBatch, r - k);
        for (u64 i = 0; i < lim; ++i) {
          y = (y * y + static_cast<long>(c)) % n;
          q = q * abs(x - y) % n;
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += lim;
        used += lim;
        if (used > budget) {
          iters += used;
          return std::nullopt;
        }
      }
      r <<= 1;
    }
    if (g == n) {
      g = 1;
      while (g == 1) {
        ys = (ys * ys + static_cast<long>(c)) % n;
        ++used;
        BigUint d = abs(x - ys);
        mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
      }
    }
    if (g != n) {
      iters += used;
      return g;
    }
  }
  iters += used;
  return std::nullopt;
}

u128 to_u128(const BigUint& x) {
  u64 limbs[2] = {0, 0};
  std::size_t count = 0;
  mpz_export(limbs, &count, -1, 8, 0, 0, x.get_mpz_t());
  return (static_cast<u128>(limbs[1]) << 64) | limbs[0];
}

BigUint from_u128(u128 x) {
  u64 limbs[2] = {static_cast<u64>(x), static_cast<u64>(x >> 64)};
  BigUint out;
  mpz_import(out.get_mpz_t(), 2, -1, 8, 0, 0, limbs);
  return out;
}

}  // namespace

BigUint Factorization::product() const {
  BigUint p = 1;
  for (const auto& [prime, exp] : factors) {
    for (unsigned i = 0; i < exp; ++i) p *= prime;
  }
  return p;
}

std::vector<u64> factorize_u64(u64 n) {
  if (n == 0) throw std::invalid_argument("factorize_u64: n must be >= 1");
  std::vector<u64> out;
  for (u64 p : small_primes()) {
    if (p * p > n) break;
    while (n % p == 0) {
      out.push_back(p);
      n /= p;
    }
  }
  std::vector<u64> pending;
  if (n > 1) pending.push_back(n);
  u64 iters = 0;
  while (!pending.empty()) {
    u64 m = pending.back();
    pending.pop_back();
    if (is_prime_u64(m)) {
      out.push_back(m);
      continue;
    }
    u64 f = brent_rho_u64(m, iters);
    pending.push_back(f);
    pending.push_back(m / f);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Factorization factorize(const BigUint& n, const FactorOptions& opts) {
  if (n < 1) throw std::invalid_argument("factorize: n must be >= 1");
  Factorization result;
  std::map<BigUint, unsigned> found;
  BigUint rest = n;

  for (u64 p : small_primes()) {
    if (BigUint(static_cast<unsigned long>(p)) * static_cast<unsigned long>(p) > rest) break;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
      ++found[BigUint(static_cast<unsigned long>(p))];
      rest /= static_cast<unsigned long>(p);
    }
  }

  std::vector<BigUint> pending;
  if (rest > 1) pending.push_back(rest);
  while (!pending.empty()) {
    BigUint m = pending.back();
    pending.pop_back();
    if (m.fits_ulong_p()) {
      for (u64 p : factorize_u64(m.get_ui())) ++found[BigUint(static_cast<unsigned long>(p))];
      continue;
    }
    if (is_probable_prime(m)) {
      ++found[m];
      continue;
    }
    u64 remaining = opts.budget > result.iterations ? opts.budget - result.iterations : 0;
    if (remaining == 0) throw BudgetExhausted(result.iterations);
    if (bit_length(m) <= 128) {
      auto f = brent_rho_u128(to_u128(m), remaining, result.iterations, opts.exec);
      if (!f) throw BudgetExhausted(result.iterations);
      BigUint bf = from_u128(*f);
      pending.push_back(bf);
      pending.push_back(m / bf);
    } else {
      auto f = brent_rho_mpz(m, remaining, result.iterations);
      if (!f) throw BudgetExhausted(result.iterations);
      pending.push_back(*f);
      pending.push_back(m / *f);
    }
  }

  result.factors.assign(found.begin(), found.end());
  return result;
}

}  // namespace wuplab::numtheory
