#include "wuplab/attacks/mitm.hpp"

#include <algorithm>

#include "wuplab/numtheory.hpp"

namespace wuplab::attacks {

using numtheory::mix64;
using numtheory::mod_inv;
using numtheory::mod_pow;

MitmTable mitm_build_table(const rsa::RsaPublicKey& pub, unsigned m1, Exec exec, bool allow_large) {
  if (m1 == 0 || m1 > 63) throw std::invalid_argument("mitm: m1 must be in 1..63");
  if (m1 > kMitmTableGuardBits && !allow_large) {
    throw std::invalid_argument("mitm: table for m1=" + std::to_string(m1) + " needs about " +
                                mitm_cost(m1, m1, 128).table_bytes_human +
                                "; pass allow_large to override the desk-scale guard");
  }
  MitmTable table;
  table.m1 = m1;
  table.modulus = pub.n;
  table.exponent = pub.e;

  const std::uint64_t count = std::uint64_t(1) << m1;
  table.entries.resize(count);
  auto fill = [&](std::uint64_t idx) {
    std::uint64_t m1_candidate = idx + 1;  // 1 <= M1 <= 2^m1
    table.entries[idx] = {mod_pow(BigUint(static_cast<unsigned long>(m1_candidate)), pub.e, pub.n),
                          m1_candidate};
  };
  if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i)
      fill(static_cast<std::uint64_t>(i));
  } else {
    for (std::uint64_t i = 0; i < count; ++i) fill(i);
  }
  std::sort(table.entries.begin(), table.entries.end(),
            [](const MitmTable::Entry& a, const MitmTable::Entry& b) { return a.value < b.value; });
  return table;
}

std::optional<BigUint> mitm_attack(const MitmTable& table, const BigUint& c, unsigned m2) {
  if (c < 0 || c >= table.modulus) throw std::domain_error("mitm: ciphertext out of range");
  const std::uint64_t limit = std::uint64_t(1) << m2;
  for (std::uint64_t m2_candidate = 1; m2_candidate <= limit; ++m2_candidate) {
    BigUint m2e = mod_pow(BigUint(static_cast<unsigned long>(m2_candidate)), table.exponent,
                          table.modulus);
    BigUint target;
    try {
      target = c * mod_inv(m2e, table.modulus) % table.modulus;
    } catch (const numtheory::NotCoprime&) {
      continue;  // gcd(M2, n) > 1; useless as a cofactor here
    }
    auto it = std::lower_bound(
        table.entries.begin(), table.entries.end(), target,
        [](const MitmTable::Entry& e, const BigUint& v) { return e.value < v; });
    for (; it != table.entries.end() && it->value == target; ++it) {
      BigUint m = BigUint(static_cast<unsigned long>(it->m1_candidate)) *
                  static_cast<unsigned long>(m2_candidate);
      if (m < table.modulus && mod_pow(m, table.exponent, table.modulus) == c) return m;
    }
  }
  return std::nullopt;
}

MitmCost mitm_cost(unsigned m1, unsigned m2, unsigned key_bits) {
  MitmCost cost;
  cost.m1 = m1;
  cost.m2 = m2;
  cost.key_bits = key_bits;
  cost.table_bits = (BigUint(1) << (m1 + 1)) * std::max(m1, m2);
  cost.exponentiations = BigUint(1) << m2;

  BigUint bytes = cost.table_bits / 8;
  BigUint peta = BigUint("500000000000000");
  peta = (bytes + peta) / BigUint("1000000000000000");  // rounded SI petabytes
  std::string digits = numtheory::to_decimal(peta);
  std::string grouped;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) grouped.push_back(',');
    grouped.push_back(digits[i]);
  }
  cost.table_bytes_human = grouped + " petabytes";
  return cost;
}

// ---------------------------------------------------------------------------
// Split probability

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// DFS over divisors d <= 2^m1 of the factored value, accepting when the
// complementary divisor fits 2^m2 (d * 2^m2 >= value).
template <typename Wide, typename Value>
bool divisor_dfs(const std::vector<std::pair<Value, unsigned>>& pf, std::size_t idx, Wide d,
                 Wide cap1, const Value& value, unsigned m2) {
  if constexpr (std::is_same_v<Value, u64>) {
    if (m2 < 128 && (u128(d) << m2) >= u128(value)) return true;
  } else {
    if ((BigUint(d) << m2) >= value) return true;
  }
  if (idx == pf.size()) return false;
  Wide acc = d;
  for (unsigned e = 0; e <= pf[idx].second; ++e) {
    if (divisor_dfs(pf, idx + 1, acc, cap1, value, m2)) return true;
    if (e == pf[idx].second) break;
    if constexpr (std::is_same_v<Value, u64>) {
      if (acc > cap1 / pf[idx].first) break;  // next power would pass the cap
      acc *= pf[idx].first;
    } else {
      acc = acc * pf[idx].first;
      if (acc > cap1) break;
    }
  }
  return false;
}

// Meet-in-the-middle over the factor list: divisors of each half, one half
// sorted, then interval lookups. Used when the factor list is long enough to
// make plain DFS unattractive (only reachable with >20 distinct primes).
bool divisor_mitm(const std::vector<std::pair<BigUint, unsigned>>& pf, const BigUint& value,
                  unsigned m1, unsigned m2) {
  const BigUint cap1 = BigUint(1) << m1;
  auto divisors_of = [&](std::size_t lo, std::size_t hi) {
    std::vector<BigUint> out{1};
    for (std::size_t i = lo; i < hi; ++i) {
      std::size_t base = out.size();
      BigUint pe = 1;
      for (unsigned e = 0; e < pf[i].second; ++e) {
        pe *= pf[i].first;
        if (pe > cap1) break;
        for (std::size_t j = 0; j < base; ++j) {
          BigUint d = out[j] * pe;
          if (d <= cap1) out.push_back(d);
        }
      }
    }
    return out;
  };
  std::size_t mid = pf.size() / 2;
  std::vector<BigUint> left = divisors_of(0, mid);
  std::vector<BigUint> right = divisors_of(mid, pf.size());
  std::sort(right.begin(), right.end());
  for (const BigUint& a : left) {
    // need b with a*b <= 2^m1 and a*b*2^m2 >= value
    BigUint hi = cap1 / a;
    BigUint lo = (value + (a << m2) - 1) / (a << m2);  // ceil(value / (a*2^m2))
    auto it = std::lower_bound(right.begin(), right.end(), lo);
    if (it != right.end() && *it <= hi) return true;
  }
  return false;
}

}  // namespace

bool splits_within(u64 value, const std::vector<u64>& prime_factors, unsigned m1, unsigned m2) {
  if (m1 > 64 || m2 > 64) throw std::invalid_argument("splits_within: bounds must be <= 64");
  if (value == 0) return false;
  if (value == 1) return true;  // 1 * 1
  std::vector<std::pair<u64, unsigned>> pf;
  for (u64 p : prime_factors) {
    if (!pf.empty() && pf.back().first == p) {
      ++pf.back().second;
    } else {
      pf.emplace_back(p, 1);
    }
  }
  u128 cap1 = u128(1) << m1;
  return divisor_dfs<u128, u64>(pf, 0, 1, cap1, value, m2);
}

bool splits_within(const BigUint& value,
                   const std::vector<std::pair<BigUint, unsigned>>& factorization, unsigned m1,
                   unsigned m2) {
  if (value == 0) return false;
  if (value == 1) return true;
  if (factorization.size() > 20) return divisor_mitm(factorization, value, m1, m2);
  BigUint cap1 = BigUint(1) << m1;
  return divisor_dfs<BigUint, BigUint>(factorization, 0, BigUint(1), cap1, value, m2);
}

SplitEstimate split_probability(unsigned bit_length, unsigned m1, unsigned m2, u64 samples,
                                RandomSource& rng, const SplitOptions& opts) {
  if (bit_length == 0 || bit_length > 128) {
    throw std::invalid_argument("split_probability: bit_length must be 1..128");
  }
  if (samples < 100) throw std::invalid_argument("split_probability: need at least 100 samples");

  SplitEstimate est;
  est.bit_length = bit_length;
  est.m1 = m1;
  est.m2 = m2;
  est.samples = samples;

  // Per-sample generators derived from one base seed keep the estimate
  // identical for any worker count.
  const u64 base_seed = rng();

  auto run_sample = [&](u64 index, u64& successes, u64& skipped) {
    RandomSource sample_rng(mix64(base_seed + index));
    if (bit_length <= 64) {
      u64 mask = bit_length == 64 ? ~u64(0) : (u64(1) << bit_length) - 1;
      u64 value = sample_rng() & mask;
      if (value == 0) return;
      successes += splits_within(value, numtheory::factorize_u64(value), m1, m2) ? 1 : 0;
    } else {
      BigUint value = numtheory::random_bits(sample_rng, bit_length);
      if (value == 0) return;
      numtheory::FactorOptions fopts;
      fopts.budget = opts.per_sample_budget;
      fopts.exec = Exec::serial;  // parallelism lives at the sample level
      try {
        auto f = numtheory::factorize(value, fopts);
        successes += splits_within(value, f.factors, m1, m2) ? 1 : 0;
      } catch (const numtheory::BudgetExhausted&) {
        ++skipped;
      }
    }
  };

  u64 successes = 0, skipped = 0;
  if (opts.exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : successes, skipped)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(samples); ++i) {
      run_sample(static_cast<u64>(i), successes, skipped);
    }
  } else {
    for (u64 i = 0; i < samples; ++i) run_sample(i, successes, skipped);
  }

  est.successes = successes;
  est.skipped = skipped;
  est.probability = static_cast<double>(successes) / static_cast<double>(samples);
  return est;
}

}  // namespace wuplab::attacks
