// Times each OpenMP kernel against its serial reference on fixed workloads.
// Build and run: cmake --build build && ./build/bench/wuplab_bench

#include <chrono>
#include <cstdio>
#include <functional>

#include "wuplab/attacks/mitm.hpp"
#include "wuplab/attacks/prng_attack.hpp"
#include "wuplab/exec.hpp"
#include "wuplab/factoring.hpp"
#include "wuplab/numtheory.hpp"
#include "wuplab/rsa.hpp"

using namespace wuplab;
using numtheory::BigUint;
using numtheory::RandomSource;

namespace {

double time_ms(const std::function<void()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-22s serial %9.1f ms   parallel %9.1f ms   speedup %.2fx\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main() {
  std::printf("workers: %d\n\n", hardware_workers());

  {  // PRNG seed search, victim key 29 seconds in the past
    const std::int64_t observed_at = 1'650'000'000'000;
    auto victim = victim_prng::keygen_v65(observed_at - 29000);
    attacks::KeyCheck check = [&](const victim_prng::SessionKey& k) { return k == victim; };
    double s = time_ms([&] { attacks::seed_search(check, observed_at, 35000, Exec::serial); });
    double p = time_ms([&] { attacks::seed_search(check, observed_at, 35000, Exec::parallel); });
    report("seed-search", s, p);
  }

  {  // split-probability sampling, one table row at reduced sample count
    attacks::SplitOptions serial{.exec = Exec::serial};
    attacks::SplitOptions parallel{.exec = Exec::parallel};
    RandomSource ra(1), rb(1);
    double s = time_ms([&] { attacks::split_probability(64, 32, 32, 1500, ra, serial); });
    double p = time_ms([&] { attacks::split_probability(64, 32, 32, 1500, rb, parallel); });
    report("split-probability", s, p);
  }

  {  // meet-in-the-middle table, 2^12 modular exponentiations at 1024 bits
    RandomSource rng(2);
    rsa::RsaKeyPair kp = rsa::keygen(1024, 65537, rng);
    double s = time_ms([&] { attacks::mitm_build_table(kp.pub, 12, Exec::serial); });
    double p = time_ms([&] { attacks::mitm_build_table(kp.pub, 12, Exec::parallel); });
    report("mitm-table-build", s, p);
  }

  {  // Pollard-Brent rho on a 96-bit semiprime (the 128-bit engine)
    RandomSource rng(3);
    BigUint n = numtheory::gen_prime(48, rng) * numtheory::gen_prime(48, rng);
    numtheory::FactorOptions serial{.exec = Exec::serial};
    numtheory::FactorOptions parallel{.exec = Exec::parallel};
    double s = time_ms([&] { numtheory::factorize(n, serial); });
    double p = time_ms([&] { numtheory::factorize(n, parallel); });
    report("rho-semiprime-96", s, p);
  }

  return 0;
}
