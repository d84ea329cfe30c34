#include "wuplab/attacks/factor_modulus.hpp"

#include "wuplab/numtheory.hpp"

namespace wuplab::attacks {

numtheory::Factorization factor_modulus(const numtheory::BigUint& n,
                                        const numtheory::FactorOptions& opts) {
  if (n < 4 || numtheory::is_probable_prime(n)) throw NotComposite();
  return numtheory::factorize(n, opts);
}

}  // namespace wuplab::attacks
