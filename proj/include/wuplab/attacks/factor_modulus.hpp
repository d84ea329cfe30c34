#pragma once

#include "wuplab/factoring.hpp"

namespace wuplab::attacks {

struct NotComposite : std::invalid_argument {
  NotComposite() : std::invalid_argument("factor_modulus: input is not composite") {}
};

// The modulus-factoring attack verb: refuses primes and trivial inputs, then
// defers to the number-theory engine.
numtheory::Factorization factor_modulus(const numtheory::BigUint& n,
                                        const numtheory::FactorOptions& opts = {});

}  // namespace wuplab::attacks
