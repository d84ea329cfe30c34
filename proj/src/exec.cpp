#include "wuplab/exec.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wuplab {

int hardware_workers() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace wuplab
