#pragma once

namespace wuplab {

// Execution policy for the data-parallel kernels. Every parallel kernel has a
// serial twin that produces bit-identical results; tests compare the two and
// the bench target times them against each other.
enum class Exec { serial, parallel };

// Worker count the parallel kernels will fan out to (1 when OpenMP is absent).
int hardware_workers();

}  // namespace wuplab
