#pragma once

namespace stokeshape {

// Execution policy for assembly-style loops.  Parallel uses OpenMP with
// per-thread accumulation and a deterministic merge; Serial is the reference
// implementation the parallel path is tested against.
enum class Policy { Serial, Parallel };

// Number of threads the Parallel policy will use (1 when OpenMP is absent).
int max_threads();

}  // namespace stokeshape
