// Compares the serial reference assembly against the OpenMP path: wall time
// per assembly and bitwise identity of the assembled operators.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "stokeshape/exec.hpp"
#include "stokeshape/stokes.hpp"

using namespace stokeshape;

namespace {

double time_assembly(const TaylorHoodSpace& space, const CoefficientFn& coef,
                     Policy policy, int reps, AssembledOperator& out) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    out = assemble_operator(space, coef, policy);
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

bool bitwise_equal(const SpMat& a, const SpMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() ||
      a.nonZeros() != b.nonZeros())
    return false;
  const auto nnz = a.nonZeros();
  return std::memcmp(a.valuePtr(), b.valuePtr(), nnz * sizeof(double)) == 0 &&
         std::memcmp(a.innerIndexPtr(), b.innerIndexPtr(),
                     nnz * sizeof(int)) == 0;
}

}  // namespace

int main(int argc, char** argv) {
  int n = argc > 1 ? std::atoi(argv[1]) : 96;
  int reps = argc > 2 ? std::atoi(argv[2]) : 5;
  if (n < 2 || reps < 1) {
    std::fprintf(stderr, "usage: bench_assembly [n] [reps]\n");
    return 2;
  }
#ifdef _OPENMP
  if (omp_get_max_threads() < 2) omp_set_num_threads(2);
#endif

  const TaylorHoodSpace space = build_space(build_mesh(n));
  const ControlGrid grid = make_uniform_grid(n);
  const ControlFunction q = make_preset(ControlPreset::Parabolic, grid, 1);
  const ProblemData data = default_channel_data();
  const CoefficientFn coef = state_coefficients(q, data);

  AssembledOperator serial_op, parallel_op;
  const double ts = time_assembly(space, coef, Policy::Serial, reps, serial_op);
  const double tp =
      time_assembly(space, coef, Policy::Parallel, reps, parallel_op);

  const bool same_a = bitwise_equal(serial_op.A, parallel_op.A);
  const bool same_b = bitwise_equal(serial_op.B, parallel_op.B);

  std::printf("mesh n=%d (%d triangles), %d threads, best of %d reps\n", n,
              2 * n * n, max_threads(), reps);
  std::printf("  serial   %8.1f ms\n", 1e3 * ts);
  std::printf("  parallel %8.1f ms  (speedup %.2fx)\n", 1e3 * tp, ts / tp);
  std::printf("  operators bitwise identical: %s\n",
              same_a && same_b ? "yes" : "NO");
  return same_a && same_b ? 0 : 1;
}
