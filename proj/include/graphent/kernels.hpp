#pragma once

#include <cstddef>

// Data-parallel inner loops shared by the entropy estimators and the
// quadrature engine: binary-entropy sums over probability buffers, plain
// reductions, and dot products.  Two implementations exist, a scalar
// reference and an AVX2 variant, selected once at startup by cpuid (override
// with the GRAPHENT_KERNELS environment variable or force()).
//
// Every kernel is pure and uses a fixed reduction tree, so repeated calls on
// the same buffer give bit-identical results regardless of thread schedule.
// Variants may differ from each other by a few ulp per element, never more;
// the test suite pins the equivalence bound.

namespace graphent::kernels {

struct KernelOps {
  const char* name;

  // Sum of h(p_i) where h(x) = -x log x - (1-x) log(1-x) in nats.
  // eps > 0 clips p into [eps, 1-eps] first; eps == 0 evaluates the
  // continuity limit h(0) = h(1) = 0 exactly.
  double (*entropy_sum)(const double* p, std::size_t n, double eps);

  // Same transform written per element instead of reduced.
  void (*entropy_map)(const double* p, double* out, std::size_t n, double eps);

  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
};

const KernelOps& scalar_ops();

// Valid to call only when cpu_has_avx2() reports true; on non-x86 builds the
// table aliases the scalar implementation.
const KernelOps& avx2_ops();

bool cpu_has_avx2();

// Table picked by detection plus any GRAPHENT_KERNELS override.
const KernelOps& active();

// Select "scalar", "avx2" or "auto"; returns false (and leaves the selection
// alone) if the variant is unavailable on this machine.
bool force(const char* which);

}  // namespace graphent::kernels
