#include "graphent/kernels.hpp"

#include <cmath>

namespace graphent::kernels {
namespace {

// Base-case length for the pairwise reduction trees.  Keeping the tree shape
// a function of n alone (never of data or schedule) makes every reduction
// reproducible bit for bit.
constexpr std::size_t kBase = 256;

inline double h_term(double x, double eps) {
  if (eps > 0.0) {
    if (x < eps) x = eps;
    const double hi = 1.0 - eps;
    if (x > hi) x = hi;
    return -x * std::log(x) - (1.0 - x) * std::log1p(-x);
  }
  double acc = 0.0;
  if (x > 0.0) acc -= x * std::log(x);
  const double y = 1.0 - x;
  if (y > 0.0) acc -= y * std::log(y);
  return acc;
}

double entropy_sum_impl(const double* p, std::size_t n, double eps) {
  if (n <= kBase) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += h_term(p[i], eps);
    return acc;
  }
  const std::size_t half = n / 2;
  return entropy_sum_impl(p, half, eps) + entropy_sum_impl(p + half, n - half, eps);
}

void entropy_map_impl(const double* p, double* out, std::size_t n, double eps) {
  for (std::size_t i = 0; i < n; ++i) out[i] = h_term(p[i], eps);
}

double sum_impl(const double* x, std::size_t n) {
  if (n <= kBase) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
  }
  const std::size_t half = n / 2;
  return sum_impl(x, half) + sum_impl(x + half, n - half);
}

double dot_impl(const double* x, const double* y, std::size_t n) {
  if (n <= kBase) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
  }
  const std::size_t half = n / 2;
  return dot_impl(x, y, half) + dot_impl(x + half, y + half, n - half);
}

}  // namespace

const KernelOps& scalar_ops() {
  static const KernelOps ops = {
      "scalar",
      &entropy_sum_impl,
      &entropy_map_impl,
      &sum_impl,
      &dot_impl,
  };
  return ops;
}

}  // namespace graphent::kernels
