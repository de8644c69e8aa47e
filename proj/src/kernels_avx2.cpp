#include "graphent/kernels.hpp"

#include <cmath>

// AVX2 + FMA implementations.  This translation unit is compiled with
// -mavx2 -mfma on x86; callers must check cpu_has_avx2() before routing
// work here.  On other architectures the table aliases the scalar one.

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace graphent::kernels {
namespace {

constexpr std::size_t kBase = 256;

// ---------------------------------------------------------------------------
// Vector log, natural base, for strictly positive normal inputs.
// Reduction x = 2^k * m with m in (sqrt(1/2), sqrt(2)], then the classical
// rational approximation of log(1+f) around f = m-1.  Matches libm to a
// couple of ulp on (0,1], which is all the entropy kernels feed it.
// ---------------------------------------------------------------------------

inline __m256d vlog(__m256d x) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d sqrt2 = _mm256_set1_pd(1.41421356237309514547462185873883);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d lg1 = _mm256_set1_pd(6.666666666666735130e-01);
  const __m256d lg2 = _mm256_set1_pd(3.999999999940941908e-01);
  const __m256d lg3 = _mm256_set1_pd(2.857142874366239149e-01);
  const __m256d lg4 = _mm256_set1_pd(2.222219843214978396e-01);
  const __m256d lg5 = _mm256_set1_pd(1.818357216161805012e-01);
  const __m256d lg6 = _mm256_set1_pd(1.531383769920937332e-01);
  const __m256d lg7 = _mm256_set1_pd(1.479819860511658591e-01);

  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_exp = _mm256_set1_epi64x(0x3FF0000000000000LL);
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_exp));

  // Exponent as a double via the 2^52 bias trick (values are tiny ints).
  const __m256i expo = _mm256_and_si256(_mm256_srli_epi64(bits, 52),
                                        _mm256_set1_epi64x(0x7FF));
  const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
  __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(expo, magic)),
                            _mm256_set1_pd(4503599627370496.0));
  e = _mm256_sub_pd(e, _mm256_set1_pd(1023.0));

  const __m256d shrink = _mm256_cmp_pd(m, sqrt2, _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, half), shrink);
  e = _mm256_blendv_pd(e, _mm256_add_pd(e, one), shrink);

  const __m256d f = _mm256_sub_pd(m, one);
  const __m256d s = _mm256_div_pd(f, _mm256_add_pd(two, f));
  const __m256d z = _mm256_mul_pd(s, s);
  const __m256d w = _mm256_mul_pd(z, z);
  const __m256d t1 =
      _mm256_mul_pd(w, _mm256_fmadd_pd(w, _mm256_fmadd_pd(w, lg6, lg4), lg2));
  const __m256d t2 = _mm256_mul_pd(
      z, _mm256_fmadd_pd(
             w, _mm256_fmadd_pd(w, _mm256_fmadd_pd(w, lg7, lg5), lg3), lg1));
  const __m256d r = _mm256_add_pd(t1, t2);
  const __m256d hfsq = _mm256_mul_pd(half, _mm256_mul_pd(f, f));

  const __m256d inner =
      _mm256_fmadd_pd(s, _mm256_add_pd(hfsq, r), _mm256_mul_pd(e, ln2_lo));
  const __m256d tmp = _mm256_sub_pd(_mm256_sub_pd(hfsq, inner), f);
  return _mm256_sub_pd(_mm256_mul_pd(e, ln2_hi), tmp);
}

// h(p) for a lane vector; eps == 0 takes the masked continuity path.
inline __m256d ventropy(__m256d p, double eps) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  if (eps > 0.0) {
    const __m256d lo = _mm256_set1_pd(eps);
    const __m256d hi = _mm256_set1_pd(1.0 - eps);
    p = _mm256_min_pd(_mm256_max_pd(p, lo), hi);
    const __m256d q = _mm256_sub_pd(one, p);
    const __m256d t = _mm256_fmadd_pd(p, vlog(p), _mm256_mul_pd(q, vlog(q)));
    return _mm256_sub_pd(zero, t);
  }
  const __m256d q = _mm256_sub_pd(one, p);
  const __m256d mp = _mm256_cmp_pd(p, zero, _CMP_GT_OQ);
  const __m256d mq = _mm256_cmp_pd(q, zero, _CMP_GT_OQ);
  const __m256d sp = _mm256_blendv_pd(one, p, mp);  // log(1) = 0 on dead lanes
  const __m256d sq = _mm256_blendv_pd(one, q, mq);
  const __m256d t = _mm256_fmadd_pd(p, vlog(sp), _mm256_mul_pd(q, vlog(sq)));
  return _mm256_sub_pd(zero, t);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double h_term_tail(double x, double eps) {
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

double entropy_block(const double* p, std::size_t n, double eps) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, ventropy(_mm256_loadu_pd(p + i), eps));
    acc1 = _mm256_add_pd(acc1, ventropy(_mm256_loadu_pd(p + i + 4), eps));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += h_term_tail(p[i], eps);
  return acc;
}

double entropy_sum_impl(const double* p, std::size_t n, double eps) {
  if (n <= kBase) return entropy_block(p, n, eps);
  const std::size_t half = n / 2;
  return entropy_sum_impl(p, half, eps) + entropy_sum_impl(p + half, n - half, eps);
}

void entropy_map_impl(const double* p, double* out, std::size_t n, double eps) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, ventropy(_mm256_loadu_pd(p + i), eps));
  for (; i < n; ++i) out[i] = h_term_tail(p[i], eps);
}

double sum_block(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i];
  return acc;
}

double sum_impl(const double* x, std::size_t n) {
  if (n <= kBase) return sum_block(x, n);
  const std::size_t half = n / 2;
  return sum_impl(x, half) + sum_impl(x + half, n - half);
}

double dot_block(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double dot_impl(const double* x, const double* y, std::size_t n) {
  if (n <= kBase) return dot_block(x, y, n);
  const std::size_t half = n / 2;
  return dot_impl(x, y, half) + dot_impl(x + half, y + half, n - half);
}

}  // namespace

const KernelOps& avx2_ops() {
  static const KernelOps ops = {
      "avx2",
      &entropy_sum_impl,
      &entropy_map_impl,
      &sum_impl,
      &dot_impl,
  };
  return ops;
}

}  // namespace graphent::kernels

#else  // non-x86 build: keep the symbol, alias the reference implementation

namespace graphent::kernels {
const KernelOps& avx2_ops() { return scalar_ops(); }
}  // namespace graphent::kernels

#endif
