#include "graphent/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace graphent::special {
namespace {

// Continued fraction for the incomplete beta, modified Lentz scheme.
double betacf(double x, double a, double b) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  return h;  // converged to working precision in practice well before this
}

}  // namespace

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double betainc(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("betainc: shape parameters must be positive");
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("betainc: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front =
      std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(x, a, b) / a;
  return 1.0 - front * betacf(1.0 - x, b, a) / b;
}

double beta_quantile(double p, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("beta_quantile: shape parameters must be positive");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::domain_error("beta_quantile: p outside [0,1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  if (a == b && p == 0.5) return 0.5;  // symmetric median

  double lo = 0.0, hi = 1.0;
  double x = a / (a + b);  // start at the mean
  const double lb = log_beta(a, b);
  for (int it = 0; it < 200; ++it) {
    const double f = betainc(x, a, b) - p;
    if (f > 0.0)
      hi = x;
    else
      lo = x;
    if (std::fabs(f) < 1e-15) break;
    const double logpdf = (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - lb;
    double step = f * std::exp(-logpdf);  // Newton: f / pdf
    double xn = x - step;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);  // bisect when outside
    if (std::fabs(xn - x) < 1e-17 * (1.0 + std::fabs(x)) && std::fabs(f) < 1e-12)
      break;
    x = xn;
    if (x <= 0.0) x = std::numeric_limits<double>::min();
    if (x >= 1.0) x = 1.0 - 1e-16;
  }
  return x;
}

}  // namespace graphent::special
