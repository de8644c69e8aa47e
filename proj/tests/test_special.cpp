#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "graphent/rng.hpp"
#include "graphent/special.hpp"

using graphent::special::beta_quantile;
using graphent::special::betainc;
using graphent::special::log_beta;

TEST_CASE("log_beta closed forms") {
  CHECK(log_beta(1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-14));
  // B(2,3) = 1!2!/4! = 1/12
  CHECK(log_beta(2.0, 3.0) ==
        doctest::Approx(-std::log(12.0)).epsilon(1e-14));
  // B(1/2,1/2) = pi
  CHECK(log_beta(0.5, 0.5) ==
        doctest::Approx(std::log(std::acos(-1.0))).epsilon(1e-14));
  CHECK(log_beta(3.7, 1.2) == log_beta(1.2, 3.7));
}

TEST_CASE("betainc boundaries and domain") {
  CHECK(betainc(0.0, 2.0, 3.0) == 0.0);
  CHECK(betainc(1.0, 2.0, 3.0) == 1.0);
  CHECK_THROWS_AS(betainc(-0.1, 2.0, 3.0), std::domain_error);
  CHECK_THROWS_AS(betainc(1.1, 2.0, 3.0), std::domain_error);
  CHECK_THROWS_AS(betainc(0.5, 0.0, 3.0), std::domain_error);
  CHECK_THROWS_AS(betainc(0.5, 2.0, -1.0), std::domain_error);
}

TEST_CASE("betainc against closed forms") {
  // I_x(2,3) = 1 - (1-x)^3 (1+3x); at x = 0.3 this is exactly 0.3483
  CHECK(betainc(0.3, 2.0, 3.0) == doctest::Approx(0.3483).epsilon(1e-13));
  // I_x(1,1) = x
  for (double x : {0.1, 0.25, 0.5, 0.9})
    CHECK(betainc(x, 1.0, 1.0) == doctest::Approx(x).epsilon(1e-14));
  // I_x(5,1) = x^5
  CHECK(betainc(0.7, 5.0, 1.0) ==
        doctest::Approx(std::pow(0.7, 5)).epsilon(1e-13));
  // arcsine law: I_x(1/2,1/2) = (2/pi) asin(sqrt(x)); at x = 1/4 this is 1/3
  CHECK(betainc(0.25, 0.5, 0.5) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  // symmetric cases pass through 1/2 at x = 1/2
  CHECK(betainc(0.5, 4.0, 4.0) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("beta_quantile boundaries, median, domain") {
  CHECK(beta_quantile(0.0, 2.0, 5.0) == 0.0);
  CHECK(beta_quantile(1.0, 2.0, 5.0) == 1.0);
  CHECK(beta_quantile(0.5, 3.0, 3.0) == 0.5);
  CHECK_THROWS_AS(beta_quantile(-0.01, 2.0, 2.0), std::domain_error);
  CHECK_THROWS_AS(beta_quantile(1.01, 2.0, 2.0), std::domain_error);
  CHECK_THROWS_AS(beta_quantile(0.5, 0.0, 2.0), std::domain_error);
}

TEST_CASE("beta_quantile closed-form anchors") {
  // Beta(2,2): I_x = x^2 (3 - 2x); solving I_q = 3/4
  CHECK(beta_quantile(0.75, 2.0, 2.0) ==
        doctest::Approx(0.6736481776669303).epsilon(1e-10));
  // arcsine quantile: sin^2(pi p / 2)
  CHECK(beta_quantile(0.3, 0.5, 0.5) ==
        doctest::Approx(0.20610737385376344).epsilon(1e-10));
  // Beta(5,1): quantile p^(1/5)
  CHECK(beta_quantile(0.2, 5.0, 1.0) ==
        doctest::Approx(0.7247796636776955).epsilon(1e-10));
  // Beta(1,1): identity
  for (double p : {0.05, 0.3, 0.77, 0.999})
    CHECK(beta_quantile(p, 1.0, 1.0) == doctest::Approx(p).epsilon(1e-12));
}

TEST_CASE("beta_quantile forward residual below 1e-12") {
  graphent::rng::Stream rs(20260822ULL);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = 0.5 + 9.5 * rs.next_double();
    const double b = 0.5 + 9.5 * rs.next_double();
    const double p = rs.next_double();
    const double q = beta_quantile(p, a, b);
    CHECK(std::fabs(betainc(q, a, b) - p) < 1e-12);
  }
}

TEST_CASE("beta_quantile round trip and monotonicity") {
  for (double a : {0.7, 1.0, 3.0, 8.0}) {
    for (double b : {0.7, 2.0, 5.0}) {
      double prev = -1.0;
      for (int i = 1; i < 40; ++i) {
        const double p = i / 40.0;
        const double q = beta_quantile(p, a, b);
        CHECK(q > prev);  // strictly increasing in p
        prev = q;
        const double back = beta_quantile(betainc(q, a, b), a, b);
        CHECK(std::fabs(back - q) < 1e-10);
      }
    }
  }
}
