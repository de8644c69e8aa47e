#pragma once

// Regularized incomplete beta function and its inverse.  The inverse is the
// quantile of the Beta(a,b) distribution, needed to build test graphons with
// prescribed flat marginals.

namespace graphent::special {

double log_beta(double a, double b);

// Regularized incomplete beta I_x(a,b), continued-fraction evaluation.
// Domain: x in [0,1], a > 0, b > 0.
double betainc(double x, double a, double b);

// Inverse of betainc in x: returns q with I_q(a,b) = p to within 1e-12,
// by Newton iteration safeguarded with bisection.  Monotone in p.
double beta_quantile(double p, double a, double b);

}  // namespace graphent::special
