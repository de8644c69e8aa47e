#pragma once

#include <string>
#include <vector>

// Graphon representations and the entropy functional.
//
// A spec holds rho_n (the sparsity scale) together with one of five shapes
// for the base function f; edge probabilities are rho_n * f(x,y).  Grid-based
// shapes interpolate bilinearly between lattice nodes, which keeps the
// per-cell maximum at the lattice nodes and makes the probability bound
// rho_n * max f <= 1 exactly checkable at construction.

namespace graphent {

enum class GraphonKind { constant, separable, block_constant, low_rank, analytic_grid };

struct GraphonSpec {
  GraphonKind kind = GraphonKind::constant;
  double rho_n = 1.0;

  double constant_level = 0.0;                       // constant
  std::vector<double> g_values;                      // separable factor on a uniform grid
  std::vector<std::vector<double>> theta;            // block-constant
  std::vector<double> block_fractions;               //   with these block widths
  std::vector<double> lambdas;                       // low-rank weights
  std::vector<std::vector<double>> component_grids;  //   and component factors
  std::vector<std::vector<double>> grid;             // sampled f on a uniform lattice
  double holder_exponent = 1.0;                      // smoothness metadata for grids

  std::string id;  // short label carried into CSV outputs

  // Maximum of f over [0,1]^2 (exact: every supported shape is piecewise
  // bilinear, so the maximum sits on a lattice node).
  double max_f() const;

  // Validating factories; each throws std::domain_error when an invariant
  // fails (asymmetric theta, fractions not summing to 1, rho*max f > 1, ...).
  static GraphonSpec constant(double level, double rho = 1.0);
  static GraphonSpec separable(std::vector<double> g, double rho = 1.0);
  static GraphonSpec block(std::vector<std::vector<double>> theta,
                           std::vector<double> fractions, double rho = 1.0);
  static GraphonSpec low_rank(std::vector<double> lambdas,
                              std::vector<std::vector<double>> comps,
                              double rho = 1.0);
  static GraphonSpec analytic_grid(std::vector<std::vector<double>> grid,
                                   double rho = 1.0, double holder = 1.0);
};

// h(x) = -x log x - (1-x) log(1-x), nats; h(0) = h(1) = 0 by continuity.
// Throws std::domain_error outside [0,1].
double binary_entropy(double x);

// rho_n * f(x,y); symmetric in (x,y) exactly.
double eval_graphon(const GraphonSpec& spec, double x, double y);

// Entropy of the sampled-edge distribution: integral of h(rho_n f) over the
// unit square.  Block-constant specs use the closed form; everything else is
// a tensor midpoint rule with quad_points^2 evaluations (quad_points >= 2).
double graphon_entropy(const GraphonSpec& spec, int quad_points = 2048);

// The generic quadrature path regardless of kind (oracle hook for tests).
double graphon_entropy_quadrature(const GraphonSpec& spec, int quad_points);

// Closed-form entropy of a block model with integer block sizes:
// sum over the full (a,b) grid of (h_a h_b / n^2) h(theta_ab).
double block_entropy(const std::vector<std::vector<double>>& theta,
                     const std::vector<long long>& block_sizes, long long n);

// The product test graphon 4xy, sampled on a lattice (bilinear interpolation
// reproduces it exactly for any lattice size).
GraphonSpec make_f1(double rho = 0.25, int m = 129);

// Non-separable test graphon with a flat marginal:
//   f2(x,y) = a0 + 4 a1 Q(x)Q(y) + 4 a1 (1-Q(x))(1-Q(y)),
// Q the Beta(alpha1, alpha1) quantile, so that the marginal integrates to
// a0 + 2 a1 for every x.
GraphonSpec make_f2(double a0 = 0.25, double a1 = 0.15, double alpha1 = 3.0,
                    double rho = 1.0, int m = 1024);

// Plain-text key=value config round trip.  Grammar: kind=..., rho=...,
// level=..., g=v,v,..., theta=row;row, fractions=..., lambdas=...,
// component=v,v,... (repeatable), grid_file=<matrix path>, a0/a1/alpha1/m
// for the built-in f2, id=... .  Grid matrices are written next to the
// config as "<path>.grid".
GraphonSpec load_graphon_config(const std::string& path);
void save_graphon_config(const GraphonSpec& spec, const std::string& path);

}  // namespace graphent
