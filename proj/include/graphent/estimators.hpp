#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graphent/blockfit.hpp"
#include "graphent/graph.hpp"

// Entropy estimators for a graph drawn from an exchangeable random graph
// model, from coarsest to finest working assumption:
//
//   H1  constant level        h(rho_hat)
//   H2  separable (product)   degree-based plug-in
//   H3  block model           fitted k-block histogram
//   H4  low rank              spectral thresholding of the adjacency matrix
//
// All values are in nats.  H1, H2 and H3 also carry an asymptotic variance;
// H4 has no usable variance formula, so its variance field stays empty.

namespace graphent::estimators {

struct EntropyEstimate {
  std::string estimator_id;  // "H1", "H2", "H3" or "H4"
  double value = 0.0;
  std::optional<double> variance;  // asymptotic, where a formula exists
  int n = 0;
  double rho_hat = 0.0;
};

// CSV row "estimator,n,rho_hat,value,variance"; the variance column is left
// empty when no formula applies.
std::string csv_row(const EntropyEstimate& e);
std::string csv_header();

// Degree sequence plus the normalized degree function it induces.
struct DegreeData {
  std::vector<int> d;      // degrees
  long long d_norm1 = 0;   // sum of degrees = twice the edge count
  std::vector<double> g_hat;
};

// Two ways of scaling degrees into g_hat = C * d:
//   paper          C = (n+1)/sqrt(|d|_1)
//   configuration  C = sqrt(n(n-1))/|d|_1, so that rho_hat g_i g_j equals
//                  d_i d_j / |d|_1, the configuration-model edge probability
// `paper` can push rho_hat*g_i*g_j past 1 on dense graphs, so
// `configuration` is the default everywhere.
enum class GhatNorm { paper, configuration };

// Edge count over C(n,2).  Throws on n < 2.
double estimate_rho(const Graph& a);

// H1: binary entropy of the edge density with its delta-method variance
// [log((1-r)/r)]^2 r(1-r)/C(n,2); at r in {0,1} both value and variance
// are exactly 0.
EntropyEstimate entropy_constant(const Graph& a);

// Degrees and g_hat under the chosen normalization.  Throws a
// degenerate_input_error on a graph with no edges.
DegreeData compute_g_hat(const Graph& a, GhatNorm norm = GhatNorm::configuration);

// H2: mean over unordered pairs of h(clip(rho_hat g_i g_j)), arguments
// clipped into [1e-12, 1-1e-12].  Variance from separable_variance.
EntropyEstimate entropy_separable(const Graph& a,
                                  GhatNorm norm = GhatNorm::configuration);

// Asymptotic variance of H2: (2(n-2) zeta1 + zeta2) / C(n,2) where, with
// ht(u,v) = h(clip(rho_hat g_u g_v)), zeta1 is the population variance of
// the row means of ht and zeta2 the population variance of ht itself, both
// over the full n x n grid.  Returns 0 when rho_hat is 0.
double separable_variance(const DegreeData& dd, double rho_hat, int n);

struct BlockOptions {
  int restarts = 3;
  std::uint64_t seed = 0;
  // When set, skip label fitting and take block averages at these labels
  // (the conditional-on-assignment regime).  Must have one label in [0,k)
  // per node.
  const std::vector<int>* fixed_labels = nullptr;
};

// H3: fit a k-block model (k = 0 picks round(sqrt(n))) and return the
// entropy of the fitted block histogram together with the fit itself.
std::pair<EntropyEstimate, blockfit::BlockFit> entropy_blockmodel(
    const Graph& a, int k = 0, const BlockOptions& opt = {});

// Delta-method variance of the fitted block entropy: with cell weights
// w_ab = (2 - [a==b]) h_a h_b / n^2 over cells a <= b,
//   sum of w_ab^2 [log((1-t)/t)]^2 t(1-t) / pair_count_ab   at t = theta_ab.
// Cells with no pairs or with t in {0,1} contribute 0.
double blockmodel_variance(const blockfit::BlockFit& fit, long long n);

// Dense symmetric matrix, row major.
struct DenseMatrix {
  int n = 0;
  std::vector<double> v;

  DenseMatrix() = default;
  explicit DenseMatrix(int nn) : n(nn), v(static_cast<std::size_t>(nn) * nn, 0.0) {}
  double operator()(int i, int j) const {
    return v[static_cast<std::size_t>(i) * n + j];
  }
  double& operator()(int i, int j) {
    return v[static_cast<std::size_t>(i) * n + j];
  }
};

// Universal singular value thresholding of the adjacency matrix: keep the
// spectral components with |eigenvalue| > (2+eta) sqrt(n max(rho_hat, 1/n)),
// reconstruct, clip entries into [0,1], average with the transpose and zero
// the diagonal.  Throws a numerical_error with iteration diagnostics if the
// eigensolver fails to converge within 10n iterations.
DenseMatrix usvt(const Graph& a, double eta = 0.01);

// H4: mean of h over all n^2 entries of the USVT matrix (the zero diagonal
// contributes h(0) = 0).
EntropyEstimate entropy_lowrank(const Graph& a, double eta = 0.01);

}  // namespace graphent::estimators
