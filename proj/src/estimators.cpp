#include "graphent/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "graphent/errors.hpp"
#include "graphent/graphon.hpp"
#include "graphent/kernels.hpp"

namespace graphent::estimators {
namespace {

constexpr double kClipEps = 1e-12;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double pair_count(long long n) { return 0.5 * static_cast<double>(n) * (n - 1); }

}  // namespace

std::string csv_header() { return "estimator,n,rho_hat,value,variance"; }

std::string csv_row(const EntropyEstimate& e) {
  std::string row = e.estimator_id;
  row += ',';
  row += std::to_string(e.n);
  row += ',';
  row += fmt(e.rho_hat);
  row += ',';
  row += fmt(e.value);
  row += ',';
  if (e.variance) row += fmt(*e.variance);
  return row;
}

double estimate_rho(const Graph& a) {
  if (a.n() < 2) throw std::domain_error("estimate_rho: need at least 2 nodes");
  return static_cast<double>(a.edge_count()) / pair_count(a.n());
}

EntropyEstimate entropy_constant(const Graph& a) {
  EntropyEstimate e;
  e.estimator_id = "H1";
  e.n = a.n();
  e.rho_hat = estimate_rho(a);
  const double r = e.rho_hat;
  if (r <= 0.0 || r >= 1.0) {
    e.value = 0.0;
    e.variance = 0.0;
    return e;
  }
  e.value = binary_entropy(r);
  const double gp = std::log((1.0 - r) / r);
  e.variance = gp * gp * r * (1.0 - r) / pair_count(e.n);
  return e;
}

DegreeData compute_g_hat(const Graph& a, GhatNorm norm) {
  DegreeData dd;
  dd.d = a.degrees();
  dd.d_norm1 = 0;
  for (int deg : dd.d) dd.d_norm1 += deg;
  if (dd.d_norm1 == 0)
    throw degenerate_input_error("compute_g_hat: graph has no edges");
  const double n = static_cast<double>(a.n());
  const double norm1 = static_cast<double>(dd.d_norm1);
  const double c = norm == GhatNorm::paper
                       ? (n + 1.0) / std::sqrt(norm1)
                       : std::sqrt(n * (n - 1.0)) / norm1;
  dd.g_hat.resize(dd.d.size());
  for (std::size_t i = 0; i < dd.d.size(); ++i)
    dd.g_hat[i] = c * static_cast<double>(dd.d[i]);
  return dd;
}

EntropyEstimate entropy_separable(const Graph& a, GhatNorm norm) {
  const int n = a.n();
  if (n < 2) throw std::domain_error("entropy_separable: need at least 2 nodes");
  const DegreeData dd = compute_g_hat(a, norm);
  const double rho = estimate_rho(a);
  const auto& ops = kernels::active();

  std::vector<double> buf(n), row_sums(n, 0.0);
  for (int i = 0; i + 1 < n; ++i) {
    const double gi = rho * dd.g_hat[i];
    const std::size_t cnt = static_cast<std::size_t>(n - 1 - i);
    for (int j = i + 1; j < n; ++j)
      buf[static_cast<std::size_t>(j - i - 1)] = gi * dd.g_hat[j];
    row_sums[i] = ops.entropy_sum(buf.data(), cnt, kClipEps);
  }

  EntropyEstimate e;
  e.estimator_id = "H2";
  e.n = n;
  e.rho_hat = rho;
  e.value = ops.sum(row_sums.data(), row_sums.size()) / pair_count(n);
  e.variance = separable_variance(dd, rho, n);
  return e;
}

double separable_variance(const DegreeData& dd, double rho_hat, int n) {
  if (static_cast<int>(dd.g_hat.size()) != n)
    throw std::domain_error("separable_variance: g_hat size mismatch");
  if (n < 3 || rho_hat <= 0.0 || dd.d_norm1 == 0) return 0.0;
  const auto& ops = kernels::active();
  const double nn = static_cast<double>(n);

  // ht(u,v) = h(clip(rho g_u g_v)) over the full n x n grid, diagonal
  // included.  Two passes: means first, then centered second moments.
  std::vector<double> p(n), ht(n), row_sums(n);
  auto fill_row = [&](int u) {
    const double gu = rho_hat * dd.g_hat[u];
    for (int v = 0; v < n; ++v) p[v] = gu * dd.g_hat[v];
    ops.entropy_map(p.data(), ht.data(), static_cast<std::size_t>(n), kClipEps);
  };
  for (int u = 0; u < n; ++u) {
    fill_row(u);
    row_sums[u] = ops.sum(ht.data(), static_cast<std::size_t>(n));
  }
  const double mean = ops.sum(row_sums.data(), row_sums.size()) / (nn * nn);

  std::vector<double> sq(n), row_sq(n);
  for (int u = 0; u < n; ++u) {
    fill_row(u);
    for (int v = 0; v < n; ++v) {
      const double d = ht[v] - mean;
      sq[v] = d * d;
    }
    row_sq[u] = ops.sum(sq.data(), static_cast<std::size_t>(n));
  }
  const double zeta2 = ops.sum(row_sq.data(), row_sq.size()) / (nn * nn);

  for (int u = 0; u < n; ++u) {
    const double d = row_sums[u] / nn - mean;
    sq[u] = d * d;
  }
  const double zeta1 = ops.sum(sq.data(), static_cast<std::size_t>(n)) / nn;

  const double var = (2.0 * (nn - 2.0) * zeta1 + zeta2) / pair_count(n);
  return std::max(0.0, var);
}

std::pair<EntropyEstimate, blockfit::BlockFit> entropy_blockmodel(
    const Graph& a, int k, const BlockOptions& opt) {
  const int n = a.n();
  if (k == 0) k = blockfit::default_k(n);
  if (k < 1 || k > n)
    throw std::domain_error("entropy_blockmodel: k must lie in [1, n]");

  blockfit::BlockFit fit;
  if (opt.fixed_labels != nullptr)
    fit = blockfit::theta_mle(a, *opt.fixed_labels, k);
  else
    fit = blockfit::fit_labels(a, k, opt.restarts, opt.seed);

  EntropyEstimate e;
  e.estimator_id = "H3";
  e.n = n;
  e.rho_hat = n >= 2 ? estimate_rho(a) : 0.0;
  e.value = block_entropy(fit.theta_hat, fit.block_sizes, n);
  e.variance = blockmodel_variance(fit, n);
  return {std::move(e), std::move(fit)};
}

double blockmodel_variance(const blockfit::BlockFit& fit, long long n) {
  if (n < 1) throw std::domain_error("blockmodel_variance: n must be positive");
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  double acc = 0.0;
  for (int a = 0; a < fit.k; ++a)
    for (int b = a; b < fit.k; ++b) {
      const long long pairs = fit.pair_counts[a][b];
      if (pairs <= 0) continue;
      const double t = fit.theta_hat[a][b];
      if (t <= 0.0 || t >= 1.0) continue;
      const double w = (a == b ? 1.0 : 2.0) *
                       static_cast<double>(fit.block_sizes[a]) *
                       static_cast<double>(fit.block_sizes[b]) / n2;
      const double gp = std::log((1.0 - t) / t);
      acc += w * w * gp * gp * t * (1.0 - t) / static_cast<double>(pairs);
    }
  return acc;
}

}  // namespace graphent::estimators
