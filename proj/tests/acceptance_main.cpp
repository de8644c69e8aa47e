// Acceptance checks for the graphon entropy toolkit.  Each check is an
// end-to-end statistical or numerical property of the shipped estimators,
// run under pinned seeds and tolerances.  One line is printed per check;
// the exit status is nonzero if any of them fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "graphent/blockfit.hpp"
#include "graphent/estimators.hpp"
#include "graphent/graph.hpp"
#include "graphent/graphon.hpp"
#include "graphent/rng.hpp"
#include "graphent/sampler.hpp"
#include "graphent/simharness.hpp"

using namespace graphent;

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double population_variance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double m2 = 0.0;
  for (double x : v) m2 += (x - mean) * (x - mean);
  return m2 / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// graph with deterministic labels and explicit cell probabilities
Graph sample_planted(const std::vector<std::vector<double>>& theta,
                     const std::vector<int>& z, std::uint64_t seed) {
  const int n = static_cast<int>(z.size());
  Graph g(n);
  rng::Stream rs(seed);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rs.next_double() < theta[z[i]][z[j]]) g.set_edge(i, j, true);
  return g;
}

// ---------------------------------------------------------------------------
// check 1: on a product-form graphon the degree-profile estimator beats the
// blockmodel fit, both beat the constant fit, and the constant fit's error
// is bias-dominated

bool check_error_ordering_product(std::string& detail) {
  simharness::BatchOptions opt;
  opt.threads = 1;
  const auto batches =
      simharness::run_batch(make_f1(), {"H1", "H2", "H3"}, 600, 100, 101ULL, opt);
  const auto& h1 = batches[0];
  const auto& h2 = batches[1];
  const auto& h3 = batches[2];

  const bool order = h2.rmse < h3.rmse && h3.rmse < h1.rmse;
  const bool bias_dominated = h1.bias2 >= 10.0 * h1.variance;
  detail = "rmse H2=" + fmt(h2.rmse) + " < H3=" + fmt(h3.rmse) +
           " < H1=" + fmt(h1.rmse) + "; H1 bias2/var=" +
           fmt(h1.bias2 / h1.variance);
  return order && bias_dominated;
}

// ---------------------------------------------------------------------------
// check 2: for a constant graphon the plug-in estimator is asymptotically
// normal with the stated delta-method variance

bool check_constant_normality(std::string& detail) {
  const double predicted = 3.3614686618843694e-6;  // level 0.3, n = 300
  const double level_entropy = 0.6108643020548935;

  simharness::BatchOptions opt;
  opt.threads = 1;
  const auto batches = simharness::run_batch(GraphonSpec::constant(0.3), {"H1"},
                                             300, 500, 202ULL, opt);
  const auto& b = batches[0];

  const double ratio = b.variance / predicted;
  const auto diag = simharness::clt_diagnostic(b.estimates);
  const double se = std::sqrt(predicted / 500.0);
  const double mean_gap = std::fabs(b.mean - level_entropy);

  detail = "var ratio=" + fmt(ratio) + ", ks p=" + fmt(diag.p_value) +
           ", |mean-h|=" + fmt(mean_gap) + " (3se=" + fmt(3.0 * se) + ")";
  return std::fabs(ratio - 1.0) <= 0.15 && diag.p_value > 0.01 &&
         mean_gap <= 3.0 * se;
}

// ---------------------------------------------------------------------------
// check 3: on a non-product graphon with a flat degree profile the blockmodel
// fit wins and the degree-profile estimator is bias-dominated relative to it

bool check_error_ordering_flat(std::string& detail) {
  simharness::BatchOptions opt;
  opt.threads = 1;
  const auto batches =
      simharness::run_batch(make_f2(), {"H1", "H2", "H3"}, 600, 100, 303ULL, opt);
  const auto& h1 = batches[0];
  const auto& h2 = batches[1];
  const auto& h3 = batches[2];

  const bool order = h3.rmse < std::min(h1.rmse, h2.rmse);
  const bool bias = h3.bias2 < h2.bias2;
  detail = "rmse H3=" + fmt(h3.rmse) + " vs H1=" + fmt(h1.rmse) +
           ", H2=" + fmt(h2.rmse) + "; bias2 H3=" + fmt(h3.bias2) +
           " < H2=" + fmt(h2.bias2);
  if (order && bias) return true;

  // The default parameters put so little weight on the non-product part that
  // the degree-profile estimator's error is smaller than the blockmodel fit's
  // own selection bias, so the expected ordering cannot appear. Report a
  // strongly non-product variant alongside the verdict for context.
  const auto strong = simharness::run_batch(make_f2(0.15, 0.2, 0.5, 1.0, 1024),
                                            {"H1", "H2", "H3"}, 600, 100,
                                            303ULL, opt);
  detail += "; diagnostic a0=0.15 a1=0.2 alpha1=0.5: rmse H3=" +
            fmt(strong[2].rmse) + " vs H1=" + fmt(strong[0].rmse) +
            ", H2=" + fmt(strong[1].rmse) +
            "; bias2 H3=" + fmt(strong[2].bias2) +
            " < H2=" + fmt(strong[1].bias2);
  return false;
}

// ---------------------------------------------------------------------------
// check 4: the blockmodel fit's normalized spread decays with graph size in
// both sampling regimes, at roughly the n^-1 rate on the dense side. Run on a
// balanced two-community graphon: its entropy is flat to first order in the
// community split, so the estimator's spread tracks edge-level noise at the
// 1/n rate instead of the 1/sqrt(n) latent rate of smooth graphons.

bool check_decay_with_size(std::string& detail) {
  const std::vector<int> ns = {200, 400, 600, 800, 1000};
  const auto spec =
      GraphonSpec::block({{0.8, 0.1}, {0.1, 0.8}}, {0.5, 0.5}, 0.25);
  simharness::BatchOptions opt;
  opt.threads = 1;

  opt.regime = Regime::dense;
  const auto dense = simharness::decay_sweep(spec, "H3", ns, 100, 404ULL, opt);
  opt.regime = Regime::sparse;
  const auto sparse = simharness::decay_sweep(spec, "H3", ns, 100, 404ULL, opt);

  bool decreasing = true;
  for (std::size_t i = 1; i < ns.size(); ++i) {
    if (dense[i].srmse_value >= dense[i - 1].srmse_value) decreasing = false;
    if (sparse[i].srmse_value >= sparse[i - 1].srmse_value) decreasing = false;
  }

  // least-squares slope of log srmse against log n on the dense side
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double x = std::log(static_cast<double>(ns[i]));
    const double y = std::log(dense[i].srmse_value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(ns.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);

  detail = "dense srmse " + fmt(dense.front().srmse_value) + " -> " +
           fmt(dense.back().srmse_value) + ", sparse " +
           fmt(sparse.front().srmse_value) + " -> " +
           fmt(sparse.back().srmse_value) + ", dense slope=" + fmt(slope);
  return decreasing && slope >= -1.4 && slope <= -0.6;
}

// ---------------------------------------------------------------------------
// check 5: the closed-form block entropy agrees with block-aligned midpoint
// quadrature to near machine precision on random block graphons

bool check_block_closed_form(std::string& detail) {
  rng::Stream rs(505ULL);
  double worst = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const int k = 1 + static_cast<int>(rs.next_below(8));
    std::vector<long long> sizes(k);
    long long total = 0;
    for (int a = 0; a < k; ++a) {
      sizes[a] = 1 + static_cast<long long>(rs.next_below(8));
      total += sizes[a];
    }
    std::vector<std::vector<double>> theta(k, std::vector<double>(k, 0.0));
    for (int a = 0; a < k; ++a)
      for (int b = a; b < k; ++b)
        theta[a][b] = theta[b][a] = rs.next_double();
    std::vector<double> fractions(k);
    for (int a = 0; a < k; ++a)
      fractions[a] = static_cast<double>(sizes[a]) / static_cast<double>(total);

    const double closed = block_entropy(theta, sizes, total);
    const auto spec = GraphonSpec::block(theta, fractions);
    // quadrature nodes at multiples of 1/(16 total) align with every block
    // boundary, so the midpoint rule is exact up to rounding
    const double quad =
        graphon_entropy_quadrature(spec, static_cast<int>(16 * total));
    worst = std::max(worst, std::fabs(closed - quad));
    if (std::fabs(closed - quad) >= 1e-10) break;

    // the dispatcher must agree with the closed form it claims to use
    if (std::fabs(graphon_entropy(spec) - closed) > 1e-14) {
      detail = "dispatcher disagrees with the closed form";
      return false;
    }
  }
  detail = "max |closed - quadrature| = " + fmt(worst) + " over 50 draws";
  return worst < 1e-10;
}

// ---------------------------------------------------------------------------
// check 6: fitted cell probabilities maximize the profile likelihood (grid
// search oracle), and the label fit finds the exact optimum on two cliques

bool check_likelihood_argmax(std::string& detail) {
  rng::Stream rs(606ULL);
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    Graph g(6);
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j)
        if (rs.next_double() < 0.5) g.set_edge(i, j, true);
    std::vector<int> z(6);
    for (int i = 0; i < 6; ++i) z[i] = static_cast<int>(rs.next_below(2));
    z[0] = 0;
    z[1] = 1;
    const auto fit = blockfit::theta_mle(g, z, 2);
    for (int a = 0; a < 2; ++a)
      for (int b = a; b < 2; ++b) {
        const long long pairs = fit.pair_counts[a][b];
        if (pairs == 0) continue;
        const long long mcount = fit.edge_counts[a][b];
        double best_t = 0.0, best_val = -1e300;
        for (int s = 0; s <= 200; ++s) {
          const double t = s / 200.0;
          double val = 0.0;
          if (mcount > 0) val += (t == 0.0 ? -1e300 : mcount * std::log(t));
          if (mcount < pairs)
            val += (t == 1.0 ? -1e300 : (pairs - mcount) * std::log1p(-t));
          if (val > best_val) {
            best_val = val;
            best_t = t;
          }
        }
        worst = std::max(worst, std::fabs(fit.theta_hat[a][b] - best_t));
      }
  }
  const bool grid_ok = worst <= 1.0 / 400.0 + 1e-12;

  // two disjoint 5-cliques: the fitted labels must match the planted split,
  // which an exhaustive scan confirms is the unique likelihood optimum
  Graph cliques(10);
  for (int i = 0; i < 10; ++i)
    for (int j = i + 1; j < 10; ++j)
      if ((i < 5) == (j < 5)) cliques.set_edge(i, j, true);
  const auto fit = blockfit::fit_labels(cliques, 2, 3, 607ULL);
  bool planted = fit.z[0] != fit.z[5];
  for (int i = 0; i < 10; ++i)
    if (fit.z[i] != fit.z[i < 5 ? 0 : 5]) planted = false;

  double best_ll = -1e300;
  int best_mask = 0;
  for (int mask = 1; mask < 1023; ++mask) {
    std::vector<int> z(10);
    for (int i = 0; i < 10; ++i) z[i] = (mask >> i) & 1;
    const double ll = blockfit::theta_mle(cliques, z, 2).log_likelihood;
    if (ll > best_ll) {
      best_ll = ll;
      best_mask = mask;
    }
  }
  const bool exhaustive_planted = best_mask == 0b1111100000 || best_mask == 0b0000011111;
  const bool ll_match = std::fabs(fit.log_likelihood - best_ll) <= 1e-12;

  detail = "max cell gap=" + fmt(worst) + " (grid step 0.005); clique fit " +
           std::string(planted && ll_match ? "matches" : "misses") +
           " the exhaustive optimum";
  return grid_ok && planted && exhaustive_planted && ll_match;
}

// ---------------------------------------------------------------------------
// check 7: conditioned on fixed labels, the blockmodel estimator is normal
// around its target with the stated variance

bool check_conditional_normality(std::string& detail) {
  const std::vector<std::vector<double>> theta = {{0.8, 0.1}, {0.1, 0.8}};
  const int n = 400;
  std::vector<int> z(n);
  for (int i = 0; i < n; ++i) z[i] = i < n / 2 ? 0 : 1;

  std::vector<double> values;
  values.reserve(500);
  double predicted_sum = 0.0;
  for (int t = 0; t < 500; ++t) {
    const Graph g =
        sample_planted(theta, z, rng::derive(707ULL, static_cast<std::uint64_t>(t)));
    estimators::BlockOptions bo;
    bo.fixed_labels = &z;
    const auto [est, fit] = estimators::entropy_blockmodel(g, 2, bo);
    values.push_back(est.value);
    predicted_sum += est.variance ? *est.variance
                                  : estimators::blockmodel_variance(fit, n);
  }

  const auto diag = simharness::clt_diagnostic(values);
  const double predicted = predicted_sum / 500.0;
  const double empirical = population_variance(values);
  const double ratio = predicted / empirical;

  detail = "ks p=" + fmt(diag.p_value) + ", predicted/empirical var=" + fmt(ratio);
  return diag.p_value > 0.01 && std::fabs(ratio - 1.0) <= 0.25;
}

// ---------------------------------------------------------------------------
// check 8: blockmodel entropy error and the recovered degree profile both
// tighten as the graph grows

bool check_consistency_decay(std::string& detail) {
  const auto spec = make_f1();
  const double truth = graphon_entropy(spec, 2048);
  std::vector<double> med_err, g_err;

  for (int n : {200, 400, 800}) {
    const std::uint64_t master = rng::derive(808ULL, static_cast<std::uint64_t>(n));
    std::vector<double> errs;
    double gsum = 0.0;
    for (int t = 0; t < 50; ++t) {
      const std::uint64_t ts = rng::derive(master, static_cast<std::uint64_t>(t));
      const auto xi = sample_latents(n, rng::derive(ts, 1));
      const Graph g = sample_graph(spec, xi, rng::derive(ts, 2));

      estimators::BlockOptions bo;
      bo.restarts = 3;
      bo.seed = rng::derive(ts, 3);
      const auto est = estimators::entropy_blockmodel(g, 0, bo).first;
      errs.push_back(std::fabs(est.value - truth));

      // degree profile, rescaled to unit mean to match the target profile
      // 2x whose integral is 1
      const auto dd = estimators::compute_g_hat(g);
      double total = 0.0;
      for (double v : dd.g_hat) total += v;
      const double scale = static_cast<double>(n) / total;
      double gap = 0.0;
      for (int i = 0; i < n; ++i)
        gap += std::fabs(scale * dd.g_hat[i] - 2.0 * xi[i]);
      gsum += gap / static_cast<double>(n);
    }
    med_err.push_back(median(errs));
    g_err.push_back(gsum / 50.0);
  }

  const bool med_down = med_err[0] > med_err[1] && med_err[1] > med_err[2];
  const bool g_down = g_err[0] > g_err[1] && g_err[1] > g_err[2];
  detail = "median |H3-truth| " + fmt(med_err[0]) + " > " + fmt(med_err[1]) +
           " > " + fmt(med_err[2]) + "; profile gap " + fmt(g_err[0]) + " > " +
           fmt(g_err[1]) + " > " + fmt(g_err[2]);
  return med_down && g_down;
}

// ---------------------------------------------------------------------------
// check 9: relabeling invariance, entropy bounds, the error decomposition
// identity, and bitwise reproducibility across thread counts

bool check_invariance_suite(std::string& detail) {
  const double log2 = std::log(2.0);
  std::string fail;

  // relabeling invariance on a sampled heterogeneous graph
  {
    const auto xi = sample_latents(120, 901ULL);
    const Graph g = sample_graph(make_f1(), xi, 902ULL);
    std::vector<int> perm(120);
    for (int i = 0; i < 120; ++i) perm[i] = (49 * i + 3) % 120;
    const Graph pg = g.permuted(perm);

    if (estimators::entropy_constant(g).value !=
        estimators::entropy_constant(pg).value)
      fail += " H1-relabel";
    if (std::fabs(estimators::entropy_separable(g).value -
                  estimators::entropy_separable(pg).value) > 1e-12)
      fail += " H2-relabel";

    std::vector<int> z(120), pz(120);
    for (int i = 0; i < 120; ++i) z[i] = i % 4;
    for (int i = 0; i < 120; ++i) pz[perm[i]] = z[i];
    estimators::BlockOptions bo, pbo;
    bo.fixed_labels = &z;
    pbo.fixed_labels = &pz;
    const auto [e3, f3] = estimators::entropy_blockmodel(g, 4, bo);
    const auto [pe3, pf3] = estimators::entropy_blockmodel(pg, 4, pbo);
    if (e3.value != pe3.value || *e3.variance != *pe3.variance)
      fail += " H3-relabel";

    if (std::fabs(estimators::entropy_lowrank(g).value -
                  estimators::entropy_lowrank(pg).value) > 1e-8)
      fail += " H4-relabel";
  }

  // all estimates stay inside [0, log 2]
  {
    std::vector<Graph> graphs;
    graphs.push_back(sample_graph(make_f1(), sample_latents(120, 903ULL), 904ULL));
    graphs.push_back(sample_graph(GraphonSpec::constant(0.5),
                                  sample_latents(80, 905ULL), 906ULL));
    Graph cliques(60);
    for (int i = 0; i < 60; ++i)
      for (int j = i + 1; j < 60; ++j)
        if ((i < 30) == (j < 30)) cliques.set_edge(i, j, true);
    graphs.push_back(std::move(cliques));

    for (const Graph& g : graphs) {
      const double vals[4] = {estimators::entropy_constant(g).value,
                              estimators::entropy_separable(g).value,
                              estimators::entropy_blockmodel(g, 0, {}).first.value,
                              estimators::entropy_lowrank(g).value};
      for (double v : vals)
        if (!(v >= -1e-12 && v <= log2 + 1e-12)) fail += " bounds";
    }
  }

  // rmse^2 = bias^2 + variance on every reported batch
  {
    simharness::BatchOptions opt;
    opt.threads = 1;
    const auto batches = simharness::run_batch(
        make_f1(), {"H1", "H2", "H3", "H4"}, 100, 30, 907ULL, opt);
    for (const auto& b : batches)
      if (std::fabs(b.rmse * b.rmse - (b.bias2 + b.variance)) >
          1e-10 * std::max(1.0, b.rmse * b.rmse))
        fail += " identity";

    // bitwise reproducibility across thread counts
    simharness::BatchOptions multi = opt;
    multi.threads = 3;
    const auto rerun = simharness::run_batch(
        make_f1(), {"H1", "H2", "H3", "H4"}, 100, 30, 907ULL, multi);
    for (std::size_t e = 0; e < batches.size(); ++e)
      if (batches[e].estimates != rerun[e].estimates ||
          batches[e].rmse != rerun[e].rmse)
        fail += " threads";
  }

  detail = fail.empty() ? "relabeling, bounds, identity, thread determinism"
                        : "failed:" + fail;
  return fail.empty();
}

struct Check {
  const char* name;
  std::function<bool(std::string&)> fn;
};

}  // namespace

int main() {
  const Check checks[] = {
      {"error ordering, product-form graphon", check_error_ordering_product},
      {"constant-graphon normality and variance", check_constant_normality},
      {"error ordering, flat-marginal graphon", check_error_ordering_flat},
      {"normalized error decay with graph size", check_decay_with_size},
      {"closed-form block entropy vs quadrature", check_block_closed_form},
      {"likelihood argmax and exact label recovery", check_likelihood_argmax},
      {"conditional normality of the blockmodel fit", check_conditional_normality},
      {"estimator consistency as graphs grow", check_consistency_decay},
      {"invariance and reproducibility suite", check_invariance_suite},
  };

  int failures = 0;
  int idx = 0;
  for (const Check& c : checks) {
    ++idx;
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("[%s] %d/9 %s (%.1fs): %s\n", ok ? "PASS" : "FAIL", idx,
                c.name, secs, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
