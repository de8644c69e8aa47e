#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graphent/estimators.hpp"
#include "graphent/graphon.hpp"
#include "graphent/sampler.hpp"

// Monte-Carlo engine: repeated sample-then-estimate trials, the
// bias^2/variance/RMSE decomposition, normalized-RMSE decay sweeps over n,
// and normality diagnostics for the estimators' sampling distributions.
//
// Determinism contract: trial t of a batch depends only on (master_seed, t),
// trial results are aggregated in trial order with compensated summation,
// and every published number is therefore bit-identical across runs and
// across --threads settings.

namespace graphent::simharness {

struct TrialBatch {
  std::string spec_id;
  std::string estimator_id;
  int n = 0;
  double rho_n = 0.0;
  int trials = 0;  // requested; estimates/trial_errors have one slot each

  std::vector<double> estimates;         // NaN where the trial errored
  std::vector<std::string> trial_errors; // empty string where it succeeded
  int error_count = 0;
  bool dense = true;

  double truth = 0.0;  // quadrature entropy of the sampled spec
  double mean = 0.0;
  double bias2 = 0.0;     // (mean - truth)^2
  double variance = 0.0;  // population variance about the mean
  double rmse = 0.0;      // against truth; rmse^2 = bias2 + variance
  double srmse = 0.0;     // about the mean, sparsity-normalized
};

struct BatchOptions {
  int k = 0;          // H3 block count, 0 picks round(sqrt(n))
  double eta = 0.01;  // H4 threshold margin
  estimators::GhatNorm norm = estimators::GhatNorm::configuration;
  Regime regime = Regime::dense;
  int threads = 1;
  int restarts = 3;  // H3 label-fit restarts
  // When set, H3 skips fitting and conditions on these labels.
  const std::vector<int>* fixed_labels = nullptr;
  int quad_points = 2048;
  std::optional<double> truth_override;
};

// One batch per requested estimator id ("H1".."H4").  Trial t draws fresh
// latents and a fresh graph from seeds derived from (master_seed, t) and
// applies every estimator to the same graph.  Degenerate-input failures are
// recorded per trial and excluded from the summaries.
std::vector<TrialBatch> run_batch(const GraphonSpec& spec,
                                  const std::vector<std::string>& estimator_ids,
                                  int n, int trials, std::uint64_t master_seed,
                                  const BatchOptions& opt = {});

// Population RMSE of the estimates about their own mean, divided by
// sqrt(|rho_n log rho_n|); the divisor is 1 in the dense regime (and
// whenever |rho_n log rho_n| is 0, where the normalization degenerates).
double srmse(const std::vector<double>& estimates, double rho_n, bool dense);

struct SweepRow {
  int n = 0;
  double rho_n = 0.0;
  double srmse_value = 0.0;
};

// A finished sweep plus the identifiers its CSV rows carry.
struct SweepTable {
  std::string spec_id;
  std::string estimator_id;
  Regime regime = Regime::dense;
  std::vector<SweepRow> rows;
};

// One batch per n with rho_n = rho_schedule(n, regime, spec.rho_n) and
// master seed derived from (seed, n); n_list must be strictly increasing.
// When collect is given, the per-n batches are appended to it.
std::vector<SweepRow> decay_sweep(const GraphonSpec& spec,
                                  const std::string& estimator_id,
                                  const std::vector<int>& n_list, int trials,
                                  std::uint64_t seed,
                                  const BatchOptions& opt = {},
                                  std::vector<TrialBatch>* collect = nullptr);

struct CltDiagnostic {
  double ks_statistic = 0.0;
  double p_value = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

// Standardizes by the sample mean and SD (ddof 1), then runs a
// Kolmogorov-Smirnov test against the standard normal (asymptotic p-value)
// and reports sample shape statistics.  Needs >= 100 estimates; a zero
// sample SD is a degenerate input.
CltDiagnostic clt_diagnostic(const std::vector<double>& estimates);

// Standard normal CDF.
double norm_cdf(double x);
// Standard normal quantile (Wichura's AS241, good to ~1e-15); p in (0,1).
double norm_quantile(double p);
// Asymptotic Kolmogorov-Smirnov tail probability Q(t).
double ks_pvalue(double t);

// CSV emitters.  Column orders are stable interfaces:
//   batch rows    spec,estimator,n,rho_n,trial,value,error
//   summary rows  spec,estimator,n,rho_n,trials,errors,truth,mean,bias2,
//                 variance,rmse,srmse
//   sweep rows    spec,estimator,regime,n,rho_n,srmse
void write_batch_csv(const std::vector<TrialBatch>& batches,
                     const std::string& path);
void write_summary_csv(const std::vector<TrialBatch>& batches,
                       const std::string& path);
void write_sweep_csv(const std::vector<SweepTable>& tables,
                     const std::string& path);

}  // namespace graphent::simharness
