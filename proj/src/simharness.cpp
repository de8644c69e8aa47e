#include "graphent/simharness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include "graphent/errors.hpp"
#include "graphent/rng.hpp"

namespace graphent::simharness {
namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Neumaier-compensated accumulator; used everywhere trial results are
// reduced so the outcome depends only on trial order, never on schedule.
struct CompSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    const double t = s + x;
    if (std::fabs(s) >= std::fabs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double get() const { return s + c; }
};

const char* kKnownIds[] = {"H1", "H2", "H3", "H4"};

bool known_estimator(const std::string& id) {
  for (const char* k : kKnownIds)
    if (id == k) return true;
  return false;
}

struct TrialSlot {
  // one entry per requested estimator id
  std::vector<double> values;
  std::vector<std::string> errors;
};

void run_one_trial(const GraphonSpec& spec,
                   const std::vector<std::string>& ids, int n,
                   std::uint64_t master_seed, int t, const BatchOptions& opt,
                   TrialSlot& slot) {
  const std::uint64_t trial_seed = rng::derive(master_seed, static_cast<std::uint64_t>(t));
  const std::vector<double> xi = sample_latents(n, rng::derive(trial_seed, 1));
  const Graph g = sample_graph(spec, xi, rng::derive(trial_seed, 2));

  slot.values.assign(ids.size(), std::numeric_limits<double>::quiet_NaN());
  slot.errors.assign(ids.size(), "");
  for (std::size_t e = 0; e < ids.size(); ++e) {
    try {
      if (ids[e] == "H1") {
        slot.values[e] = estimators::entropy_constant(g).value;
      } else if (ids[e] == "H2") {
        slot.values[e] = estimators::entropy_separable(g, opt.norm).value;
      } else if (ids[e] == "H3") {
        estimators::BlockOptions bo;
        bo.restarts = opt.restarts;
        bo.seed = rng::derive(trial_seed, 3);
        bo.fixed_labels = opt.fixed_labels;
        slot.values[e] = estimators::entropy_blockmodel(g, opt.k, bo).first.value;
      } else {
        slot.values[e] = estimators::entropy_lowrank(g, opt.eta).value;
      }
    } catch (const degenerate_input_error& err) {
      slot.errors[e] = err.what();
    }
  }
}

}  // namespace

std::vector<TrialBatch> run_batch(const GraphonSpec& spec,
                                  const std::vector<std::string>& estimator_ids,
                                  int n, int trials, std::uint64_t master_seed,
                                  const BatchOptions& opt) {
  if (trials < 2) throw std::domain_error("run_batch: need at least 2 trials");
  if (n < 2) throw std::domain_error("run_batch: need at least 2 nodes");
  if (estimator_ids.empty())
    throw std::domain_error("run_batch: no estimators requested");
  for (const std::string& id : estimator_ids)
    if (!known_estimator(id))
      throw std::domain_error("run_batch: unknown estimator id " + id);

  const double truth = opt.truth_override
                           ? *opt.truth_override
                           : graphon_entropy(spec, opt.quad_points);

  std::vector<TrialSlot> slots(trials);
  const int workers = std::max(1, std::min(opt.threads, trials));
  if (workers == 1) {
    for (int t = 0; t < trials; ++t)
      run_one_trial(spec, estimator_ids, n, master_seed, t, opt, slots[t]);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (int t = w; t < trials; t += workers)
            run_one_trial(spec, estimator_ids, n, master_seed, t, opt, slots[t]);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    for (std::thread& th : pool) th.join();
    for (const std::exception_ptr& f : failures)
      if (f) std::rethrow_exception(f);
  }

  std::vector<TrialBatch> batches(estimator_ids.size());
  for (std::size_t e = 0; e < estimator_ids.size(); ++e) {
    TrialBatch& b = batches[e];
    b.spec_id = spec.id;
    b.estimator_id = estimator_ids[e];
    b.n = n;
    b.rho_n = spec.rho_n;
    b.trials = trials;
    b.dense = opt.regime == Regime::dense;
    b.truth = truth;
    b.estimates.resize(trials);
    b.trial_errors.resize(trials);

    std::vector<double> ok;
    ok.reserve(trials);
    for (int t = 0; t < trials; ++t) {
      b.estimates[t] = slots[t].values[e];
      b.trial_errors[t] = slots[t].errors[e];
      if (b.trial_errors[t].empty())
        ok.push_back(b.estimates[t]);
      else
        ++b.error_count;
    }

    if (ok.empty()) {
      b.mean = b.bias2 = b.variance = b.rmse = b.srmse =
          std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    CompSum sum;
    for (double v : ok) sum.add(v);
    b.mean = sum.get() / static_cast<double>(ok.size());

    CompSum m2;
    for (double v : ok) {
      const double d = v - b.mean;
      m2.add(d * d);
    }
    b.variance = m2.get() / static_cast<double>(ok.size());
    const double bias = b.mean - truth;
    b.bias2 = bias * bias;
    b.rmse = std::sqrt(b.bias2 + b.variance);
    b.srmse = ok.size() >= 2 ? srmse(ok, spec.rho_n, b.dense)
                             : std::numeric_limits<double>::quiet_NaN();
  }
  return batches;
}

double srmse(const std::vector<double>& estimates, double rho_n, bool dense) {
  if (estimates.size() < 2)
    throw std::domain_error("srmse: need at least 2 estimates");
  CompSum sum;
  for (double v : estimates) sum.add(v);
  const double mean = sum.get() / static_cast<double>(estimates.size());
  CompSum m2;
  for (double v : estimates) {
    const double d = v - mean;
    m2.add(d * d);
  }
  const double rmse_about_mean =
      std::sqrt(m2.get() / static_cast<double>(estimates.size()));
  double divisor = 1.0;
  if (!dense && rho_n > 0.0) {
    const double scale = std::fabs(rho_n * std::log(rho_n));
    if (scale > 0.0) divisor = std::sqrt(scale);
  }
  return rmse_about_mean / divisor;
}

std::vector<SweepRow> decay_sweep(const GraphonSpec& spec,
                                  const std::string& estimator_id,
                                  const std::vector<int>& n_list, int trials,
                                  std::uint64_t seed, const BatchOptions& opt,
                                  std::vector<TrialBatch>* collect) {
  if (n_list.empty()) throw std::domain_error("decay_sweep: empty n list");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1])
      throw std::domain_error("decay_sweep: n list must be strictly increasing");

  const double level = spec.rho_n;
  std::vector<SweepRow> rows;
  rows.reserve(n_list.size());
  for (int n : n_list) {
    GraphonSpec sized = spec;
    // rho only ever shrinks from a validated level, so the edge-probability
    // bound stays satisfied.
    sized.rho_n = rho_schedule(n, opt.regime, level);
    const std::uint64_t master = rng::derive(seed, static_cast<std::uint64_t>(n));
    std::vector<TrialBatch> b =
        run_batch(sized, {estimator_id}, n, trials, master, opt);
    rows.push_back({n, sized.rho_n, b[0].srmse});
    if (collect)
      collect->insert(collect->end(), std::make_move_iterator(b.begin()),
                      std::make_move_iterator(b.end()));
  }
  return rows;
}

CltDiagnostic clt_diagnostic(const std::vector<double>& estimates) {
  const std::size_t n = estimates.size();
  if (n < 100) throw std::domain_error("clt_diagnostic: need at least 100 estimates");

  CompSum sum;
  for (double v : estimates) sum.add(v);
  const double mean = sum.get() / static_cast<double>(n);
  CompSum c2, c3, c4;
  for (double v : estimates) {
    const double d = v - mean;
    c2.add(d * d);
    c3.add(d * d * d);
    c4.add(d * d * d * d);
  }
  const double m2 = c2.get() / static_cast<double>(n);
  if (m2 <= 0.0)
    throw degenerate_input_error("clt_diagnostic: zero sample variance");
  const double sd1 = std::sqrt(c2.get() / static_cast<double>(n - 1));

  CltDiagnostic out;
  const double m3 = c3.get() / static_cast<double>(n);
  const double m4 = c4.get() / static_cast<double>(n);
  out.skewness = m3 / (m2 * std::sqrt(m2));
  out.excess_kurtosis = m4 / (m2 * m2) - 3.0;

  std::vector<double> z(estimates);
  for (double& v : z) v = (v - mean) / sd1;
  std::sort(z.begin(), z.end());
  double d_stat = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double cdf = norm_cdf(z[i]);
    const double lo = cdf - static_cast<double>(i) / static_cast<double>(n);
    const double hi = static_cast<double>(i + 1) / static_cast<double>(n) - cdf;
    d_stat = std::max(d_stat, std::max(lo, hi));
  }
  out.ks_statistic = d_stat;
  const double sn = std::sqrt(static_cast<double>(n));
  out.p_value = ks_pvalue((sn + 0.12 + 0.11 / sn) * d_stat);
  return out;
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("norm_quantile: p must lie in (0,1)");
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
              6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
            1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
          1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    const double den =
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
            5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
          4.2313330701600911252e1) * r + 1.0);
    return q * num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
    x = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    x = num / den;
  }
  return q < 0.0 ? -x : x;
}

double ks_pvalue(double t) {
  if (t <= 0.0) return 1.0;
  const double a = -2.0 * t * t;
  double sign = 1.0, sum = 0.0, prev_term = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(a * j * j);
    sum += sign * term;
    if (term <= 1e-12 * sum || (j > 1 && term <= 1e-8 * prev_term))
      return std::min(1.0, std::max(0.0, 2.0 * sum));
    prev_term = term;
    sign = -sign;
  }
  return 1.0;  // series failed to move: t is tiny, the tail mass is all there
}

namespace {

std::string sanitize_error(const std::string& msg) {
  std::string out = msg;
  for (char& ch : out)
    if (ch == ',' || ch == '\n') ch = ';';
  return out;
}

}  // namespace

void write_batch_csv(const std::vector<TrialBatch>& batches,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_batch_csv: cannot write " + path);
  out << "spec,estimator,n,rho_n,trial,value,error\n";
  for (const TrialBatch& b : batches)
    for (int t = 0; t < b.trials; ++t) {
      out << b.spec_id << ',' << b.estimator_id << ',' << b.n << ','
          << fmt(b.rho_n) << ',' << t << ',';
      if (b.trial_errors[t].empty())
        out << fmt(b.estimates[t]) << ",\n";
      else
        out << ',' << sanitize_error(b.trial_errors[t]) << '\n';
    }
}

void write_summary_csv(const std::vector<TrialBatch>& batches,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_summary_csv: cannot write " + path);
  out << "spec,estimator,n,rho_n,trials,errors,truth,mean,bias2,variance,rmse,srmse\n";
  for (const TrialBatch& b : batches)
    out << b.spec_id << ',' << b.estimator_id << ',' << b.n << ','
        << fmt(b.rho_n) << ',' << b.trials << ',' << b.error_count << ','
        << fmt(b.truth) << ',' << fmt(b.mean) << ',' << fmt(b.bias2) << ','
        << fmt(b.variance) << ',' << fmt(b.rmse) << ',' << fmt(b.srmse) << '\n';
}

void write_sweep_csv(const std::vector<SweepTable>& tables,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_sweep_csv: cannot write " + path);
  out << "spec,estimator,regime,n,rho_n,srmse\n";
  for (const SweepTable& t : tables)
    for (const SweepRow& r : t.rows)
      out << t.spec_id << ',' << t.estimator_id << ','
          << (t.regime == Regime::dense ? "dense" : "sparse") << ',' << r.n
          << ',' << fmt(r.rho_n) << ',' << fmt(r.srmse_value) << '\n';
}

}  // namespace graphent::simharness
