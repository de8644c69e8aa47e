// graphent: sample exchangeable random graphs, estimate graphon entropy,
// run Monte-Carlo benchmarks, and build entropy time series from edge lists.
//
// Exit codes: 0 success, 2 bad flags or invalid parameters, 1 runtime
// failure (unreadable input, numerical breakdown, unwritable output).

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "graphent/errors.hpp"
#include "graphent/estimators.hpp"
#include "graphent/graph.hpp"
#include "graphent/graphon.hpp"
#include "graphent/ingest.hpp"
#include "graphent/rng.hpp"
#include "graphent/sampler.hpp"
#include "graphent/simharness.hpp"

namespace {

using namespace graphent;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const double kLog2 = std::log(2.0);

struct CommonFlags {
  std::string graphon = "constant";
  double rho = -1.0;  // negative = kind-dependent default (f2: 1, else 0.25)
  std::string regime = "dense";
  std::string n_spec = "600";
  int trials = 100;
  std::uint64_t seed = 1;
  std::string estimators_flag = "h1,h2,h3,h4";
  std::string k_flag = "auto";
  double eta = 0.01;
  std::string ghat_norm = "configuration";
  std::string input;
  bool timestamps = false;
  std::string window = "monthly";
  std::string mode = "cumulative";
  std::string out = ".";
  int threads = 0;  // 0 = all available
  bool bits = false;
};

double default_rho(const std::string& graphon) {
  return graphon == "f2" ? 1.0 : 0.25;
}

bool is_builtin_graphon(const std::string& name) {
  return name == "constant" || name == "separable" || name == "block" ||
         name == "lowrank" || name == "grid" || name == "f1" || name == "f2";
}

GraphonSpec make_builtin_spec(const std::string& name, double rho) {
  // For the constant graphon the sparsity level IS the edge probability, so
  // --rho feeds the level directly (levels live strictly inside (0,1)).
  if (name == "constant") return GraphonSpec::constant(rho, 1.0);
  if (name == "separable") {
    std::vector<double> g(129);
    for (int i = 0; i < 129; ++i) g[i] = 2.0 * i / 128.0;
    return GraphonSpec::separable(std::move(g), rho);
  }
  if (name == "block")
    return GraphonSpec::block({{0.8, 0.1}, {0.1, 0.8}}, {0.5, 0.5}, rho);
  if (name == "lowrank") {
    std::vector<double> flat(129, 1.0), ramp(129);
    for (int i = 0; i < 129; ++i) ramp[i] = i / 128.0;
    return GraphonSpec::low_rank({0.5, 0.3}, {flat, ramp}, rho);
  }
  if (name == "grid") {
    GraphonSpec f1 = make_f1(rho);
    f1.id = "grid";
    return f1;
  }
  if (name == "f1") return make_f1(rho);
  return make_f2(0.25, 0.15, 3.0, rho, 1024);
}

GraphonSpec resolve_spec(const CommonFlags& f, bool rho_given) {
  if (is_builtin_graphon(f.graphon)) {
    const double rho = rho_given ? f.rho : default_rho(f.graphon);
    return make_builtin_spec(f.graphon, rho);  // factories validate rho
  }
  // anything else is read as a graphon config file
  GraphonSpec spec = load_graphon_config(f.graphon);
  if (rho_given) {
    spec.rho_n = f.rho;
    if (!(spec.rho_n > 0.0 && spec.rho_n <= 1.0))
      throw std::domain_error("rho must lie in (0,1]");
    if (spec.rho_n * spec.max_f() > 1.0)
      throw std::domain_error("rho * max f must stay at or below 1");
  }
  return spec;
}

std::vector<std::string> parse_estimators(const std::string& flag) {
  std::vector<std::string> ids;
  std::size_t start = 0;
  while (start <= flag.size()) {
    const std::size_t comma = flag.find(',', start);
    const std::size_t stop = comma == std::string::npos ? flag.size() : comma;
    std::string tok = flag.substr(start, stop - start);
    for (char& c : tok) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (!tok.empty()) {
      if (tok != "H1" && tok != "H2" && tok != "H3" && tok != "H4")
        throw std::domain_error("unknown estimator '" + tok +
                                "' (expected h1,h2,h3,h4)");
      if (std::find(ids.begin(), ids.end(), tok) == ids.end())
        ids.push_back(tok);
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (ids.empty()) throw std::domain_error("no estimators requested");
  return ids;
}

std::vector<int> parse_n_list(const std::string& flag) {
  std::vector<int> ns;
  std::size_t start = 0;
  while (start <= flag.size()) {
    const std::size_t comma = flag.find(',', start);
    const std::size_t stop = comma == std::string::npos ? flag.size() : comma;
    const std::string tok = flag.substr(start, stop - start);
    if (!tok.empty()) {
      try {
        ns.push_back(std::stoi(tok));
      } catch (const std::exception&) {
        throw std::domain_error("bad --n value '" + tok + "'");
      }
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (ns.empty()) throw std::domain_error("--n is empty");
  return ns;
}

int parse_k(const std::string& flag) {
  std::string lower = flag;
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "auto") return 0;
  int k = 0;
  try {
    k = std::stoi(lower);
  } catch (const std::exception&) {
    throw std::domain_error("--k must be a positive integer or 'auto'");
  }
  if (k < 1) throw std::domain_error("--k must be a positive integer or 'auto'");
  return k;
}

estimators::GhatNorm parse_norm(const std::string& flag) {
  if (flag == "paper") return estimators::GhatNorm::paper;
  if (flag == "configuration") return estimators::GhatNorm::configuration;
  throw std::domain_error("--ghat-norm must be 'paper' or 'configuration'");
}

Regime parse_regime(const std::string& flag) {
  if (flag == "dense") return Regime::dense;
  if (flag == "sparse") return Regime::sparse;
  throw std::domain_error("--regime must be 'dense' or 'sparse'");
}

int effective_threads(int flag) {
  if (flag > 0) return flag;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string out_path(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

void to_bits(estimators::EntropyEstimate& e) {
  e.value /= kLog2;
  if (e.variance) *e.variance /= kLog2 * kLog2;
}

void to_bits(simharness::TrialBatch& b) {
  for (double& v : b.estimates) v /= kLog2;
  b.truth /= kLog2;
  b.mean /= kLog2;
  b.bias2 /= kLog2 * kLog2;
  b.variance /= kLog2 * kLog2;
  b.rmse /= kLog2;
  b.srmse /= kLog2;
}

int cmd_simulate(const CommonFlags& f, bool rho_given) {
  const GraphonSpec spec = resolve_spec(f, rho_given);
  const std::vector<int> ns = parse_n_list(f.n_spec);
  if (ns.size() != 1) throw std::domain_error("simulate takes a single --n");
  const int n = ns[0];
  if (n < 2) throw std::domain_error("--n must be at least 2");

  const std::vector<double> xi = sample_latents(n, rng::derive(f.seed, 1));
  const Graph g = sample_graph(spec, xi, rng::derive(f.seed, 2));

  g.save_edge_list(out_path(f.out, "edges.txt"));
  std::ofstream lat(out_path(f.out, "latents.txt"));
  if (!lat) throw std::runtime_error("cannot write latents.txt");
  for (double x : xi) lat << fmt(x) << '\n';

  const double rho_hat = estimators::estimate_rho(g);
  std::cout << "n=" << n << " edges=" << g.edge_count()
            << " rho_hat=" << fmt(rho_hat) << '\n';
  return 0;
}

int cmd_estimate(const CommonFlags& f, bool n_given) {
  if (f.input.empty()) throw std::domain_error("--input is required");
  const std::vector<std::string> ids = parse_estimators(f.estimators_flag);
  const int k = parse_k(f.k_flag);
  const estimators::GhatNorm norm = parse_norm(f.ghat_norm);

  int n_hint = 0;
  if (n_given) {
    const std::vector<int> ns = parse_n_list(f.n_spec);
    if (ns.size() != 1) throw std::domain_error("estimate takes a single --n");
    n_hint = ns[0];
  }
  const Graph g = Graph::load_edge_list(f.input, n_hint);
  if (g.n() < 2)
    throw std::domain_error(
        "input graph has fewer than 2 nodes; pass --n for sparse or empty files");

  std::vector<estimators::EntropyEstimate> rows;
  for (const std::string& id : ids) {
    estimators::EntropyEstimate e;
    if (id == "H1") {
      e = estimators::entropy_constant(g);
    } else if (id == "H2") {
      e = estimators::entropy_separable(g, norm);
    } else if (id == "H3") {
      estimators::BlockOptions bo;
      bo.seed = f.seed;
      e = estimators::entropy_blockmodel(g, k, bo).first;
    } else {
      e = estimators::entropy_lowrank(g, f.eta);
    }
    if (f.bits) to_bits(e);
    rows.push_back(std::move(e));
  }

  std::ofstream csv(out_path(f.out, "estimates.csv"));
  if (!csv) throw std::runtime_error("cannot write estimates.csv");
  csv << estimators::csv_header() << '\n';
  std::cout << estimators::csv_header() << '\n';
  for (const auto& e : rows) {
    csv << estimators::csv_row(e) << '\n';
    std::cout << estimators::csv_row(e) << '\n';
  }
  return 0;
}

int cmd_benchmark(const CommonFlags& f, bool rho_given) {
  const GraphonSpec spec = resolve_spec(f, rho_given);
  const std::vector<std::string> ids = parse_estimators(f.estimators_flag);
  const std::vector<int> ns = parse_n_list(f.n_spec);

  simharness::BatchOptions opt;
  opt.k = parse_k(f.k_flag);
  opt.eta = f.eta;
  opt.norm = parse_norm(f.ghat_norm);
  opt.regime = parse_regime(f.regime);
  opt.threads = effective_threads(f.threads);

  std::vector<simharness::TrialBatch> batches;
  std::vector<simharness::SweepTable> tables;

  if (ns.size() == 1) {
    GraphonSpec sized = spec;
    sized.rho_n = rho_schedule(ns[0], opt.regime, spec.rho_n);
    batches = simharness::run_batch(sized, ids, ns[0], f.trials, f.seed, opt);
  } else {
    for (const std::string& id : ids) {
      simharness::SweepTable table;
      table.spec_id = spec.id;
      table.estimator_id = id;
      table.regime = opt.regime;
      table.rows =
          simharness::decay_sweep(spec, id, ns, f.trials, f.seed, opt, &batches);
      tables.push_back(std::move(table));
    }
  }

  if (f.bits) {
    for (auto& b : batches) to_bits(b);
    for (auto& t : tables)
      for (auto& r : t.rows) r.srmse_value /= kLog2;
  }

  simharness::write_batch_csv(batches, out_path(f.out, "batch.csv"));
  simharness::write_summary_csv(batches, out_path(f.out, "summary.csv"));
  if (!tables.empty())
    simharness::write_sweep_csv(tables, out_path(f.out, "sweep.csv"));

  for (const auto& b : batches)
    std::cout << b.spec_id << ' ' << b.estimator_id << " n=" << b.n
              << " rho_n=" << fmt(b.rho_n) << " mean=" << fmt(b.mean)
              << " rmse=" << fmt(b.rmse) << " srmse=" << fmt(b.srmse)
              << " errors=" << b.error_count << '\n';
  return 0;
}

int cmd_timeseries(const CommonFlags& f) {
  if (f.input.empty()) throw std::domain_error("--input is required");
  const std::vector<std::string> ids = parse_estimators(f.estimators_flag);
  if (ids.size() != 1)
    throw std::domain_error("timeseries takes a single estimator");

  ingest::ParseOptions popt;
  popt.has_timestamps = true;
  if (!f.timestamps)
    throw std::domain_error("timeseries requires --timestamps input");
  const ingest::ParseResult parsed = ingest::parse_edge_list(f.input, popt);
  for (const auto& [line, text] : parsed.malformed)
    std::cerr << "warning: malformed line " << line << ": " << text << '\n';

  ingest::Window window;
  if (f.window == "monthly")
    window = ingest::Window::monthly;
  else if (f.window == "yearly")
    window = ingest::Window::yearly;
  else
    throw std::domain_error("--window must be 'monthly' or 'yearly'");
  ingest::SnapshotMode mode;
  if (f.mode == "cumulative")
    mode = ingest::SnapshotMode::cumulative;
  else if (f.mode == "windowed")
    mode = ingest::SnapshotMode::windowed;
  else
    throw std::domain_error("--mode must be 'cumulative' or 'windowed'");

  const ingest::SnapshotSeries series =
      ingest::build_snapshots(parsed.records, window, mode);

  ingest::SeriesOptions sopt;
  sopt.estimator_id = ids[0];
  sopt.k = parse_k(f.k_flag);
  sopt.eta = f.eta;
  sopt.norm = parse_norm(f.ghat_norm);
  sopt.seed = f.seed;
  std::vector<ingest::TimeseriesRow> rows = ingest::entropy_timeseries(series, sopt);
  if (f.bits)
    for (auto& r : rows) {
      if (r.skipped) continue;
      r.entropy /= kLog2;
      if (r.variance) *r.variance /= kLog2 * kLog2;
    }

  ingest::write_timeseries_csv(rows, sopt, out_path(f.out, "timeseries.csv"));
  for (const auto& r : rows) {
    std::cout << r.label << " n_active=" << r.n_active;
    if (r.skipped)
      std::cout << " skipped (" << r.note << ")";
    else
      std::cout << " rho_hat=" << fmt(r.rho_hat) << " entropy=" << fmt(r.entropy);
    std::cout << '\n';
  }
  return 0;
}

void add_common(CLI::App* cmd, CommonFlags& f, CLI::Option** rho_opt = nullptr,
                CLI::Option** n_opt = nullptr) {
  auto* g = cmd->add_option("--graphon", f.graphon,
                            "builtin graphon (constant|separable|block|lowrank|"
                            "grid|f1|f2) or a config file path");
  g->capture_default_str();
  auto* r = cmd->add_option(
      "--rho", f.rho, "sparsity level (default 0.25, or 1 for f2)");
  auto* n = cmd->add_option("--n", f.n_spec,
                            "node count; benchmark accepts a comma list");
  n->capture_default_str();
  cmd->add_option("--trials", f.trials, "Monte-Carlo repetitions")
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "master random seed")->capture_default_str();
  cmd->add_option("--estimators", f.estimators_flag,
                  "comma list from h1,h2,h3,h4")
      ->capture_default_str();
  cmd->add_option("--k", f.k_flag, "block count for h3, or 'auto' = round(sqrt(n))")
      ->capture_default_str();
  cmd->add_option("--eta", f.eta, "h4 spectral threshold margin, in (0,1)")
      ->capture_default_str();
  cmd->add_option("--ghat-norm", f.ghat_norm,
                  "degree normalization: paper|configuration")
      ->capture_default_str();
  cmd->add_option("--regime", f.regime, "sparsity schedule: dense|sparse")
      ->capture_default_str();
  cmd->add_option("--input", f.input, "edge-list file to read");
  cmd->add_flag("--timestamps", f.timestamps,
                "input lines carry a third timestamp column");
  cmd->add_option("--window", f.window, "snapshot bucketing: monthly|yearly")
      ->capture_default_str();
  cmd->add_option("--mode", f.mode, "snapshot contents: cumulative|windowed")
      ->capture_default_str();
  cmd->add_option("--out", f.out, "output directory")->capture_default_str();
  cmd->add_option("--threads", f.threads, "worker threads (0 = all cores)")
      ->capture_default_str();
  cmd->add_flag("--bits", f.bits, "report entropies in bits instead of nats");
  if (rho_opt) *rho_opt = r;
  if (n_opt) *n_opt = n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graphon entropy estimation toolkit"};
  app.require_subcommand(1);

  CommonFlags fsim, fest, fbench, fts;
  fsim.n_spec = "200";
  CLI::Option *rho_sim = nullptr, *rho_bench = nullptr, *n_est = nullptr;

  CLI::App* sim = app.add_subcommand(
      "simulate", "sample one graph and write edges.txt + latents.txt");
  add_common(sim, fsim, &rho_sim);

  CLI::App* est = app.add_subcommand(
      "estimate", "estimate entropy of an edge-list graph (estimates.csv)");
  add_common(est, fest, nullptr, &n_est);

  CLI::App* bench = app.add_subcommand(
      "benchmark", "Monte-Carlo batches and sweeps (summary.csv, sweep.csv)");
  add_common(bench, fbench, &rho_bench);

  CLI::App* ts = app.add_subcommand(
      "timeseries", "entropy over edge-list snapshots (timeseries.csv)");
  add_common(ts, fts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(fsim, rho_sim->count() > 0);
    if (est->parsed()) return cmd_estimate(fest, n_est->count() > 0);
    if (bench->parsed()) return cmd_benchmark(fbench, rho_bench->count() > 0);
    return cmd_timeseries(fts);
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
