#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphent/graph.hpp"

// k-block stochastic block model fitting by greedy profile-likelihood ascent
// (the histogram step behind the block entropy estimator).
//
// The profile log-likelihood of a labeling z is
//   l(z) = sum over cells a <= b of  m log(m/h) + (h-m) log(1 - m/h)
// with m the edge count and h the pair count of the cell, 0 log 0 := 0.
// Each cell term is L(m) + L(h-m) - L(h) with L(x) = x log x, so move deltas
// reduce to table lookups of L over the integers.

namespace graphent::blockfit {

struct BlockFit {
  int n = 0;
  int k = 0;
  std::vector<int> z;                               // labels, 0-based
  std::vector<long long> block_sizes;               // h_a, all positive
  std::vector<std::vector<double>> theta_hat;       // block edge averages
  std::vector<std::vector<long long>> pair_counts;  // C(h_a,2) diag, h_a h_b off
  std::vector<std::vector<long long>> edge_counts;  // edges within each cell
  double log_likelihood = 0.0;
  bool converged = true;    // ascent reached a full sweep with no acceptance
  bool degenerate = false;  // saturated fit (k == n), every cell 0/1
  int restart_index = 0;    // restart that produced the returned labeling
};

// Block edge-average estimate and likelihood at a fixed labeling.
// Labels must lie in [0,k) and every block must be nonempty.
BlockFit theta_mle(const Graph& a, const std::vector<int>& z, int k);

// Greedy ascent: degree-sorted contiguous initialization, sweeps of
// single-node moves, pairwise swaps tried when moves stall, accept only on
// strict increase, at most 100 sweeps.  restart r > 0 reshuffles nodes of
// equal degree with a stream derived from (seed, r); the best restart wins,
// ties broken toward the smaller restart index.
BlockFit fit_labels(const Graph& a, int k, int restarts, std::uint64_t seed);

// round(sqrt(n)), at least 1.
int default_k(int n);

// CSV "node,label" rows (labels reported 1-based) and a plain-text matrix.
void save_labels_csv(const BlockFit& fit, const std::string& path);
void save_theta_matrix(const BlockFit& fit, const std::string& path);

}  // namespace graphent::blockfit
