#pragma once

#include <cstdint>
#include <vector>

#include "graphent/graph.hpp"
#include "graphent/graphon.hpp"

// Exchangeable graph generation: latent uniforms, conditionally independent
// edges, and the sparsity schedules used by the decay sweeps.

namespace graphent {

enum class Regime { dense, sparse };

// n independent uniform(0,1) draws, strictly interior; identical seed gives
// identical output.
std::vector<double> sample_latents(int n, std::uint64_t seed);

// Bernoulli(rho_n f(xi_i, xi_j)) independently for every pair i < j, sampled
// by pair-indexed counter draws so the result is independent of visit order.
// The latents are stored on the returned graph.
Graph sample_graph(const GraphonSpec& spec, const std::vector<double>& xi,
                   std::uint64_t seed);

// dense: level for every n.  sparse: min(level, (log n)^3.5 / n), a concrete
// sequence inside omega(n^-1 log^3 n).
double rho_schedule(int n, Regime regime, double level);

}  // namespace graphent
