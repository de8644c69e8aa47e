#include "graphent/sampler.hpp"

#include <cmath>
#include <stdexcept>

#include "graphent/rng.hpp"

namespace graphent {

std::vector<double> sample_latents(int n, std::uint64_t seed) {
  if (n < 1) throw std::domain_error("sample_latents: n must be positive");
  std::vector<double> xi(n);
  for (int i = 0; i < n; ++i) xi[i] = rng::uniform(seed, static_cast<std::uint64_t>(i));
  return xi;
}

Graph sample_graph(const GraphonSpec& spec, const std::vector<double>& xi,
                   std::uint64_t seed) {
  const int n = static_cast<int>(xi.size());
  Graph g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double p = eval_graphon(spec, xi[i], xi[j]);
      const double u = rng::uniform(seed, Graph::pair_index(n, i, j));
      if (u < p) g.set_edge(i, j, true);
    }
  }
  g.latents = xi;
  return g;
}

double rho_schedule(int n, Regime regime, double level) {
  if (n < 1) throw std::domain_error("rho_schedule: n must be positive");
  if (!(level > 0.0 && level <= 1.0))
    throw std::domain_error("rho_schedule: level must lie in (0,1]");
  if (regime == Regime::dense) return level;
  if (n == 1) return level;  // the sparse formula degenerates at n = 1
  const double s = std::pow(std::log(static_cast<double>(n)), 3.5) /
                   static_cast<double>(n);
  return std::min(level, s);
}

}  // namespace graphent
