#include "graphent/graph.hpp"

#include <bit>
#include <fstream>
#include <stdexcept>
#include <utility>

namespace graphent {

Graph::Graph(int n) : n_(n) {
  if (n < 1) throw std::domain_error("graph: node count must be positive");
  const std::size_t pairs =
      static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
  bits_.assign((pairs + 63) / 64, 0);
}

std::size_t Graph::pair_index(int n, int i, int j) {
  // caller guarantees 0 <= i < j < n
  const std::size_t si = static_cast<std::size_t>(i);
  return si * static_cast<std::size_t>(n) - si * (si + 1) / 2 +
         static_cast<std::size_t>(j - i - 1);
}

bool Graph::edge(int i, int j) const {
  if (i == j) return false;
  if (i > j) std::swap(i, j);
  const std::size_t p = pair_index(n_, i, j);
  return (bits_[p >> 6] >> (p & 63)) & 1u;
}

void Graph::set_edge(int i, int j, bool present) {
  if (i == j) throw std::domain_error("graph: self-loops are not representable");
  if (i < 0 || j < 0 || i >= n_ || j >= n_)
    throw std::domain_error("graph: endpoint out of range");
  if (i > j) std::swap(i, j);
  const std::size_t p = pair_index(n_, i, j);
  const std::uint64_t mask = 1ull << (p & 63);
  if (present)
    bits_[p >> 6] |= mask;
  else
    bits_[p >> 6] &= ~mask;
}

std::size_t Graph::edge_count() const {
  std::size_t c = 0;
  for (std::uint64_t w : bits_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::vector<int> Graph::degrees() const {
  std::vector<int> d(n_, 0);
  for (int i = 0; i < n_; ++i) {
    std::size_t p = pair_index(n_, i, i + 1);
    for (int j = i + 1; j < n_; ++j, ++p) {
      if ((bits_[p >> 6] >> (p & 63)) & 1u) {
        ++d[i];
        ++d[j];
      }
    }
  }
  return d;
}

std::vector<std::vector<int>> Graph::adjacency_lists() const {
  std::vector<std::vector<int>> adj(n_);
  const std::vector<int> d = degrees();
  for (int i = 0; i < n_; ++i) adj[i].reserve(d[i]);
  for (int i = 0; i < n_; ++i) {
    std::size_t p = pair_index(n_, i, i + 1);
    for (int j = i + 1; j < n_; ++j, ++p) {
      if ((bits_[p >> 6] >> (p & 63)) & 1u) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
    }
  }
  return adj;
}

Graph Graph::permuted(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != n_)
    throw std::domain_error("graph: permutation size mismatch");
  Graph out(n_);
  for (int i = 0; i < n_; ++i) {
    std::size_t p = pair_index(n_, i, i + 1);
    for (int j = i + 1; j < n_; ++j, ++p) {
      if ((bits_[p >> 6] >> (p & 63)) & 1u) out.set_edge(perm[i], perm[j], true);
    }
  }
  if (latents) {
    std::vector<double> xi(n_);
    for (int i = 0; i < n_; ++i) xi[perm[i]] = (*latents)[i];
    out.latents = std::move(xi);
  }
  return out;
}

void Graph::save_edge_list(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("graph: cannot write " + path);
  for (int i = 0; i < n_; ++i) {
    std::size_t p = pair_index(n_, i, i + 1);
    for (int j = i + 1; j < n_; ++j, ++p) {
      if ((bits_[p >> 6] >> (p & 63)) & 1u) out << i << ' ' << j << '\n';
    }
  }
}

Graph Graph::load_edge_list(const std::string& path, int n_hint) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("graph: cannot read " + path);
  std::vector<std::pair<int, int>> edges;
  int maxv = -1;
  long long a, b;
  while (in >> a >> b) {
    if (a < 0 || b < 0 || a == b)
      throw std::domain_error("graph: bad edge in " + path);
    edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
    maxv = std::max(maxv, static_cast<int>(std::max(a, b)));
  }
  const int n = std::max(n_hint, maxv + 1);
  if (n < 1) throw std::domain_error("graph: empty edge list and no node count");
  Graph g(n);
  for (auto [u, v] : edges) g.set_edge(u, v, true);
  return g;
}

}  // namespace graphent
