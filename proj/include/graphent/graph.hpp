#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Simple undirected graph stored as a packed upper-triangle bitset.
// Pair (i,j) with i < j lives at bit i*n - i(i+1)/2 + (j-i-1); an n = 1000
// graph occupies ~62 KB, so Monte-Carlo sweeps stay cache-resident.

namespace graphent {

class Graph {
 public:
  explicit Graph(int n);

  int n() const { return n_; }

  bool edge(int i, int j) const;
  void set_edge(int i, int j, bool present);

  std::size_t edge_count() const;
  std::vector<int> degrees() const;

  // Neighbor lists, handy for fitting loops (built on demand).
  std::vector<std::vector<int>> adjacency_lists() const;

  // Copy with node i renamed perm[i].
  Graph permuted(const std::vector<int>& perm) const;

  static std::size_t pair_index(int n, int i, int j);

  // One "i j" pair per line, 0-indexed.
  void save_edge_list(const std::string& path) const;
  // n is taken from the largest endpoint + 1 unless a larger n is given.
  static Graph load_edge_list(const std::string& path, int n_hint = 0);

  // The latent coordinates used to generate the graph, when known.
  std::optional<std::vector<double>> latents;

 private:
  int n_;
  std::vector<std::uint64_t> bits_;
};

}  // namespace graphent
