#include "graphent/blockfit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "graphent/rng.hpp"

namespace graphent::blockfit {
namespace {

// Accept a move only when the gain clears this margin.  Genuine gains on
// graphs this library handles are far larger, while rounding noise in a
// delta built from ~2k table lookups stays well below it, so the margin
// keeps the ascent strictly increasing (hence terminating).
constexpr double kGainEps = 1e-7;

// x log x over the integers, table-backed below a size cap.
class XLogX {
 public:
  explicit XLogX(long long max_value) {
    if (max_value < kTableCap) {
      table_.resize(static_cast<std::size_t>(max_value) + 1);
      table_[0] = 0.0;
      for (std::size_t x = 1; x < table_.size(); ++x) {
        const double d = static_cast<double>(x);
        table_[x] = d * std::log(d);
      }
    }
  }

  double operator()(long long x) const {
    if (x <= 0) return 0.0;
    if (!table_.empty()) return table_[static_cast<std::size_t>(x)];
    const double d = static_cast<double>(x);
    return d * std::log(d);
  }

  // cell term L(m) + L(h-m) - L(h); zero pair count contributes nothing
  double cell(long long m, long long h) const {
    if (h <= 0) return 0.0;
    return (*this)(m) + (*this)(h - m) - (*this)(h);
  }

 private:
  static constexpr long long kTableCap = 1 << 23;  // 8M entries, 64 MB ceiling
  std::vector<double> table_;
};

inline long long pairs_of(long long h) { return h * (h - 1) / 2; }

struct FitState {
  int n = 0, k = 0;
  std::vector<int> z;
  std::vector<long long> h;
  std::vector<std::vector<long long>> m;  // full symmetric k x k
  std::vector<std::vector<int>> members;
  std::vector<int> pos_in_block;

  void build(const Graph& a, const std::vector<int>& labels, int kk) {
    n = a.n();
    k = kk;
    z = labels;
    h.assign(k, 0);
    m.assign(k, std::vector<long long>(k, 0));
    members.assign(k, {});
    pos_in_block.assign(n, -1);
    for (int i = 0; i < n; ++i) {
      ++h[z[i]];
      pos_in_block[i] = static_cast<int>(members[z[i]].size());
      members[z[i]].push_back(i);
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (a.edge(i, j)) {
          ++m[z[i]][z[j]];
          if (z[i] != z[j]) ++m[z[j]][z[i]];
        }
  }

  double likelihood(const XLogX& L) const {
    double acc = 0.0;
    for (int a = 0; a < k; ++a) {
      acc += L.cell(m[a][a], pairs_of(h[a]));
      for (int b = a + 1; b < k; ++b)
        acc += L.cell(m[a][b], h[a] * h[b]);
    }
    return acc;
  }

  // Gain of relabeling node i from its block a to block b, given e[c] =
  // number of i's neighbors currently in block c.
  double move_gain(int i, int b, const std::vector<long long>& e,
                   const XLogX& L) const {
    const int a = z[i];
    const long long ha = h[a], hb = h[b];
    double d = 0.0;
    for (int c = 0; c < k; ++c) {
      if (c == a || c == b) continue;
      const long long hc = h[c];
      d += L.cell(m[a][c] - e[c], (ha - 1) * hc) - L.cell(m[a][c], ha * hc);
      d += L.cell(m[b][c] + e[c], (hb + 1) * hc) - L.cell(m[b][c], hb * hc);
    }
    d += L.cell(m[a][a] - e[a], pairs_of(ha - 1)) - L.cell(m[a][a], pairs_of(ha));
    d += L.cell(m[b][b] + e[b], pairs_of(hb + 1)) - L.cell(m[b][b], pairs_of(hb));
    d += L.cell(m[a][b] + e[a] - e[b], (ha - 1) * (hb + 1)) -
         L.cell(m[a][b], ha * hb);
    return d;
  }

  void apply_move(int i, int b, const std::vector<long long>& e) {
    const int a = z[i];
    for (int c = 0; c < k; ++c) {
      if (c == a || c == b) continue;
      m[a][c] -= e[c];
      m[c][a] = m[a][c];
      m[b][c] += e[c];
      m[c][b] = m[b][c];
    }
    m[a][a] -= e[a];
    m[b][b] += e[b];
    m[a][b] += e[a] - e[b];
    m[b][a] = m[a][b];
    // membership bookkeeping: swap-remove from a, append to b
    const int pos = pos_in_block[i];
    const int last = members[a].back();
    members[a][pos] = last;
    pos_in_block[last] = pos;
    members[a].pop_back();
    pos_in_block[i] = static_cast<int>(members[b].size());
    members[b].push_back(i);
    --h[a];
    ++h[b];
    z[i] = b;
  }
};

void edges_to_blocks(const std::vector<std::vector<int>>& adj,
                     const std::vector<int>& z, int i, int k,
                     std::vector<long long>& e) {
  e.assign(k, 0);
  for (int j : adj[i]) ++e[z[j]];
}

BlockFit finalize(const Graph& a, const FitState& st, const XLogX& L,
                  bool converged, int restart_index) {
  BlockFit fit;
  fit.n = st.n;
  fit.k = st.k;
  fit.z = st.z;
  fit.block_sizes = st.h;
  fit.converged = converged;
  fit.degenerate = (st.k >= st.n);
  fit.restart_index = restart_index;
  fit.edge_counts.assign(st.k, std::vector<long long>(st.k, 0));
  fit.pair_counts.assign(st.k, std::vector<long long>(st.k, 0));
  fit.theta_hat.assign(st.k, std::vector<double>(st.k, 0.0));
  for (int p = 0; p < st.k; ++p)
    for (int q = 0; q < st.k; ++q) {
      fit.edge_counts[p][q] = st.m[p][q];
      fit.pair_counts[p][q] = (p == q) ? pairs_of(st.h[p]) : st.h[p] * st.h[q];
      fit.theta_hat[p][q] =
          fit.pair_counts[p][q] > 0
              ? static_cast<double>(fit.edge_counts[p][q]) /
                    static_cast<double>(fit.pair_counts[p][q])
              : 0.0;
    }
  fit.log_likelihood = st.likelihood(L);
  (void)a;
  return fit;
}

}  // namespace

BlockFit theta_mle(const Graph& a, const std::vector<int>& z, int k) {
  const int n = a.n();
  if (k < 1) throw std::domain_error("theta_mle: k must be positive");
  if (static_cast<int>(z.size()) != n)
    throw std::domain_error("theta_mle: label vector size mismatch");
  std::vector<long long> h(k, 0);
  for (int lbl : z) {
    if (lbl < 0 || lbl >= k) throw std::domain_error("theta_mle: label out of range");
    ++h[lbl];
  }
  for (long long v : h)
    if (v == 0) throw std::domain_error("theta_mle: empty block");
  FitState st;
  st.build(a, z, k);
  XLogX L(pairs_of(n));
  return finalize(a, st, L, true, 0);
}

BlockFit fit_labels(const Graph& a, int k, int restarts, std::uint64_t seed) {
  const int n = a.n();
  if (k < 1 || k > n)
    throw std::domain_error("fit_labels: k must lie in [1, n]");
  if (restarts < 1) throw std::domain_error("fit_labels: restarts must be >= 1");

  const XLogX L(pairs_of(n));
  const auto adj = a.adjacency_lists();
  const std::vector<int> deg = a.degrees();

  // degree-sorted node order, ties by index; restarts reshuffle inside ties
  std::vector<int> base_order(n);
  std::iota(base_order.begin(), base_order.end(), 0);
  std::stable_sort(base_order.begin(), base_order.end(),
                   [&](int x, int y) { return deg[x] < deg[y]; });

  BlockFit best;
  bool have_best = false;

  for (int r = 0; r < restarts; ++r) {
    std::vector<int> order = base_order;
    if (r > 0) {
      rng::Stream shuf(rng::derive(seed, static_cast<std::uint64_t>(r)));
      std::size_t lo = 0;
      while (lo < order.size()) {
        std::size_t hi = lo + 1;
        while (hi < order.size() && deg[order[hi]] == deg[order[lo]]) ++hi;
        for (std::size_t t = hi - 1; t > lo; --t) {
          const std::size_t s = lo + shuf.next_below(t - lo + 1);
          std::swap(order[t], order[s]);
        }
        lo = hi;
      }
    }

    // contiguous groups of near-equal size
    std::vector<int> z(n);
    const int q = n / k, rem = n % k;
    std::size_t at = 0;
    for (int b = 0; b < k; ++b) {
      const int size = q + (b < rem ? 1 : 0);
      for (int t = 0; t < size; ++t) z[order[at++]] = b;
    }

    FitState st;
    st.build(a, z, k);

    rng::Stream partner(rng::derive(seed, 0x70000000ULL + static_cast<std::uint64_t>(r)));
    std::vector<long long> e(k), e2(k);

    bool converged = false;
    for (int sweep = 0; sweep < 100; ++sweep) {
      bool moved = false;

      for (int i = 0; i < n; ++i) {
        const int from = st.z[i];
        if (st.h[from] <= 1) continue;  // blocks stay nonempty
        edges_to_blocks(adj, st.z, i, k, e);
        double best_gain = kGainEps;
        int best_to = -1;
        for (int b = 0; b < k; ++b) {
          if (b == from) continue;
          const double gain = st.move_gain(i, b, e, L);
          if (gain > best_gain) {
            best_gain = gain;
            best_to = b;
          }
        }
        if (best_to >= 0) {
          st.apply_move(i, best_to, e);
          moved = true;
        }
      }

      if (!moved) {
        // moves alone have stalled: try pairwise label swaps, a couple of
        // sampled partners from every other block
        for (int i = 0; i < n && k > 1; ++i) {
          const int from = st.z[i];
          edges_to_blocks(adj, st.z, i, k, e);
          for (int b = 0; b < k; ++b) {
            if (b == from || st.members[b].empty()) continue;
            for (int pick = 0; pick < 2; ++pick) {
              const int j = st.members[b][static_cast<std::size_t>(
                  partner.next_below(st.members[b].size()))];
              const double g1 = st.move_gain(i, b, e, L);
              st.apply_move(i, b, e);
              edges_to_blocks(adj, st.z, j, k, e2);
              const double g2 = st.move_gain(j, from, e2, L);
              if (g1 + g2 > kGainEps) {
                st.apply_move(j, from, e2);
                moved = true;
                edges_to_blocks(adj, st.z, i, k, e);
                break;  // i changed block; partner loop restarts naturally
              }
              // revert i's provisional move
              edges_to_blocks(adj, st.z, i, k, e2);
              st.apply_move(i, from, e2);
              edges_to_blocks(adj, st.z, i, k, e);
            }
            if (st.z[i] != from) break;
          }
        }
      }

      if (!moved) {
        converged = true;
        break;
      }
    }

    BlockFit fit = finalize(a, st, L, converged, r);
    if (!have_best || fit.log_likelihood > best.log_likelihood) {
      best = std::move(fit);
      have_best = true;
    }
  }
  return best;
}

int default_k(int n) {
  if (n < 1) throw std::domain_error("default_k: n must be positive");
  return std::max(1, static_cast<int>(std::llround(std::sqrt(static_cast<double>(n)))));
}

void save_labels_csv(const BlockFit& fit, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("blockfit: cannot write " + path);
  out << "node,label\n";
  for (int i = 0; i < fit.n; ++i) out << i << ',' << fit.z[i] + 1 << '\n';
}

void save_theta_matrix(const BlockFit& fit, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("blockfit: cannot write " + path);
  char buf[40];
  for (int a = 0; a < fit.k; ++a) {
    for (int b = 0; b < fit.k; ++b) {
      std::snprintf(buf, sizeof buf, "%.17g", fit.theta_hat[a][b]);
      if (b) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace graphent::blockfit
