#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "graphent/estimators.hpp"
#include "graphent/graphon.hpp"
#include "graphent/rng.hpp"
#include "graphent/sampler.hpp"

using namespace graphent;
using namespace graphent::estimators;

namespace {

Graph complete(int n) {
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.set_edge(i, j, true);
  return g;
}

Graph two_cliques(int half, int pad = 0) {
  Graph g(2 * half + pad);
  for (int i = 0; i < 2 * half; ++i)
    for (int j = i + 1; j < 2 * half; ++j)
      if ((i < half) == (j < half)) g.set_edge(i, j, true);
  return g;
}

}  // namespace

TEST_CASE("usvt basics: domain, empty graph, weak signal") {
  CHECK_THROWS_AS(usvt(Graph(1)), std::domain_error);
  CHECK_THROWS_AS(usvt(complete(8), 0.0), std::domain_error);
  CHECK_THROWS_AS(usvt(complete(8), 1.0), std::domain_error);

  const auto zero = usvt(Graph(12));
  CHECK(zero.n == 12);
  for (double v : zero.v) CHECK(v == 0.0);

  // a single edge cannot clear the threshold: everything truncates to zero
  Graph tiny(6);
  tiny.set_edge(0, 1, true);
  const auto weak = usvt(tiny);
  for (double v : weak.v) CHECK(v == 0.0);
  CHECK(entropy_lowrank(tiny).value == 0.0);
}

TEST_CASE("usvt on the complete graph recovers (n-1)/n") {
  for (int n : {40, 100}) {  // exercises the direct and the iterative path
    const auto p = usvt(complete(n));
    const double expect = (n - 1.0) / n;
    for (int i = 0; i < n; ++i) {
      CHECK(p(i, i) == 0.0);
      for (int j = 0; j < n; ++j)
        if (i != j) CHECK(p(i, j) == doctest::Approx(expect).epsilon(1e-8));
    }
    const auto e4 = entropy_lowrank(complete(n));
    CHECK(e4.estimator_id == "H4");
    CHECK_FALSE(e4.variance.has_value());
    const double target = (1.0 - 1.0 / n) * binary_entropy(expect);
    CHECK(e4.value == doctest::Approx(target).epsilon(1e-7));
  }
}

TEST_CASE("usvt output is a valid symmetric hollow probability matrix") {
  const auto spec = GraphonSpec::block({{0.8, 0.1}, {0.1, 0.8}}, {0.5, 0.5});
  const auto xi = sample_latents(120, 8ULL);
  const auto g = sample_graph(spec, xi, 9ULL);
  const auto p = usvt(g);
  REQUIRE(p.n == 120);
  for (int i = 0; i < p.n; ++i) {
    CHECK(p(i, i) == 0.0);
    for (int j = i + 1; j < p.n; ++j) {
      CHECK(p(i, j) == p(j, i));  // exact after symmetrization
      CHECK(p(i, j) >= 0.0);
      CHECK(p(i, j) <= 1.0);
    }
  }
}

TEST_CASE("usvt approximates a planted block matrix") {
  const auto spec = GraphonSpec::block({{0.8, 0.1}, {0.1, 0.8}}, {0.5, 0.5});
  const auto xi = sample_latents(150, 18ULL);
  const auto g = sample_graph(spec, xi, 19ULL);
  const auto p = usvt(g);
  double err = 0.0;
  int off = 0;
  for (int i = 0; i < p.n; ++i)
    for (int j = 0; j < p.n; ++j) {
      if (i == j) continue;
      const double truth = eval_graphon(spec, (*g.latents)[i], (*g.latents)[j]);
      err += std::fabs(p(i, j) - truth);
      ++off;
    }
  CHECK(err / off < 0.08);
}

TEST_CASE("direct and iterative eigensolvers agree across the size cutoff") {
  // same two-clique structure; one isolated pad node pushes the graph onto
  // the subspace-iteration path while barely moving the threshold
  const auto small = usvt(two_cliques(32));       // n = 64: direct path
  const auto padded = usvt(two_cliques(32, 1));   // n = 65: iterative path
  const double expect = 31.0 / 32.0;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      if (i == j) continue;
      const bool same = (i < 32) == (j < 32);
      CHECK(small(i, j) == doctest::Approx(same ? expect : 0.0).epsilon(1e-8));
      CHECK(std::fabs(small(i, j) - padded(i, j)) < 1e-7);
    }
  for (int j = 0; j < 65; ++j) CHECK(padded(64, j) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("usvt entropy is invariant under node relabeling") {
  const auto xi = sample_latents(120, 28ULL);
  const auto g = sample_graph(make_f1(), xi, 29ULL);
  std::vector<int> perm(120);
  for (int i = 0; i < 120; ++i) perm[i] = (49 * i + 3) % 120;  // 49 coprime to 120
  const Graph pg = g.permuted(perm);

  const auto a = usvt(g);
  const auto b = usvt(pg);
  double max_diff = 0.0;
  for (int i = 0; i < 120; ++i)
    for (int j = 0; j < 120; ++j)
      max_diff = std::max(max_diff,
                          std::fabs(a(i, j) - b(perm[i], perm[j])));
  CHECK(max_diff < 1e-9);
  CHECK(std::fabs(entropy_lowrank(g).value - entropy_lowrank(pg).value) < 1e-10);
}

TEST_CASE("H4 closes in on a low-rank graphon entropy") {
  std::vector<double> flat(65, 1.0), ramp(65);
  for (int i = 0; i < 65; ++i) ramp[i] = i / 64.0;
  const auto spec = GraphonSpec::low_rank({0.5, 0.3}, {flat, ramp});
  const double truth = graphon_entropy(spec);

  const int n = 400;
  const auto xi = sample_latents(n, 88ULL);
  const auto g = sample_graph(spec, xi, 89ULL);
  const auto e4 = entropy_lowrank(g);
  CHECK(std::fabs(e4.value - truth) < 0.05);
}
