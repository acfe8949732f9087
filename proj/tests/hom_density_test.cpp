#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracle.hpp"
#include "sparse_ergm/hom_density.hpp"

using namespace sparse_ergm;

namespace {

Motif relabel_randomly(const Motif& f, std::mt19937_64& rng) {
  std::vector<int> perm(f.vertex_count());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  return f.relabeled(perm);
}

}  // namespace

TEST(HomDensity, SingleEdgeIsMeanEntry) {
  WeightTable x(3, 1.0);
  EXPECT_NEAR(hom_density(star(1), x), 6.0 / 9.0, 1e-15);
}

TEST(HomDensity, TriangleInK4) {
  BinaryGraph g(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j) g.add_edge(i, j);
  EXPECT_NEAR(hom_density(cycle(3), g), 24.0 / 64.0, 1e-15);
  EXPECT_NEAR(hom_density(cycle(3), g.to_table()), 24.0 / 64.0, 1e-15);
}

TEST(HomDensity, ConstantTableTriangle) {
  for (int n : {3, 5, 10, 40}) {
    const double p = 0.3;
    WeightTable x(n, p);
    const double expect = static_cast<double>(n) * (n - 1) * (n - 2) / std::pow(n, 3);
    EXPECT_NEAR(hom_density(cycle(3), x, p), expect, 1e-12 * expect);
  }
}

TEST(HomDensity, MatchesExhaustiveOnWeightedTables) {
  std::mt19937_64 rng(11);
  for (const char* name : {"C3", "C4", "C5", "K12", "K13", "K4"}) {
    const Motif f = builtin_motif(name);
    for (int n : {2, 5, 8}) {
      const auto x = oracle::random_table(n, rng);
      const double want = oracle::hom_density(f, x, 0.5);
      for (auto alg : {HomAlgorithm::automatic, HomAlgorithm::generic})
        EXPECT_NEAR(hom_density(f, x, 0.5, alg), want, 1e-12 * std::max(1.0, want)) << name << " n=" << n;
    }
  }
  const Motif odd(5, {{0, 1}, {1, 2}, {2, 3}, {1, 3}, {3, 4}});
  const auto x = oracle::random_table(7, rng);
  EXPECT_NEAR(hom_density(odd, x), oracle::hom_density(odd, x), 1e-13);
}

TEST(HomDensity, FastPathsAgreeWithExhaustiveCounts) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> size(2, 10);
  std::uniform_real_distribution<double> dens(0.1, 0.9);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = oracle::random_graph(size(rng), dens(rng), rng);
    for (const char* name : {"C3", "C4", "C5", "K12", "K13", "K4"}) {
      const Motif f = builtin_motif(name);
      const auto want = static_cast<double>(oracle::hom_count(f, g));
      EXPECT_EQ(hom_count(f, g), want) << name;
      EXPECT_EQ(hom_count(f, g, HomAlgorithm::generic), want) << name;
      EXPECT_EQ(hom_sum(f, g.to_table()), want) << name;
    }
  }
}

TEST(HomDensity, AllSmallMotifsExact) {
  std::mt19937_64 rng(13);
  std::vector<Motif> corpus;
  for (int v = 2; v <= 4; ++v)
    for (auto& f : oracle::all_motifs(v)) corpus.push_back(f);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = oracle::random_graph(7, 0.5, rng);
    for (const Motif& f : corpus) EXPECT_EQ(hom_count(f, g), static_cast<double>(oracle::hom_count(f, g)));
  }
}

TEST(HomDensity, IsomorphismInvariance) {
  std::mt19937_64 rng(14);
  const auto x = oracle::random_table(9, rng);
  const Motif f(5, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}});
  const double base = hom_density(f, x);
  for (int i = 0; i < 50; ++i) EXPECT_NEAR(hom_density(relabel_randomly(f, rng), x), base, 1e-12 * base);
}

TEST(HomDensity, Multiplicativity) {
  std::mt19937_64 rng(15);
  const auto x = oracle::random_table(12, rng);
  const Motif a = cycle(3), b = star(2);
  const double joint = hom_density(disjoint_union(a, b), x, 0.7);
  EXPECT_NEAR(joint, hom_density(a, x, 0.7) * hom_density(b, x, 0.7), 1e-10);
}

TEST(HomDensity, LimitsRaiseCapabilityErrors) {
  BinaryGraph g(20);
  const Motif big(9, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {7, 8}, {8, 0}, {0, 4}});
  EXPECT_THROW(hom_density(big, g), CapabilityError);
  EXPECT_THROW(hom_density(cycle(3), g, 0.0), DomainError);
  // A long cycle still works through the trace fast path.
  EXPECT_EQ(hom_density(cycle(12), g), 0.0);
}

TEST(HomDelta, SpecExamples) {
  BinaryGraph empty(4);
  EXPECT_NEAR(hom_density_delta(star(1), empty, 0, 1, 1.0), 2.0 / 16.0, 1e-15);
  EXPECT_EQ(hom_density_delta(cycle(3), empty, 0, 1, 1.0), 0.0);
  BinaryGraph path3(4);
  path3.add_edge(0, 1);
  path3.add_edge(1, 2);
  EXPECT_NEAR(hom_density_delta(cycle(3), path3, 0, 2, 1.0), 6.0 / 64.0, 1e-15);
}

TEST(HomDelta, MatchesFullRecomputation) {
  std::mt19937_64 rng(16);
  std::vector<Motif> motifs{cycle(3), cycle(4), cycle(5), star(2), star(3), clique(4), path(4),
                            disjoint_union(cycle(3), star(1)), Motif(4, {{0, 1}, {1, 2}, {2, 0}, {2, 3}})};
  auto g = oracle::random_graph(12, 0.4, rng);
  std::uniform_int_distribution<int> vert(0, 11);
  for (int step = 0; step < 200; ++step) {
    int i = vert(rng), j = vert(rng);
    if (i == j) continue;
    for (const Motif& f : motifs) {
      BinaryGraph with = g, without = g;
      with.add_edge(i, j);
      without.remove_edge(i, j);
      const double want = hom_density(f, with, 0.4) - hom_density(f, without, 0.4);
      EXPECT_NEAR(hom_density_delta(f, g, i, j, 0.4), want, 1e-10 * std::max(1.0, std::abs(want)));
    }
    g.has_edge(i, j) ? g.remove_edge(i, j) : g.add_edge(i, j);
  }
}

TEST(HomGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(17);
  const auto x = oracle::random_table(6, rng);
  for (const Motif& f : {cycle(3), cycle(4), star(2), star(3), path(4), clique(4), disjoint_union(cycle(3), star(1))}) {
    const RowMatrix g = hom_density_gradient(f, x, 0.5);
    for (int i = 1; i < 6; ++i)
      for (int j = 0; j < i; ++j) {
        const double h = 1e-6;
        WeightTable up = x, down = x;
        up.set(i, j, x(i, j) + h);
        down.set(i, j, x(i, j) - h);
        const double fd = (hom_density(f, up, 0.5) - hom_density(f, down, 0.5)) / (2 * h);
        EXPECT_NEAR(g(i, j), fd, 1e-5 * std::max(1.0, std::abs(fd))) << f.edge_count() << " " << i << j;
        EXPECT_EQ(g(i, j), g(j, i));
      }
  }
}
