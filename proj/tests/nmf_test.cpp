#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sparse_ergm/nmf.hpp"

using namespace sparse_ergm;

namespace {

HamiltonianSpec mixed_spec() {
  return {MotifFamily::make({cycle(3), star(2)}), {{0, 0.8, 1.0, 0.3}, {1, 0.5, 1.0, 0.4}}, false};
}

}  // namespace

TEST(Entropy, Examples) {
  EXPECT_EQ(entropy(WeightTable(10, 0.3), 0.3), 0.0);
  WeightTable one(2);
  one.set(1, 0, 1.0);
  EXPECT_NEAR(entropy(one, 0.5), std::log(2.0), 1e-15);
  EXPECT_NEAR(bernoulli_entropy(0.25, 0.5), 0.25 * std::log(0.5) + 0.75 * std::log(1.5), 1e-15);
  EXPECT_NEAR(bernoulli_entropy(0.0, 0.2), std::log(1 / 0.8), 1e-15);
  EXPECT_THROW(entropy(one, 1.0), DomainError);
  for (double q = 0.0; q <= 1.0; q += 0.05) EXPECT_GE(bernoulli_entropy(q, 0.3), 0.0);
}

TEST(CliqueHub, Sizes) {
  EXPECT_EQ(clique_hub_sizes(100, 0.1, 2, 4, 0), (std::pair<int, int>{20, 0}));
  EXPECT_EQ(clique_hub_sizes(100, 0.1, 2, 0, 30), (std::pair<int, int>{0, 30}));
  EXPECT_THROW(clique_hub_sizes(10, 0.5, 2, 400, 0), DomainError);
  const auto h = clique_hub(50, 0.2, 2, 0, 0);
  EXPECT_EQ(entropy(h.table(), 0.2), 0.0);
}

TEST(CliqueHub, TableMatchesDefinitionAndEntropy) {
  const auto h = clique_hub_of_sizes(12, 0.3, 4, 3);
  const auto t = h.table();
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) {
      const bool ci = i < 4, cj = j < 4, hi = i >= 4 && i < 7, hj = j >= 4 && j < 7;
      double want = i == j ? 0.0 : 0.3;
      if (i != j && ((ci && cj) || (hi != hj))) want = 1.0;
      EXPECT_EQ(t(i, j), want) << i << "," << j;
    }
  EXPECT_NEAR(h.entropy(), entropy(t, 0.3), 1e-12);
  EXPECT_NEAR(h.entropy(), (6 + 3 * 9) * std::log(1 / 0.3), 1e-12);
}

TEST(NmfGradient, MatchesFiniteDifferences) {
  const auto spec = mixed_spec();
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::uniform_int_distribution<int> vert(0, 7);
  for (int trial = 0; trial < 100; ++trial) {
    WeightTable q(8);
    for (int i = 1; i < 8; ++i)
      for (int j = 0; j < i; ++j) q.set(i, j, u(rng));
    int i = vert(rng), j = vert(rng);
    if (i == j) j = (i + 1) % 8;
    const RowMatrix g = nmf_gradient(spec, q, 0.3);
    const double h = 1e-6;
    WeightTable up = q, down = q;
    up.set(i, j, q(i, j) + h);
    down.set(i, j, q(i, j) - h);
    const double fd = (nmf_objective(spec, up, 0.3) - nmf_objective(spec, down, 0.3)) / (2 * h);
    EXPECT_NEAR(g(i, j), fd, 1e-4 * std::max(1.0, std::abs(fd)));
  }
}

TEST(Projection, Idempotent) {
  detail::Vec x(5);
  x << -1, 0.5, 2, 1e-12, 1;
  const auto once = detail::project(x, 1e-9, 1 - 1e-9);
  EXPECT_EQ(detail::project(once, 1e-9, 1 - 1e-9), once);
}

TEST(ProjectedAscent, ZeroIterationsKeepStart) {
  detail::Vec x0 = detail::Vec::Constant(3, 0.2);
  auto f = [](const detail::Vec& x) { return -x.squaredNorm(); };
  auto g = [](const detail::Vec& x) { return detail::Vec(-2 * x); };
  const auto r = detail::projected_ascent(f, g, x0, {0, 1e-9, 0, 1});
  EXPECT_EQ(r.x, x0);
  EXPECT_EQ(r.value, f(x0));
}

TEST(NmfSolve, EmptyHamiltonian) {
  const HamiltonianSpec spec{MotifFamily::make({cycle(3)}), {}, false};
  const auto r = nmf_solve(spec, 16, 0.2);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.q, WeightTable(16, 0.2));
}

TEST(NmfSolve, WitnessFloorCliquePhase) {
  const auto spec = edge_f_model(cycle(3), 1.0, 2.0).spec();
  const auto r = nmf_solve(spec, 64, 0.2);
  // |I| = floor((4 * 0.04)^{1/2} * 64) = 25
  const auto witness = clique_hub_of_sizes(64, 0.2, 25, 0);
  EXPECT_GE(r.value, nmf_objective(spec, witness.table(), 0.2));
  EXPECT_GE(r.value, r.witness_value);
  EXPECT_GE(r.value, r.constant_value);
  EXPECT_NEAR(r.value, nmf_objective(spec, r.q, 0.2), 1e-9 * std::abs(r.value));
}

TEST(NmfSolve, DeterministicForSeed) {
  const auto spec = mixed_spec();
  NmfOptions opt;
  opt.seed = 9;
  const auto a = nmf_solve(spec, 12, 0.3, opt), b = nmf_solve(spec, 12, 0.3, opt);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.q, b.q);
}

TEST(PhiNp, ZeroVector) {
  const std::vector<double> s{0.0};
  const auto r = phi_np_solve(MotifFamily::make({cycle(3)}), 20, 0.2, s);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.q, WeightTable(20, 0.2));
}

TEST(PhiNp, FeasibleAndBelowWitness) {
  const auto fam = MotifFamily::make({cycle(3)});
  for (double sv : {1.0, 8.0}) {
    const std::vector<double> s{sv};
    const auto r = phi_np_solve(fam, 32, 0.2, s);
    EXPECT_GE(hom_density(cycle(3), r.q, 0.2), (1 + sv) * (1 - 1e-6));
    EXPECT_LE(r.residuals[0], 1e-6);
    EXPECT_LE(r.value, r.witness_value);
    EXPECT_NEAR(r.value, entropy(r.q, 0.2), 1e-9 * r.value);
  }
}

TEST(PhiNp, MonotoneAlongChain) {
  const auto fam = MotifFamily::make({star(2), cycle(3)});
  PhiNpSolver solver(fam, 20, 0.25);
  double prev = 0.0;
  for (double t : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const std::vector<double> s{t, 2 * t};
    const auto r = solver.solve(s);
    EXPECT_GE(r.value, prev);
    prev = r.value;
  }
}

TEST(PhiNp, InfeasibleTargetIsReported) {
  const std::vector<double> s{1e9};
  EXPECT_THROW(phi_np_solve(MotifFamily::make({cycle(3)}), 8, 0.5, s), DomainError);
}

TEST(Stability, CliqueHubAtOptimizerHasZeroDistance) {
  const auto fam = MotifFamily::make({cycle(3)});
  const std::vector<double> s{8.0};
  const auto opt = phi_solve(fam, s).optimizers[0];
  const auto h = clique_hub(64, 0.25, 2, opt.a, opt.b);
  const auto rep = stability_probe(fam, h.table(), 0.25, s);
  EXPECT_EQ(rep.distance, 0.0);
  const std::vector<double> zero{0.0};
  EXPECT_EQ(stability_probe(fam, WeightTable(30, 0.25), 0.25, zero).distance, 0.0);
}

TEST(Stability, ProbeOnSolvedTable) {
  const auto fam = MotifFamily::make({cycle(3)});
  const std::vector<double> s{8.0};
  const auto r = phi_np_solve(fam, 64, 0.25, s);
  const auto rep = stability_probe(fam, r.q, 0.25, s);
  EXPECT_TRUE(std::isfinite(rep.distance));
  const auto sizes = clique_hub_sizes(64, 0.25, 2, rep.optimizer.a, rep.optimizer.b);
  EXPECT_EQ(rep.clique_size, sizes.first);
  EXPECT_EQ(rep.hub_size, sizes.second);
  RecordProperty("distance", std::to_string(rep.distance));
}
