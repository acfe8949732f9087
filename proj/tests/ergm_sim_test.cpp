#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "oracle.hpp"
#include "sparse_ergm/ergm_sim.hpp"

using namespace sparse_ergm;

namespace {

HamiltonianSpec triangle_spec(double gamma, double beta) {
  if (beta == 0.0) return {MotifFamily::make({cycle(3)}), {}};
  return edge_f_model(cycle(3), gamma, beta).spec();
}

HamiltonianSpec null_spec() { return {MotifFamily::make({cycle(3)}), {}}; }

double exact_norm(const RowMatrix& m) {
  Eigen::SelfAdjointEigenSolver<RowMatrix> es(m);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Glauber, NullHamiltonianAcceptsWithProbabilityP) {
  const ErgmModel m(12, 0.3, null_spec());
  std::mt19937_64 rng(5);
  BinaryGraph g = oracle::random_graph(12, 0.4, rng);
  for (int i = 1; i < 12; ++i)
    for (int j = 0; j < i; ++j) {
      BinaryGraph a = g;
      a.remove_edge(i, j);
      EXPECT_EQ(edge_conditional(m, a, i, j, m.densities(a)).probability, 0.3);
    }
}

TEST(Glauber, SaturatesForLargeBeta) {
  const ErgmModel m(10, 0.2, triangle_spec(1.0, 1e8));
  std::mt19937_64 rng(2);
  BinaryGraph g = oracle::random_graph(10, 0.9, rng);
  int checked = 0;
  for (int i = 1; i < 10; ++i)
    for (int j = 0; j < i; ++j) {
      BinaryGraph a = g;
      a.remove_edge(i, j);
      const auto u = edge_conditional(m, a, i, j, m.densities(a));
      if (m.hamiltonian(u.t_with) > m.hamiltonian(u.t_without)) {
        EXPECT_EQ(u.probability, 1.0);
        ++checked;
      }
    }
  EXPECT_GT(checked, 0);
}

TEST(Glauber, LogisticIsStable) {
  EXPECT_EQ(logistic(800.0), 1.0);
  EXPECT_EQ(logistic(-800.0), 0.0);
  EXPECT_NEAR(logistic(0.3) + logistic(-0.3), 1.0, 1e-16);
}

TEST(Glauber, PairIndexRoundTrip) {
  std::int64_t k = 0;
  for (int i = 1; i < 300; ++i)
    for (int j = 0; j < i; ++j, ++k) EXPECT_EQ(pair_of_index(k), std::make_pair(i, j));
}

TEST(Glauber, KernelIsStationaryAndReversible) {
  for (double p : {0.3, 0.5})
    for (double beta : {0.0, 1.0}) {
      const ErgmModel m(4, p, triangle_spec(1.0, beta));
      const auto ex = exact_enumerate(m);
      const RowMatrix k = glauber_kernel(m);
      ASSERT_EQ(k.rows(), 64);
      Eigen::RowVectorXd nu = Eigen::Map<const Eigen::RowVectorXd>(ex.probabilities.data(), 64);
      EXPECT_LE((nu * k - nu).cwiseAbs().maxCoeff(), 1e-12);
      for (int s = 0; s < 64; ++s) {
        EXPECT_NEAR(k.row(s).sum(), 1.0, 1e-14);
        for (int t = 0; t < 64; ++t) EXPECT_NEAR(nu[s] * k(s, t), nu[t] * k(t, s), 1e-13);
      }
    }
}

TEST(Exact, NullHamiltonianHasZeroLogMgf) {
  for (int n : {2, 3, 4, 5}) {
    const auto ex = exact_enumerate(ErgmModel(n, 0.37, null_spec()));
    EXPECT_EQ(ex.log_mgf, 0.0);
    EXPECT_NEAR(ex.log_z, -(n * (n - 1) / 2) * std::log(1 - 0.37), 1e-12);
  }
}

TEST(Exact, TwoVerticesCannotHoldTriangles) {
  EXPECT_EQ(exact_enumerate(ErgmModel(2, 0.4, triangle_spec(1.0, 3.0))).log_mgf, 0.0);
}

TEST(Exact, MatchesDirectSummation) {
  const auto spec = triangle_spec(1.0, 0.5);
  const auto ex = exact_enumerate(ErgmModel(4, 0.3, spec));
  EXPECT_NEAR(ex.log_mgf, oracle::log_mgf(4, 0.3, spec), 1e-10);
  double total = 0;
  for (double q : ex.probabilities) total += q;
  EXPECT_NEAR(total, 1.0, 1e-14);
  const auto spec2 = triangle_spec(1.5, 2.0);
  EXPECT_NEAR(exact_enumerate(ErgmModel(5, 0.45, spec2)).log_mgf, oracle::log_mgf(5, 0.45, spec2), 1e-10);
}

TEST(Exact, RejectsLargeN) { EXPECT_THROW(exact_enumerate(ErgmModel(7, 0.3, null_spec())), CapabilityError); }

TEST(Chain, ReachesExactLawInTotalVariation) {
  const ErgmModel m(4, 0.5, triangle_spec(1.0, 1.0));
  const auto ex = exact_enumerate(m);
  for (std::uint64_t seed : {1, 2, 3}) {
    ErgmChain chain(m, BinaryGraph(4), seed);
    std::vector<double> hist(64, 0.0);
    const int steps = 1000000;
    for (int s = 0; s < steps; ++s) {
      chain.step();
      hist[mask_of_graph(chain.graph())] += 1.0 / steps;
    }
    double tv = 0;
    for (int s = 0; s < 64; ++s) tv += 0.5 * std::abs(hist[s] - ex.probabilities[s]);
    EXPECT_LT(tv, 0.05) << "seed " << seed;
  }
}

TEST(Chain, CacheMatchesRecount) {
  HamiltonianSpec spec{MotifFamily::make({star(2), cycle(3), cycle(4)}), {{1, 1.0, 1.0, 0.5}, {2, 0.5, 1.0, 0.3}}};
  const ErgmModel m(30, 0.2, spec);
  std::mt19937_64 rng(9);
  ErgmChain chain(m, oracle::random_graph(30, 0.2, rng), 4);
  for (int s = 0; s < 10000; ++s) chain.step();
  const auto fresh = m.densities(chain.graph());
  for (std::size_t k = 0; k < fresh.size(); ++k)
    EXPECT_NEAR(chain.densities()[k], fresh[k], 1e-8 * std::max(1.0, fresh[k]));
  EXPECT_LE(chain.drift(), 1e-8);
}

TEST(Chain, IsDeterministicPerSeed) {
  const ErgmModel m(16, 0.3, triangle_spec(1.0, 1.0));
  ErgmChain a(m, BinaryGraph(16), 11, 3), b(m, BinaryGraph(16), 11, 3), c(m, BinaryGraph(16), 11, 4);
  for (int s = 0; s < 5; ++s) a.sweep(), b.sweep(), c.sweep();
  EXPECT_EQ(a.graph(), b.graph());
  EXPECT_NE(a.graph(), c.graph());
  EXPECT_EQ(a.rng_position(), 2 * 5 * pair_count(16));
}

TEST(Generators, ErdosRenyiDensity) {
  CounterRng rng(3);
  const auto g = erdos_renyi(2000, 0.05, rng);
  const double expected = 0.05 * pair_count(2000), sd = std::sqrt(expected * 0.95);
  EXPECT_NEAR(g.edge_count(), expected, 5 * sd);
  EXPECT_EQ(erdos_renyi(10, 1.0, rng).edge_count(), 45);
  EXPECT_EQ(erdos_renyi(10, 0.0, rng).edge_count(), 0);
}

TEST(Spectral, ClosedForms) {
  const WeightTable q(12, 0.3);
  EXPECT_NEAR(spectral_distance(q, q).norm, 0.0, 1e-15);
  EXPECT_NEAR(spectral_distance(WeightTable(12, 1.0), WeightTable(12, 0.0)).norm, 11.0, 1e-9);
  WeightTable g = q;
  g.set(3, 7, 1.0);
  EXPECT_NEAR(spectral_distance(g, q).norm, 0.7, 1e-9);
}

TEST(Spectral, MatchesEigenSolver) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 8 + trial * 3;
    const auto g = oracle::random_graph(n, 0.3, rng).to_table();
    const auto q = oracle::random_table(n, rng);
    const double want = exact_norm(g.matrix() - q.matrix());
    EXPECT_NEAR(spectral_distance(g, q).norm, want, 1e-6 * want);
  }
}

TEST(Spectral, StructuredMatchesDense) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 40;
    const auto g = oracle::random_graph(n, 0.2, rng);
    CliqueHub h{n, 0.2, {0, 3, 5, 8, 9}, {1, 2}};
    const auto dense = spectral_distance(g.to_table(), h.table());
    const auto fast = spectral_distance(g, h);
    EXPECT_NEAR(fast.norm, dense.norm, 1e-9 * dense.norm);
    EXPECT_NEAR(fast.norm, exact_norm(g.to_table().matrix() - h.table().matrix()), 1e-6 * fast.norm);
  }
}

TEST(Detect, ExactPlantedStructure) {
  const int n = 200;
  std::vector<int> clique, hub = {3, 77, 150};
  for (int v = 10; v < 50; ++v) clique.push_back(v);
  BinaryGraph planted(n);
  for (std::size_t x = 0; x < clique.size(); ++x)
    for (std::size_t y = 0; y < x; ++y) planted.add_edge(clique[x], clique[y]);
  for (int j : hub)
    for (int v = 0; v < n; ++v)
      if (v != j && std::find(hub.begin(), hub.end(), v) == hub.end()) planted.add_edge(j, v);
  const auto rep = detect_structure(planted, 0.05, 2);
  EXPECT_EQ(rep.clique, clique);
  EXPECT_EQ(rep.hub, hub);
  EXPECT_EQ(rep.xi1, 0.0);
  ASSERT_TRUE(rep.xi2.has_value());
  for (const auto& d : rep.discrepancies) EXPECT_TRUE(d.holds) << d.kind;
}

TEST(Detect, ErdosRenyiTriggersNothing) {
  int clean = 0;
  for (int run = 0; run < 20; ++run) {
    CounterRng rng(100, run);
    const auto g = erdos_renyi(2000, 0.05, rng);
    DetectOptions opt;
    opt.spectral = false;
    const auto rep = detect_structure(g, 0.05, 2, opt);
    if (rep.hub.empty() && rep.clique.size() < 2) ++clean;
  }
  EXPECT_GE(clean, 19);
}

TEST(Detect, RecoversPlantedCliqueAndHub) {
  std::vector<int> clique, hub;
  for (int v = 0; v < 200; ++v) clique.push_back(3 * v + 1);
  for (int v = 0; v < 20; ++v) hub.push_back(3 * v + 2);
  int good = 0;
  for (int run = 0; run < 20; ++run) {
    CounterRng rng(200, run);
    const auto g = planted_graph(2000, 0.05, clique, hub, rng);
    DetectOptions opt;
    opt.spectral = false;
    const auto rep = detect_structure(g, 0.05, 2, opt);
    int hit = 0;
    for (int v : rep.clique) hit += std::binary_search(clique.begin(), clique.end(), v);
    if (hit >= 180 && rep.hub == hub) ++good;
  }
  EXPECT_GE(good, 19);
}

TEST(Detect, HintsAlignWitnessSizes) {
  std::vector<int> clique, hub = {5};
  for (int v = 20; v < 60; ++v) clique.push_back(v);
  CounterRng rng(7);
  const auto g = planted_graph(400, 0.05, clique, hub, rng);
  DetectOptions opt;
  // a and b such that the floor sizes are 30 and 2.
  opt.a_hint = std::pow(30.5 / 400, 2) / std::pow(0.05, 2);
  opt.b_hint = 2.5 / (400 * 0.0025);
  const auto rep = detect_structure(g, 0.05, 2, opt);
  EXPECT_EQ(rep.witness_clique.size(), 30u);
  EXPECT_EQ(rep.witness_hub.size(), 2u);
  EXPECT_EQ(rep.clique.size(), 40u);
}

TEST(Certificates, ContainmentOnRandomFixtures) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(0, 1);
  int informative = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 30 + static_cast<int>(unit(rng) * 50);
    const double p = 0.1 + 0.3 * unit(rng);
    const int ni = 2 + static_cast<int>(unit(rng) * n / 4), nj = static_cast<int>(unit(rng) * 4);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> clique(perm.begin(), perm.begin() + ni), hub(perm.begin() + ni, perm.begin() + ni + nj);
    CounterRng cr(trial);
    BinaryGraph g = planted_graph(n, p, clique, hub, cr);
    const double flip = 0.2 * unit(rng);  // knock out planted edges
    for (int i = 1; i < n; ++i)
      for (int j = 0; j < i; ++j)
        if (g.has_edge(i, j) && unit(rng) < flip) g.remove_edge(i, j);
    DetectOptions opt;
    const double pd = p * p;
    opt.a_hint = std::pow((ni + 0.5) / n, 2) / pd;
    opt.b_hint = (nj + 0.5) / (n * pd);
    const auto rep = detect_structure(g, p, 2, opt);
    ASSERT_TRUE(rep.xi2.has_value());
    EXPECT_GE(*rep.xi2, 0.0);
    // Certificate uses the exact norm too, so power-iteration error is visible.
    const double exact = exact_norm(g.to_table().matrix() - CliqueHub{n, p, rep.witness_clique, rep.witness_hub}.table().matrix());
    EXPECT_NEAR(rep.spectral_norm, exact, 1e-6 * exact);
    for (double scale : {0.5, 0.9, 1.0 + 1e-6, 1.1, 2.0, 5.0}) {
      const double xi = *rep.xi2 * scale;
      if (*rep.xi2 < xi) ++informative;
      EXPECT_TRUE(rep.containment_holds(xi)) << "trial " << trial;
    }
    for (const auto& d : rep.discrepancies) EXPECT_TRUE(d.holds) << d.kind << " trial " << trial;
  }
  EXPECT_GT(informative, 300);
}

TEST(Experiment, NullModelEdgeDensity) {
  ExperimentConfig cfg;
  cfg.n = 256;
  cfg.p = 0.1;
  cfg.spec = null_spec();
  cfg.sweeps = 120;
  cfg.burnin = 20;
  cfg.chains = 2;
  cfg.seed = 7;
  const auto res = run_experiment(cfg);
  ASSERT_EQ(res.chains.size(), 2u);
  for (const auto& c : res.chains) {
    EXPECT_LT(std::abs(c.mean_edge_density - 0.1), 3 * c.edge_density_stderr);
    EXPECT_LE(c.max_drift, 1e-8);
  }
  EXPECT_EQ(res.rows.size(), 200u);
  EXPECT_EQ(res.rows.front().chain, 0);
  EXPECT_EQ(res.rows.back().chain, 1);
  const auto again = run_experiment(cfg);
  EXPECT_EQ(again.final_graphs, res.final_graphs);
}

TEST(Experiment, RejectsBadConfig) {
  ExperimentConfig cfg;
  cfg.spec = null_spec();
  cfg.sweeps = 0;
  EXPECT_THROW(run_experiment(cfg), ConfigError);
  cfg.sweeps = 10;
  cfg.p = 1.5;
  EXPECT_THROW(run_experiment(cfg), ConfigError);
  cfg.p = 0.1;
  cfg.burnin = 10;
  EXPECT_THROW(run_experiment(cfg), ConfigError);
}

TEST(Experiment, TargetsFromFreeEnergyOptimizers) {
  ExperimentConfig cfg;
  cfg.n = 40;
  cfg.p = 0.1;
  cfg.spec = triangle_spec(1.0, 3.0);
  cfg.sweeps = 3;
  cfg.detect = true;
  const auto res = run_experiment(cfg);
  ASSERT_EQ(res.targets.size(), 1u);
  EXPECT_NEAR(res.targets[0].optimizer.a, 9.0, 1e-6);
  EXPECT_EQ(res.targets[0].clique, static_cast<int>(std::floor(std::sqrt(9 * 0.01) * 40)));
}
