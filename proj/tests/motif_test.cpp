#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "sparse_ergm/indep_poly.hpp"
#include "sparse_ergm/motif.hpp"

using namespace sparse_ergm;

TEST(Motif, RejectsMalformedEdges) {
  EXPECT_THROW(Motif(3, {{0, 3}}), DomainError);
  EXPECT_THROW(Motif(3, {{1, 1}}), DomainError);
  EXPECT_THROW(Motif(3, {{0, 1}, {1, 0}}), DomainError);
  EXPECT_THROW(Motif(0, {}), DomainError);
  EXPECT_THROW(Motif(40, {}), CapabilityError);
}

TEST(Motif, DerivedQuantities) {
  const Motif c3 = cycle(3), k12 = star(2), c4 = cycle(4);
  EXPECT_EQ(c3.max_degree(), 2);
  EXPECT_TRUE(c3.is_regular());
  EXPECT_FALSE(c3.is_bipartite());
  EXPECT_TRUE(c4.is_bipartite());
  EXPECT_FALSE(k12.is_regular());
  EXPECT_DOUBLE_EQ(c3.delta_star(), 2.0);
  EXPECT_DOUBLE_EQ(k12.delta_star(), 1.5);
  EXPECT_EQ(k12.core().vertex_count(), 1);
  EXPECT_EQ(c4.core().edge_count(), 4);
  EXPECT_FALSE(disjoint_union(c3, c3).is_connected());
}

TEST(Motif, DeltaStarBoundOnCorpus) {
  for (int v = 2; v <= 5; ++v)
    for (const Motif& f : oracle::all_motifs(v)) {
      const double ds = f.delta_star();
      EXPECT_LE(f.max_degree() + 1, 2 * ds + 1e-12);
      EXPECT_LE(2 * ds, 2 * f.max_degree() + 1e-12);
    }
}

TEST(Motif, BuiltinNames) {
  EXPECT_EQ(builtin_motif("C5").edge_count(), 5);
  EXPECT_EQ(builtin_motif("K13").vertex_count(), 4);
  EXPECT_EQ(builtin_motif("K4").edge_count(), 6);
  EXPECT_EQ(builtin_motif("K12").name(), "K12");
  EXPECT_THROW(builtin_motif("Q7"), DomainError);
}

TEST(Motif, Classification) {
  EXPECT_EQ(classify(cycle(5)), MotifShape::cycle);
  EXPECT_EQ(classify(star(3)), MotifShape::star);
  EXPECT_EQ(classify(clique(4)), MotifShape::clique);
  EXPECT_EQ(classify(path(4)), MotifShape::other);
  EXPECT_EQ(classify(Motif(2, {})), MotifShape::edgeless);
}

TEST(MotifFamily, MixedDegreeNeedsOverride) {
  EXPECT_THROW(MotifFamily::make({cycle(3), star(3)}), DomainError);
  const auto fam = MotifFamily::make({cycle(3), star(3)}, true);
  EXPECT_EQ(fam.max_degree, 3);
  EXPECT_EQ(fam.warnings.size(), 1u);
  EXPECT_EQ(MotifFamily::make({star(2), cycle(3), cycle(4)}).max_degree, 2);
  EXPECT_THROW(MotifFamily::make({}), DomainError);
}

TEST(IndepPoly, KnownPolynomials) {
  EXPECT_EQ(indep_poly(cycle(3)).coefficients(), (std::vector<std::uint64_t>{1, 3}));
  EXPECT_EQ(indep_poly(cycle(4)).coefficients(), (std::vector<std::uint64_t>{1, 4, 2}));
  EXPECT_EQ(indep_poly(Motif(1, {})).coefficients(), (std::vector<std::uint64_t>{1, 1}));
}

TEST(IndepPoly, MatchesSubsetEnumeration) {
  for (int v = 2; v <= 5; ++v)
    for (const Motif& f : oracle::all_motifs(v)) {
      const auto p = indep_poly(f);
      EXPECT_EQ(p.coefficients(), oracle::indep_counts(f));
      EXPECT_EQ(p.coefficients()[1], static_cast<std::uint64_t>(v));
      const auto star_poly = indep_poly(f.core());
      EXPECT_LE(star_poly.degree(), f.edge_count() / f.max_degree());
    }
}

TEST(IndepPoly, RejectsBadCoefficients) {
  EXPECT_THROW(IndepPoly({2, 1}), DomainError);
  EXPECT_THROW(IndepPoly(std::vector<std::uint64_t>{}), DomainError);
}

TEST(TPlanar, Formulas) {
  const double a = 0.7, b = 1.3;
  EXPECT_DOUBLE_EQ(t_planar(star(2), a, b), 1 + b);
  EXPECT_NEAR(t_planar(cycle(3), a, b), 1 + 3 * b + std::pow(a, 1.5), 1e-14);
  EXPECT_NEAR(t_planar(cycle(4), a, b), 1 + 4 * b + 2 * b * b + a * a, 1e-14);
  for (const char* name : {"C3", "C4", "C5", "K12", "K13", "K4"})
    EXPECT_DOUBLE_EQ(t_planar(builtin_motif(name), 0, 0), 1.0);
  EXPECT_THROW(t_planar(cycle(3), -1, 0), DomainError);
}

TEST(TPlanar, Monotone) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 5);
  for (const char* name : {"C3", "C4", "C5", "K12", "K13", "K4"}) {
    const Motif f = builtin_motif(name);
    for (int i = 0; i < 200; ++i) {
      const double a = u(rng), b = u(rng);
      EXPECT_LE(t_planar(f, a, b), t_planar(f, a + u(rng), b + u(rng)));
    }
  }
}

TEST(Rate, Values) {
  EXPECT_NEAR(rate(100, 0.1, 2), 100.0 * 100 * 0.01 * std::log(10.0), 1e-9);
  EXPECT_NEAR(rate(1, 0.5, 2), 0.25 * std::log(2.0), 1e-15);
  EXPECT_NEAR(rate(10, std::exp(-1.0), 2), 100 * std::exp(-2.0), 1e-12);
  EXPECT_THROW(rate(10, 1.0, 2), DomainError);
  EXPECT_THROW(rate(0, 0.5, 2), DomainError);
}
