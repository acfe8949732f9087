#ifndef SPARSE_ERGM_TEST_ORACLE_HPP
#define SPARSE_ERGM_TEST_ORACLE_HPP

// Independent reference implementations used only by the tests. They share no
// code with the library beyond the Motif/WeightTable containers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "sparse_ergm/finner.hpp"
#include "sparse_ergm/hamiltonian.hpp"
#include "sparse_ergm/motif.hpp"
#include "sparse_ergm/weight_table.hpp"

namespace oracle {

using sparse_ergm::Motif;
using sparse_ergm::WeightTable;
using sparse_ergm::BinaryGraph;

/// Exhaustive sum over all n^v vertex maps (odometer), long double accumulation.
inline long double hom_sum(const Motif& f, const std::vector<std::vector<double>>& x) {
  const int n = static_cast<int>(x.size()), v = f.vertex_count();
  std::vector<int> map(v, 0);
  long double total = 0.0L;
  while (true) {
    long double prod = 1.0L;
    for (auto [a, b] : f.edges()) {
      prod *= x[map[a]][map[b]];
      if (prod == 0.0L) break;
    }
    total += prod;
    int k = 0;
    while (k < v && ++map[k] == n) map[k++] = 0;
    if (k == v) break;
  }
  return total;
}

inline std::vector<std::vector<double>> dense(const WeightTable& t) {
  std::vector<std::vector<double>> x(t.n(), std::vector<double>(t.n()));
  for (int i = 0; i < t.n(); ++i)
    for (int j = 0; j < t.n(); ++j) x[i][j] = t(i, j);
  return x;
}

inline std::vector<std::vector<double>> dense(const BinaryGraph& g) {
  std::vector<std::vector<double>> x(g.n(), std::vector<double>(g.n()));
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) x[i][j] = (i != j && g.has_edge(i, j)) ? 1.0 : 0.0;
  return x;
}

inline double hom_density(const Motif& f, const WeightTable& t, double scale = 1.0) {
  return static_cast<double>(hom_sum(f, dense(t)) /
                             (std::pow(static_cast<long double>(t.n()), f.vertex_count()) *
                              std::pow(static_cast<long double>(scale), f.edge_count())));
}

inline std::uint64_t hom_count(const Motif& f, const BinaryGraph& g) {
  return static_cast<std::uint64_t>(std::llround(static_cast<double>(hom_sum(f, dense(g)))));
}

/// Independent sets by brute force over all vertex subsets.
inline std::vector<std::uint64_t> indep_counts(const Motif& f) {
  const int v = f.vertex_count();
  std::vector<std::uint64_t> c(v + 1, 0);
  for (std::uint32_t s = 0; s < (1u << v); ++s) {
    bool ok = true;
    for (auto [a, b] : f.edges())
      if ((s >> a & 1u) && (s >> b & 1u)) ok = false;
    if (ok) ++c[std::popcount(s)];
  }
  while (c.size() > 1 && c.back() == 0) c.pop_back();
  return c;
}

inline double poly(const std::vector<std::uint64_t>& c, double x) {
  double y = 0, xp = 1;
  for (auto ci : c) {
    y += static_cast<double>(ci) * xp;
    xp *= x;
  }
  return y;
}

/// Minimal x >= 0 with poly(c, x) >= y, by plain bisection.
inline double poly_inverse(const std::vector<std::uint64_t>& c, double y) {
  if (y <= 1.0) return 0.0;
  double lo = 0, hi = 1;
  while (poly(c, hi) < y) hi *= 2;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (poly(c, mid) < y ? lo : hi) = mid;
  }
  return hi;
}

/// Planar problem by reduction to one dimension: for each a the cheapest
/// feasible b is max_k b_k(a); scan a densely and refine with ternary search
/// around the best grid cells.
struct PlanarOracle {
  struct Curve {
    std::vector<std::uint64_t> core;
    bool regular;
    int v;
    double target;
  };
  std::vector<Curve> curves;

  PlanarOracle(const std::vector<Motif>& family, const std::vector<double>& s) {
    for (std::size_t k = 0; k < family.size(); ++k) {
      const Motif& f = family[k];
      const int d = f.max_degree();
      std::vector<int> keep;
      for (int u = 0; u < f.vertex_count(); ++u)
        if (f.degree(u) == d) keep.push_back(u);
      curves.push_back({indep_counts(f.induced(keep)), f.is_regular(), f.vertex_count(), 1.0 + s[k]});
    }
  }

  double b_needed(double a) const {
    double b = 0;
    for (const auto& c : curves) {
      const double rest = c.target - (c.regular ? std::pow(a, 0.5 * c.v) : 0.0);
      b = std::max(b, poly_inverse(c.core, rest));
    }
    return b;
  }

  double objective(double a) const { return 0.5 * a + b_needed(a); }

  struct Result {
    double value, a, b;
  };

  Result solve(int grid = 20000) const {
    double a_max = 0;
    for (const auto& c : curves)
      if (c.regular) a_max = std::max(a_max, std::pow(c.target - 1.0, 2.0 / c.v));
    if (a_max == 0) return {objective(0), 0, b_needed(0)};
    std::vector<double> vals(grid + 1);
    for (int i = 0; i <= grid; ++i) vals[i] = objective(a_max * i / grid);
    std::vector<int> order(grid + 1);
    for (int i = 0; i <= grid; ++i) order[i] = i;
    std::partial_sort(order.begin(), order.begin() + 8, order.end(),
                      [&](int x, int y) { return vals[x] < vals[y]; });
    Result best{vals[order[0]], a_max * order[0] / grid, 0};
    for (int r = 0; r < 8; ++r) {
      double lo = a_max * std::max(0, order[r] - 1) / grid, hi = a_max * std::min(grid, order[r] + 1) / grid;
      for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        (objective(m1) <= objective(m2) ? hi : lo) = (objective(m1) <= objective(m2) ? m2 : m1);
      }
      for (double a : {lo, hi, a_max * order[r] / grid}) {
        const double v = objective(a);
        if (v < best.value) best = {v, a, 0};
      }
    }
    best.b = b_needed(best.a);
    return best;
  }
};

inline BinaryGraph random_graph(int n, double p, std::mt19937_64& rng) {
  BinaryGraph g(n);
  std::bernoulli_distribution coin(p);
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (coin(rng)) g.add_edge(i, j);
  return g;
}

inline WeightTable random_table(int n, std::mt19937_64& rng) {
  WeightTable t(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) t.set(i, j, u(rng));
  return t;
}

/// One representative per isomorphism class of graphs on v vertices with at
/// least one edge (canonical form: smallest edge mask over all relabelings).
inline std::vector<Motif> all_motifs(int v) {
  std::vector<std::pair<int, int>> pairs;
  std::vector<std::vector<int>> slot(v, std::vector<int>(v));
  for (int a = 0; a < v; ++a)
    for (int b = a + 1; b < v; ++b) {
      slot[a][b] = slot[b][a] = static_cast<int>(pairs.size());
      pairs.emplace_back(a, b);
    }
  std::vector<std::vector<int>> perms;
  std::vector<int> perm(v);
  for (int i = 0; i < v; ++i) perm[i] = i;
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
  std::vector<Motif> out;
  for (std::uint32_t s = 1; s < (1u << pairs.size()); ++s) {
    std::uint32_t canon = s;
    for (const auto& q : perms) {
      std::uint32_t t = 0;
      for (std::size_t k = 0; k < pairs.size(); ++k)
        if (s >> k & 1u) t |= 1u << slot[q[pairs[k].first]][q[pairs[k].second]];
      canon = std::min(canon, t);
    }
    if (canon != s) continue;
    std::vector<std::pair<int, int>> e;
    for (std::size_t k = 0; k < pairs.size(); ++k)
      if (s >> k & 1u) e.push_back(pairs[k]);
    out.emplace_back(v, e);
  }
  return out;
}

/// log E exp(r H) by direct summation over all graphs with brute-force densities.
inline double log_mgf(int n, double p, const sparse_ergm::HamiltonianSpec& spec) {
  const int pairs = n * (n - 1) / 2;
  const double r = n * n * std::pow(p, spec.family.max_degree) * std::log(1 / p);
  long double total = 0;
  for (std::uint64_t s = 0; s < (1ULL << pairs); ++s) {
    BinaryGraph g(n);
    int k = 0, e = 0;
    for (int i = 1; i < n; ++i)
      for (int j = 0; j < i; ++j, ++k)
        if ((s >> k) & 1) g.add_edge(i, j), ++e;
    std::vector<double> t;
    for (const auto& f : spec.family.motifs)
      t.push_back(static_cast<double>(hom_count(f, g)) / std::pow(n, f.vertex_count()) / std::pow(p, f.edge_count()));
    double h = 0;
    for (const auto& term : spec.terms) {
      const double d = t[term.k] - term.shift;
      if (d > 0) h += term.beta * std::pow(d, term.gamma);
    }
    total += std::pow((long double)p, e) * std::pow((long double)(1 - p), pairs - e) * std::exp((long double)(r * h));
  }
  return static_cast<double>(std::log(total));
}

/// Finner integral by enumeration over every coordinate.
inline double finner_integral(const sparse_ergm::finner::ProductInstance& inst) {
  const int nv = inst.vertex_count();
  std::vector<int> w(nv, 0);
  double total = 0;
  while (true) {
    double m = 1;
    for (int v = 0; v < nv; ++v) m *= inst.spaces[v][w[v]];
    for (std::size_t a = 0; a < inst.system.size(); ++a) {
      std::size_t idx = 0;
      for (int v : inst.system[a].vertices) idx = idx * inst.spaces[v].size() + w[v];
      m *= std::pow(inst.functions[a][idx], inst.system[a].lambda);
    }
    total += m;
    int v = nv - 1;
    while (v >= 0 && ++w[v] == static_cast<int>(inst.spaces[v].size())) w[v--] = 0;
    if (v < 0) break;
  }
  return total;
}

}  // namespace oracle

#endif
