#ifndef SPARSE_ERGM_HOM_DENSITY_HPP
#define SPARSE_ERGM_HOM_DENSITY_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sparse_ergm/errors.hpp"
#include "sparse_ergm/motif.hpp"
#include "sparse_ergm/weight_table.hpp"

namespace sparse_ergm {

enum class HomAlgorithm { automatic, cycle, star, clique, generic };

/// Limits of the generic backtracking path.
struct HomLimits {
  int max_vertices = 8;
  double max_work = 1e10;  // n^v(F) for weighted tables, n * maxdeg^(v-1) for graphs
};

namespace detail {

/// Neumaier compensated accumulator.
class CompensatedSum {
public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      carry_ += (sum_ - t) + x;
    else
      carry_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + carry_; }

private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Vertex order in which each new vertex has as many already-placed neighbors
/// as possible; back[k] lists the placed neighbors of order[k].
struct BacktrackPlan {
  std::vector<int> order;
  std::vector<std::vector<int>> back;  // positions in `order`
};

inline BacktrackPlan make_plan(const Motif& f, std::vector<int> pinned = {}) {
  const int v = f.vertex_count();
  BacktrackPlan plan;
  std::vector<char> placed(v, 0);
  plan.order = pinned;
  for (int p : pinned) placed[p] = 1;
  while (static_cast<int>(plan.order.size()) < v) {
    int best = -1, best_back = -1, best_deg = -1;
    for (int u = 0; u < v; ++u) {
      if (placed[u]) continue;
      int nb = 0;
      for (int w : plan.order) nb += f.adjacent(u, w);
      if (nb > best_back || (nb == best_back && f.degree(u) > best_deg)) {
        best = u;
        best_back = nb;
        best_deg = f.degree(u);
      }
    }
    placed[best] = 1;
    plan.order.push_back(best);
  }
  plan.back.resize(v);
  for (int k = 0; k < v; ++k)
    for (int l = 0; l < k; ++l)
      if (f.adjacent(plan.order[k], plan.order[l])) plan.back[k].push_back(l);
  return plan;
}

inline void check_generic_limits(const Motif& f, double work, const HomLimits& limits) {
  if (f.vertex_count() > limits.max_vertices)
    throw CapabilityError("homomorphism density: generic path supports at most " +
                          std::to_string(limits.max_vertices) + " motif vertices, got " +
                          std::to_string(f.vertex_count()));
  if (work > limits.max_work)
    throw CapabilityError("homomorphism density: generic path work " + std::to_string(work) +
                          " exceeds limit " + std::to_string(limits.max_work));
}

/// Sum over all maps V(F) -> [n] of the product of X over edges (connected F).
inline double generic_hom_sum(const Motif& f, const WeightTable& x, const HomLimits& limits) {
  const int n = x.n(), v = f.vertex_count();
  check_generic_limits(f, std::pow(static_cast<double>(n), v), limits);
  if (v == 1) return n;
  const BacktrackPlan plan = make_plan(f);
  const auto m = x.matrix();
  std::vector<int> image(v);
  CompensatedSum total;
  // Depth-first over positions; the last position is summed in a flat loop.
  auto recurse = [&](auto&& self, int k, double weight) -> void {
    if (k == v - 1) {
      const auto& back = plan.back[k];
      double s = 0.0;
      for (int c = 0; c < n; ++c) {
        double w = 1.0;
        for (int b : back) w *= m(image[b], c);
        s += w;
      }
      total.add(weight * s);
      return;
    }
    for (int c = 0; c < n; ++c) {
      double w = weight;
      for (int b : plan.back[k]) w *= m(image[b], c);
      if (w == 0.0) continue;
      image[k] = c;
      self(self, k + 1, w);
    }
  };
  recurse(recurse, 0, 1.0);
  return total.value();
}

/// Same sum for a simple graph, with candidate sets from bitset intersections.
inline double generic_hom_count(const Motif& f, const BinaryGraph& g, const HomLimits& limits) {
  const int n = g.n(), v = f.vertex_count(), words = g.words();
  int maxdeg = 0;
  for (int u = 0; u < n; ++u) maxdeg = std::max(maxdeg, g.degree(u));
  check_generic_limits(f, n * std::pow(static_cast<double>(std::max(maxdeg, 1)), v - 1), limits);
  if (v == 1) return n;
  const BacktrackPlan plan = make_plan(f);
  std::vector<int> image(v);
  std::vector<std::uint64_t> scratch(static_cast<std::size_t>(v) * words);
  double total = 0.0;
  auto recurse = [&](auto&& self, int k) -> void {
    std::uint64_t* cand = scratch.data() + static_cast<std::size_t>(k) * words;
    const auto& back = plan.back[k];
    auto first = g.row(image[back[0]]);
    for (int w = 0; w < words; ++w) cand[w] = first[w];
    for (std::size_t b = 1; b < back.size(); ++b) {
      auto r = g.row(image[back[b]]);
      for (int w = 0; w < words; ++w) cand[w] &= r[w];
    }
    if (k == v - 1) {
      for (int w = 0; w < words; ++w) total += std::popcount(cand[w]);
      return;
    }
    for (int w = 0; w < words; ++w) {
      std::uint64_t bits = cand[w];
      while (bits) {
        image[k] = w * 64 + std::countr_zero(bits);
        bits &= bits - 1;
        self(self, k + 1);
      }
    }
  };
  for (int c = 0; c < n; ++c) {
    image[0] = c;
    recurse(recurse, 1);
  }
  return total;
}

inline double factorial(int r) {
  double f = 1.0;
  for (int i = 2; i <= r; ++i) f *= i;
  return f;
}

/// Number of `size`-cliques inside the vertex set `cand`.
inline double count_cliques_in(const BinaryGraph& g, std::vector<std::uint64_t> cand, int size) {
  if (size == 0) return 1.0;
  const int words = g.words();
  if (size == 1) {
    double c = 0;
    for (auto w : cand) c += std::popcount(w);
    return c;
  }
  double total = 0.0;
  for (int w = 0; w < words; ++w) {
    while (cand[w]) {
      const int u = w * 64 + std::countr_zero(cand[w]);
      cand[w] &= cand[w] - 1;  // later vertices only, so each clique counted once
      std::vector<std::uint64_t> next(words);
      auto r = g.row(u);
      for (int x = 0; x < words; ++x) next[x] = cand[x] & r[x];
      total += count_cliques_in(g, std::move(next), size - 1);
    }
  }
  return total;
}

inline std::vector<std::uint64_t> all_vertices(const BinaryGraph& g) {
  std::vector<std::uint64_t> all(g.words(), ~0ULL);
  if (g.n() % 64) all.back() = (1ULL << (g.n() % 64)) - 1ULL;
  return all;
}

inline RowMatrix matrix_power(const RowMatrix& y, int power) {
  RowMatrix result = y;
  for (int i = 1; i < power; ++i) result = (result * y).eval();
  return result;
}

inline HomAlgorithm resolve(const Motif& f, HomAlgorithm requested, bool binary) {
  const MotifShape shape = classify(f);
  if (requested == HomAlgorithm::automatic) {
    switch (shape) {
      case MotifShape::cycle: return HomAlgorithm::cycle;
      case MotifShape::star: return HomAlgorithm::star;
      case MotifShape::clique: return binary ? HomAlgorithm::clique : HomAlgorithm::generic;
      default: return HomAlgorithm::generic;
    }
  }
  auto mismatch = [&](const char* what) {
    throw DomainError(std::string("homomorphism density: motif is not a ") + what);
  };
  if (requested == HomAlgorithm::cycle && shape != MotifShape::cycle) mismatch("cycle");
  if (requested == HomAlgorithm::star && shape != MotifShape::star) mismatch("star");
  if (requested == HomAlgorithm::clique) {
    if (shape != MotifShape::clique && !(shape == MotifShape::cycle && f.vertex_count() == 3))
      mismatch("clique");
    if (!binary) throw DomainError("homomorphism density: clique path needs a binary graph");
  }
  return requested;
}

inline double connected_hom_sum(const Motif& f, const WeightTable& x, HomAlgorithm alg,
                                const HomLimits& limits) {
  const int n = x.n();
  switch (resolve(f, alg, false)) {
    case HomAlgorithm::cycle: {
      const RowMatrix y = x.matrix();
      const RowMatrix p = matrix_power(y, f.vertex_count() - 1);
      return p.cwiseProduct(y).sum();
    }
    case HomAlgorithm::star: {
      const int k = f.vertex_count() - 1;
      const Eigen::VectorXd rows = x.matrix().rowwise().sum();
      CompensatedSum s;
      for (int i = 0; i < n; ++i) s.add(std::pow(rows(i), k));
      return s.value();
    }
    default:
      return generic_hom_sum(f, x, limits);
  }
}

inline double connected_hom_count(const Motif& f, const BinaryGraph& g, HomAlgorithm alg,
                                  const HomLimits& limits) {
  const int n = g.n();
  switch (resolve(f, alg, true)) {
    case HomAlgorithm::cycle: {
      const int len = f.vertex_count();
      if (len == 3) {
        double t = 0;
        for (int i = 0; i < n; ++i)
          for (int j : g.neighbors(i)) t += g.common_neighbors(i, j);
        return t;
      }
      if (len == 4) {
        double t = 0;
        for (int i = 0; i < n; ++i) {
          t += static_cast<double>(g.degree(i)) * g.degree(i);
          for (int j = 0; j < n; ++j)
            if (j != i) {
              const double c = g.common_neighbors(i, j);
              t += c * c;
            }
        }
        return t;
      }
      RowMatrix a = RowMatrix::Zero(n, n);
      for (int i = 0; i < n; ++i)
        for (int j : g.neighbors(i)) a(i, j) = 1.0;
      return matrix_power(a, len - 1).cwiseProduct(a).sum();
    }
    case HomAlgorithm::star: {
      const int k = f.vertex_count() - 1;
      double t = 0;
      for (int i = 0; i < n; ++i) t += std::pow(static_cast<double>(g.degree(i)), k);
      return t;
    }
    case HomAlgorithm::clique: {
      const int r = f.vertex_count();
      return factorial(r) * count_cliques_in(g, all_vertices(g), r);
    }
    default:
      return generic_hom_count(f, g, limits);
  }
}

}  // namespace detail

/// Sum over all maps V(F) -> [n] of prod_{edges} X, i.e. n^v(F) * t(F, X).
/// Disconnected motifs factor over components.
inline double hom_sum(const Motif& f, const WeightTable& x, HomAlgorithm alg = HomAlgorithm::automatic,
                      const HomLimits& limits = {}) {
  if (f.edge_count() == 0) return std::pow(static_cast<double>(x.n()), f.vertex_count());
  if (f.is_connected()) return detail::connected_hom_sum(f, x, alg, limits);
  double prod = 1.0;
  for (const Motif& c : f.components()) prod *= detail::connected_hom_sum(c, x, HomAlgorithm::automatic, limits);
  return prod;
}

/// Number of homomorphisms F -> G (an exact integer held in a double).
inline double hom_count(const Motif& f, const BinaryGraph& g, HomAlgorithm alg = HomAlgorithm::automatic,
                        const HomLimits& limits = {}) {
  if (f.edge_count() == 0) return std::pow(static_cast<double>(g.n()), f.vertex_count());
  if (f.is_connected()) return detail::connected_hom_count(f, g, alg, limits);
  double prod = 1.0;
  for (const Motif& c : f.components()) prod *= detail::connected_hom_count(c, g, HomAlgorithm::automatic, limits);
  return prod;
}

/// t(F, X/scale).
inline double hom_density(const Motif& f, const WeightTable& x, double scale = 1.0,
                          HomAlgorithm alg = HomAlgorithm::automatic, const HomLimits& limits = {}) {
  if (!(scale > 0.0)) throw DomainError("homomorphism density: scale must be positive");
  const double n = x.n();
  return hom_sum(f, x, alg, limits) / std::pow(n, f.vertex_count()) / std::pow(scale, f.edge_count());
}

inline double hom_density(const Motif& f, const BinaryGraph& g, double scale = 1.0,
                          HomAlgorithm alg = HomAlgorithm::automatic, const HomLimits& limits = {}) {
  if (!(scale > 0.0)) throw DomainError("homomorphism density: scale must be positive");
  const double n = g.n();
  return hom_count(f, g, alg, limits) / std::pow(n, f.vertex_count()) / std::pow(scale, f.edge_count());
}

namespace detail {

/// hom(C_len, G + ij) - hom(C_len, G - ij) by telescoping closed walks.
inline double cycle_count_delta(const BinaryGraph& a, int i, int j, int len) {
  const int n = a.n();
  std::vector<std::vector<int>> nbr(n);
  for (int u = 0; u < n; ++u) nbr[u] = a.neighbors(u);
  auto apply_a = [&](const std::vector<double>& x) {
    std::vector<double> y(n, 0.0);
    for (int u = 0; u < n; ++u) {
      double s = 0.0;
      for (int w : nbr[u]) s += x[w];
      y[u] = s;
    }
    return y;
  };
  auto unit = [&](int k) {
    std::vector<double> e(n, 0.0);
    e[k] = 1.0;
    return e;
  };
  // ai[m] = A^m e_i, aj[m] = A^m e_j, bi[k] = B^k e_i, bj[k] = B^k e_j with B = A + E_ij.
  std::vector<std::vector<double>> ai{unit(i)}, aj{unit(j)}, bi{unit(i)}, bj{unit(j)};
  for (int m = 1; m < len; ++m) {
    ai.push_back(apply_a(ai.back()));
    aj.push_back(apply_a(aj.back()));
    auto step_b = [&](const std::vector<double>& x) {
      std::vector<double> y = apply_a(x);
      y[i] += x[j];
      y[j] += x[i];
      return y;
    };
    bi.push_back(step_b(bi.back()));
    bj.push_back(step_b(bj.back()));
  }
  auto dot = [&](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (int u = 0; u < n; ++u) s += x[u] * y[u];
    return s;
  };
  // tr(B^L) - tr(A^L) = sum_k tr(B^k E A^(L-1-k)).
  double total = 0.0;
  for (int k = 0; k < len; ++k) {
    const int m = len - 1 - k;
    total += dot(aj[m], bi[k]) + dot(ai[m], bj[k]);
  }
  return total;
}

inline double connected_count_delta(const Motif& f, BinaryGraph& a, int i, int j) {
  switch (classify(f)) {
    case MotifShape::star: {
      const int k = f.vertex_count() - 1;
      const double di = a.degree(i), dj = a.degree(j);
      return std::pow(di + 1, k) - std::pow(di, k) + std::pow(dj + 1, k) - std::pow(dj, k);
    }
    case MotifShape::cycle: {
      const int len = f.vertex_count();
      if (len == 3) return 6.0 * a.common_neighbors(i, j);
      if (len == 4) {
        double walks3 = 0.0;  // (A^3)_ij
        for (int k : a.neighbors(i)) walks3 += a.common_neighbors(k, j);
        return 8.0 * walks3 + 4.0 * (a.degree(i) + a.degree(j)) + 2.0;
      }
      return cycle_count_delta(a, i, j, len);
    }
    case MotifShape::clique: {
      const int r = f.vertex_count();
      std::vector<std::uint64_t> common(a.words());
      auto ri = a.row(i), rj = a.row(j);
      for (int w = 0; w < a.words(); ++w) common[w] = ri[w] & rj[w];
      return factorial(r) * count_cliques_in(a, std::move(common), r - 2);
    }
    default: {
      const double without = hom_count(f, a);
      a.add_edge(i, j);
      const double with = hom_count(f, a);
      a.remove_edge(i, j);
      return with - without;
    }
  }
}

}  // namespace detail

/// hom(F, G with ij) - hom(F, G without ij). G is left unchanged.
inline double hom_count_delta(const Motif& f, const BinaryGraph& g, int i, int j) {
  if (i == j) throw DomainError("homomorphism delta: i and j must differ");
  if (f.edge_count() == 0) return 0.0;
  BinaryGraph a = g;
  a.remove_edge(i, j);
  if (f.is_connected()) return detail::connected_count_delta(f, a, i, j);
  // Product rule over components: prod(c + d) - prod(c).
  double before = 1.0, after = 1.0;
  for (const Motif& c : f.components()) {
    const double base = hom_count(c, a);
    before *= base;
    after *= base + (c.edge_count() ? detail::connected_count_delta(c, a, i, j) : 0.0);
  }
  return after - before;
}

/// Same as above but mutates `a` only transiently; `a` must not contain ij.
/// This is the sampler's hot path and skips the graph copy.
inline double hom_count_delta_absent(const Motif& f, BinaryGraph& a, int i, int j) {
  if (f.edge_count() == 0) return 0.0;
  if (f.is_connected()) return detail::connected_count_delta(f, a, i, j);
  double before = 1.0, after = 1.0;
  for (const Motif& c : f.components()) {
    const double base = hom_count(c, a);
    before *= base;
    after *= base + (c.edge_count() ? detail::connected_count_delta(c, a, i, j) : 0.0);
  }
  return after - before;
}

/// t(F, G+ij / scale) - t(F, G-ij / scale).
inline double hom_density_delta(const Motif& f, const BinaryGraph& g, int i, int j, double scale) {
  if (!(scale > 0.0)) throw DomainError("homomorphism delta: scale must be positive");
  const double n = g.n();
  return hom_count_delta(f, g, i, j) / std::pow(n, f.vertex_count()) / std::pow(scale, f.edge_count());
}

inline double hom_density_delta(const Motif& f, const WeightTable& g, int i, int j, double scale) {
  if (!g.is_binary()) throw DomainError("homomorphism delta: table must be binary");
  return hom_density_delta(f, BinaryGraph::from_table(g), i, j, scale);
}

namespace detail {

/// Entry (i,j) is the sum over maps with the motif edge (u,v) pinned to (i,j)
/// of the product over the remaining edges.
inline RowMatrix pinned_edge_sums(const Motif& f, const WeightTable& x, int u, int v,
                                  const HomLimits& limits) {
  const int n = x.n(), nv = f.vertex_count();
  check_generic_limits(f, std::pow(static_cast<double>(n), nv), limits);
  const BacktrackPlan plan = make_plan(f, {u, v});
  const auto m = x.matrix();
  RowMatrix out = RowMatrix::Zero(n, n);
  std::vector<int> image(nv);
  auto recurse = [&](auto&& self, int k, double weight) -> double {
    if (k == nv) return weight;
    double s = 0.0;
    for (int c = 0; c < n; ++c) {
      double w = weight;
      for (int b : plan.back[k]) w *= m(image[b], c);
      if (w == 0.0) continue;
      image[k] = c;
      s += self(self, k + 1, w);
    }
    return s;
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      image[0] = i;
      image[1] = j;
      out(i, j) = recurse(recurse, 2, 1.0);
    }
  return out;
}

}  // namespace detail

/// Gradient of t(F, X/scale) with respect to the symmetric entries X_ij = X_ji
/// (one variable per unordered pair); the diagonal is zero.
inline RowMatrix hom_density_gradient(const Motif& f, const WeightTable& x, double scale = 1.0,
                                      const HomLimits& limits = {}) {
  if (!(scale > 0.0)) throw DomainError("homomorphism gradient: scale must be positive");
  const int n = x.n(), v = f.vertex_count(), e = f.edge_count();
  const double norm = std::pow(static_cast<double>(n), v) * std::pow(scale, e);
  RowMatrix grad = RowMatrix::Zero(n, n);
  if (e == 0) return grad;
  if (!f.is_connected()) {
    // Product rule: d(prod t_c) = sum_c (prod_{c' != c} t_c') dt_c.
    const auto comps = f.components();
    std::vector<double> dens;
    for (const Motif& c : comps) dens.push_back(hom_density(c, x, scale, HomAlgorithm::automatic, limits));
    for (std::size_t c = 0; c < comps.size(); ++c) {
      if (comps[c].edge_count() == 0) continue;
      double others = 1.0;
      for (std::size_t d = 0; d < comps.size(); ++d)
        if (d != c) others *= dens[d];
      grad += others * hom_density_gradient(comps[c], x, scale, limits);
    }
    return grad;
  }
  switch (classify(f)) {
    case MotifShape::cycle: {
      const RowMatrix y = x.matrix();
      grad = (2.0 * v / norm) * detail::matrix_power(y, v - 1);
      break;
    }
    case MotifShape::star: {
      const int k = v - 1;
      const Eigen::VectorXd rows = x.matrix().rowwise().sum();
      Eigen::VectorXd pw(n);
      for (int i = 0; i < n; ++i) pw(i) = k == 1 ? 1.0 : std::pow(rows(i), k - 1);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) grad(i, j) = k * (pw(i) + pw(j)) / norm;
      break;
    }
    default: {
      for (auto [a, b] : f.edges()) {
        const RowMatrix pinned = detail::pinned_edge_sums(f, x, a, b, limits);
        grad += pinned + pinned.transpose();
      }
      grad /= norm;
      break;
    }
  }
  const RowMatrix sym = 0.5 * (grad + grad.transpose());
  grad = sym;
  grad.diagonal().setZero();
  return grad;
}

}  // namespace sparse_ergm

#endif  // SPARSE_ERGM_HOM_DENSITY_HPP
