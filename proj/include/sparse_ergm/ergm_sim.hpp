#ifndef SPARSE_ERGM_ERGM_SIM_HPP
#define SPARSE_ERGM_ERGM_SIM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "sparse_ergm/errors.hpp"
#include "sparse_ergm/hamiltonian.hpp"
#include "sparse_ergm/hom_density.hpp"
#include "sparse_ergm/nmf.hpp"
#include "sparse_ergm/rng.hpp"
#include "sparse_ergm/weight_table.hpp"

namespace sparse_ergm {

/// n^2 p^Delta log(1/p)
inline double rate(int n, double p, int max_degree) {
  return static_cast<double>(n) * n * std::pow(p, max_degree) * std::log(1.0 / p);
}

/// Logistic function, stable at both tails.
inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// Pair index k <-> (i,j), i>j, in the order (1,0),(2,0),(2,1),(3,0),...
inline std::pair<int, int> pair_of_index(std::int64_t k) {
  int i = static_cast<int>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(k))) / 2.0);
  while (static_cast<std::int64_t>(i) * (i - 1) / 2 > k) --i;
  while (static_cast<std::int64_t>(i + 1) * i / 2 <= k) ++i;
  return {i, static_cast<int>(k - static_cast<std::int64_t>(i) * (i - 1) / 2)};
}

inline std::int64_t pair_count(int n) { return static_cast<std::int64_t>(n) * (n - 1) / 2; }

/// The tilted measure: base G(n,p) times exp(r H(G/p)).
struct ErgmModel {
  int n = 0;
  double p = 0.5;
  HamiltonianSpec spec;
  double r = 0.0;
  double log_odds = 0.0;  // log(p/(1-p)) = -alpha
  static constexpr double exponent_clamp = 700.0;

  ErgmModel() = default;
  ErgmModel(int n_, double p_, HamiltonianSpec spec_) : n(n_), p(p_), spec(std::move(spec_)) {
    if (n < 2) throw DomainError("ergm: n must be at least 2");
    check_p(p);
    if (!spec.terms.empty()) validate(spec);
    r = rate(n, p, spec.family.max_degree);
    log_odds = std::log(p / (1.0 - p));
  }

  std::size_t motif_count() const noexcept { return spec.family.size(); }

  std::vector<double> densities(const BinaryGraph& g) const {
    std::vector<double> t(motif_count());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = hom_density(spec.family[k], g, p);
    return t;
  }

  double hamiltonian(std::span<const double> t) const { return spec.terms.empty() ? 0.0 : spec(t); }

  /// log of the unnormalized weight of g relative to counting measure.
  double log_weight(const BinaryGraph& g) const {
    const double e = static_cast<double>(g.edge_count());
    const double rest = static_cast<double>(pair_count(n)) - e;
    const auto t = densities(g);
    return e * std::log(p) + rest * std::log1p(-p) + r * hamiltonian(t);
  }
};

/// Conditional law of one edge given the rest.
struct EdgeUpdate {
  double probability = 0.0;  // P(edge present | rest)
  std::vector<double> t_without, t_with;
};

/// Change of each t(F_k, G/p) when ij is added; `g` must not contain ij and
/// is touched transiently.
inline std::vector<double> density_deltas(const ErgmModel& m, BinaryGraph& g, int i, int j) {
  std::vector<double> d(m.motif_count());
  const double nn = g.n();
  for (std::size_t k = 0; k < d.size(); ++k) {
    const Motif& f = m.spec.family[k];
    d[k] = hom_count_delta_absent(f, g, i, j) / std::pow(nn, f.vertex_count()) / std::pow(m.p, f.edge_count());
  }
  return d;
}

inline double on_probability(const ErgmModel& m, std::span<const double> t_without, std::span<const double> t_with) {
  if (m.spec.terms.empty()) return m.p;
  double dh = m.r * (m.hamiltonian(t_with) - m.hamiltonian(t_without));
  dh = std::clamp(dh, -ErgmModel::exponent_clamp, ErgmModel::exponent_clamp);
  return logistic(dh + m.log_odds);
}

/// `g` must not contain ij.
inline EdgeUpdate edge_conditional(const ErgmModel& m, BinaryGraph& g, int i, int j,
                                   std::span<const double> t_without) {
  EdgeUpdate u;
  u.t_without.assign(t_without.begin(), t_without.end());
  u.t_with = u.t_without;
  const auto d = density_deltas(m, g, i, j);
  for (std::size_t k = 0; k < d.size(); ++k) u.t_with[k] += d[k];
  u.probability = on_probability(m, u.t_without, u.t_with);
  return u;
}

/// Single-edge heat-bath chain with cached densities.
class ErgmChain {
public:
  static constexpr int resync_interval = 64;

  ErgmChain(ErgmModel model, BinaryGraph start, std::uint64_t seed, std::uint64_t chain_index = 0)
      : model_(std::move(model)), g_(std::move(start)), rng_(seed, chain_index), seed_(seed),
        chain_index_(chain_index) {
    if (g_.n() != model_.n) throw DomainError("ergm chain: start graph has wrong size");
    t_ = model_.densities(g_);
  }

  const ErgmModel& model() const noexcept { return model_; }
  const BinaryGraph& graph() const noexcept { return g_; }
  const std::vector<double>& densities() const noexcept { return t_; }
  std::uint64_t sweeps() const noexcept { return sweeps_; }
  std::uint64_t steps() const noexcept { return steps_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t chain_index() const noexcept { return chain_index_; }
  std::uint64_t rng_position() const noexcept { return rng_.position(); }
  double max_drift() const noexcept { return max_drift_; }

  /// Largest relative gap between the cache and a fresh count.
  double drift() const {
    const auto fresh = model_.densities(g_);
    double worst = 0.0;
    for (std::size_t k = 0; k < fresh.size(); ++k)
      worst = std::max(worst, std::abs(fresh[k] - t_[k]) / std::max(1.0, std::abs(fresh[k])));
    return worst;
  }

  void resync() {
    max_drift_ = std::max(max_drift_, drift());
    t_ = model_.densities(g_);
  }

  /// One uniformly chosen pair, resampled from its conditional law.
  void step() {
    const auto [i, j] = pair_of_index(static_cast<std::int64_t>(rng_.below(pair_count(model_.n))));
    update_pair(i, j, rng_.uniform());
    ++steps_;
  }

  /// C(n,2) steps; resyncs the cache every resync_interval sweeps.
  void sweep() {
    const std::int64_t count = pair_count(model_.n);
    for (std::int64_t s = 0; s < count; ++s) step();
    ++sweeps_;
    if (sweeps_ % resync_interval == 0) resync();
  }

  /// Deterministic update of pair ij with uniform variate u.
  void update_pair(int i, int j, double u) {
    const bool had = g_.has_edge(i, j);
    if (had) g_.remove_edge(i, j);
    const auto d = density_deltas(model_, g_, i, j);
    std::vector<double> without = t_, with = t_;
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (had) without[k] -= d[k];
      else with[k] += d[k];
    }
    if (u < on_probability(model_, without, with)) {
      g_.add_edge(i, j);
      t_ = std::move(with);
    } else {
      t_ = std::move(without);
    }
  }

private:
  ErgmModel model_;
  BinaryGraph g_;
  std::vector<double> t_;
  CounterRng rng_;
  std::uint64_t seed_ = 0, chain_index_ = 0;
  std::uint64_t sweeps_ = 0, steps_ = 0;
  double max_drift_ = 0.0;
};

// ---------------------------------------------------------------------------
// Exact enumeration at tiny n

inline constexpr int exact_max_n = 6;

/// Graph with edge set given by the bits of `mask` in pair order.
inline BinaryGraph graph_of_mask(int n, std::uint64_t mask) {
  BinaryGraph g(n);
  for (std::int64_t k = 0; k < pair_count(n); ++k)
    if ((mask >> k) & 1ULL) {
      const auto [i, j] = pair_of_index(k);
      g.add_edge(i, j);
    }
  return g;
}

struct ExactResult {
  double log_mgf = 0.0;  // Lambda
  double log_z = 0.0;    // Lambda - C(n,2) log(1-p)
  std::vector<double> probabilities;  // indexed by edge mask
  std::vector<double> log_weights;
};

inline ExactResult exact_enumerate(const ErgmModel& m) {
  if (m.n > exact_max_n)
    throw CapabilityError("exact enumeration: n = " + std::to_string(m.n) + " exceeds " +
                          std::to_string(exact_max_n));
  const std::int64_t pairs = pair_count(m.n);
  const std::uint64_t states = 1ULL << pairs;
  ExactResult out;
  out.log_weights.resize(states);
  double top = -std::numeric_limits<double>::infinity();
  for (std::uint64_t s = 0; s < states; ++s) {
    out.log_weights[s] = m.log_weight(graph_of_mask(m.n, s));
    top = std::max(top, out.log_weights[s]);
  }
  // A constant tilt c gives Lambda = c exactly; the base weights sum to 1.
  double tilt_lo = std::numeric_limits<double>::infinity(), tilt_hi = -tilt_lo;
  for (std::uint64_t s = 0; s < states; ++s) {
    const double tilt = m.r * m.hamiltonian(m.densities(graph_of_mask(m.n, s)));
    tilt_lo = std::min(tilt_lo, tilt);
    tilt_hi = std::max(tilt_hi, tilt);
  }
  if (tilt_lo == tilt_hi) {
    out.log_mgf = tilt_lo;
  } else {
    detail::CompensatedSum acc;
    for (double w : out.log_weights) acc.add(std::exp(w - top));
    out.log_mgf = top + std::log(acc.value());
  }
  out.log_z = out.log_mgf - static_cast<double>(pairs) * std::log1p(-m.p);
  out.probabilities.resize(states);
  for (std::uint64_t s = 0; s < states; ++s) out.probabilities[s] = std::exp(out.log_weights[s] - out.log_mgf);
  return out;
}

/// Transition matrix of one heat-bath step over all 2^C(n,2) states.
inline RowMatrix glauber_kernel(const ErgmModel& m) {
  if (m.n > 5) throw CapabilityError("glauber kernel: n must be at most 5");
  const std::int64_t pairs = pair_count(m.n);
  const std::uint64_t states = 1ULL << pairs;
  RowMatrix k = RowMatrix::Zero(static_cast<Eigen::Index>(states), static_cast<Eigen::Index>(states));
  for (std::uint64_t s = 0; s < states; ++s) {
    for (std::int64_t e = 0; e < pairs; ++e) {
      const auto [i, j] = pair_of_index(e);
      const std::uint64_t off = s & ~(1ULL << e), on = s | (1ULL << e);
      BinaryGraph g = graph_of_mask(m.n, off);
      const auto t = m.densities(g);
      const double q = edge_conditional(m, g, i, j, t).probability;
      k(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(on)) += q / pairs;
      k(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(off)) += (1.0 - q) / pairs;
    }
  }
  return k;
}

inline std::uint64_t mask_of_graph(const BinaryGraph& g) {
  if (pair_count(g.n()) > 63) throw CapabilityError("edge mask: graph too large");
  std::uint64_t mask = 0;
  for (std::int64_t k = 0; k < pair_count(g.n()); ++k) {
    const auto [i, j] = pair_of_index(k);
    if (g.has_edge(i, j)) mask |= 1ULL << k;
  }
  return mask;
}

// ---------------------------------------------------------------------------
// Graph generators

/// G(n,p) by geometric skipping over the pair order.
inline BinaryGraph erdos_renyi(int n, double p, CounterRng& rng) {
  BinaryGraph g(n);
  if (p <= 0.0) return g;
  const std::int64_t total = pair_count(n);
  if (p >= 1.0) {
    for (std::int64_t k = 0; k < total; ++k) {
      const auto [i, j] = pair_of_index(k);
      g.add_edge(i, j);
    }
    return g;
  }
  const double log_q = std::log1p(-p);
  std::int64_t k = -1;
  while (true) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    const double skip = std::floor(std::log(u) / log_q);
    if (skip >= static_cast<double>(total)) break;
    k += 1 + static_cast<std::int64_t>(skip);
    if (k >= total) break;
    const auto [i, j] = pair_of_index(k);
    g.add_edge(i, j);
  }
  return g;
}

/// Background G(n,p) with the clique block and hub block of Q^{I,J} forced to 1.
inline BinaryGraph planted_graph(int n, double p, std::span<const int> clique, std::span<const int> hub,
                                 CounterRng& rng) {
  BinaryGraph g = erdos_renyi(n, p, rng);
  for (std::size_t x = 0; x < clique.size(); ++x)
    for (std::size_t y = 0; y < x; ++y) g.add_edge(clique[x], clique[y]);
  std::vector<char> in_hub(n, 0);
  for (int j : hub) in_hub[j] = 1;
  for (int j : hub)
    for (int v = 0; v < n; ++v)
      if (!in_hub[v]) g.add_edge(j, v);
  return g;
}

// ---------------------------------------------------------------------------
// Spectral distance

struct SpectralOptions {
  int restarts = 3;
  int max_iter = 20000;
  double tol = 1e-12;  // relative change of the estimate between iterations
  std::uint64_t seed = 0;
};

struct SpectralResult {
  double norm = 0.0;
  int iterations = 0;
  bool converged = true;
};

namespace detail {

/// Operator norm of a symmetric operator by power iteration on its square.
template <class Apply>
SpectralResult symmetric_norm(int n, Apply&& apply, const SpectralOptions& opt) {
  SpectralResult best;
  best.converged = true;
  for (int r = 0; r < opt.restarts; ++r) {
    CounterRng rng(opt.seed, 0x737063ULL + static_cast<std::uint64_t>(r));
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.normal();
    x.normalize();
    double est = 0.0;
    bool converged = false;
    int it = 0;
    for (; it < opt.max_iter; ++it) {
      Eigen::VectorXd y = apply(x);
      const double next = y.norm();
      if (next == 0.0) {
        est = 0.0;
        converged = true;
        break;
      }
      Eigen::VectorXd z = apply(y);
      const double zn = z.norm();
      if (zn == 0.0) {
        est = next;
        converged = true;
        break;
      }
      x = z / zn;
      if (std::abs(next - est) <= opt.tol * next) {
        est = std::max(est, next);
        converged = true;
        break;
      }
      est = std::max(est, next);
    }
    best.iterations += it;
    if (!converged) best.converged = false;
    best.norm = std::max(best.norm, est);
  }
  return best;
}

}  // namespace detail

/// ||G - Q||_{2->2} for dense tables.
inline SpectralResult spectral_distance(const WeightTable& g, const WeightTable& q, const SpectralOptions& opt = {}) {
  if (g.n() != q.n()) throw DomainError("spectral distance: size mismatch");
  const RowMatrix d = g.matrix() - q.matrix();
  return detail::symmetric_norm(g.n(), [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return d * x; }, opt);
}

/// ||G - Q^{I,J}||_{2->2} without forming the dense difference.
inline SpectralResult spectral_distance(const BinaryGraph& g, const CliqueHub& q, const SpectralOptions& opt = {}) {
  const int n = g.n();
  if (q.n != n) throw DomainError("spectral distance: size mismatch");
  std::vector<std::vector<int>> nbr(n);
  for (int v = 0; v < n; ++v) nbr[v] = g.neighbors(v);
  std::vector<char> in_i(n, 0), in_j(n, 0);
  for (int v : q.clique) in_i[v] = 1;
  for (int v : q.hub) in_j[v] = 1;
  const double p = q.p;
  auto apply = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    double total = 0.0, sum_i = 0.0, sum_j = 0.0;
    for (int v = 0; v < n; ++v) {
      total += x[v];
      if (in_i[v]) sum_i += x[v];
      if (in_j[v]) sum_j += x[v];
    }
    Eigen::VectorXd y(n);
    for (int v = 0; v < n; ++v) {
      double gx = 0.0;
      for (int w : nbr[v]) gx += x[w];
      double qx = p * (total - x[v]);
      if (in_i[v]) qx += (1.0 - p) * (sum_i - x[v]);
      if (in_j[v]) qx += (1.0 - p) * (total - sum_j);
      else qx += (1.0 - p) * sum_j;
      y[v] = gx - qx;
    }
    return y;
  };
  return detail::symmetric_norm(n, apply, opt);
}

// ---------------------------------------------------------------------------
// Structure detection

struct DetectOptions {
  double delta_hub = 0.5;
  double peel_xi = 0.05;  // peel while clique density < 1 - 2 peel_xi
  std::optional<double> a_hint, b_hint;
  bool spectral = true;
  int discrepancy_samples = 16;
  std::uint64_t seed = 0;
  SpectralOptions spectral_options;
};

struct DiscrepancySample {
  std::string kind;  // "clique", "hub", "bulk"
  int size_a = 0, size_b = 0;
  double lhs = 0.0, rhs = 0.0;
  bool holds = true;
};

struct StructureReport {
  std::vector<int> hub, clique;            // detected
  std::vector<int> witness_hub, witness_clique;  // aligned to the certificate sizes
  double hub_threshold = 0.0, clique_threshold = 0.0;
  double a = 0.0, b = 0.0;  // sizes parameters the certificates refer to
  double xi1 = 0.0, xi1_clique = 0.0, xi1_hub = 0.0;
  std::optional<double> xi2;
  double spectral_norm = 0.0;
  bool spectral_converged = true;
  std::vector<DiscrepancySample> discrepancies;

  /// If xi2 < xi then xi1 <= sqrt(max(a,b)) xi.
  bool containment_holds(double xi, double tol = 1e-9) const {
    if (!xi2 || !(*xi2 < xi)) return true;
    return xi1 <= std::sqrt(std::max(a, b)) * xi + tol;
  }
};

namespace detail {

inline std::vector<std::uint64_t> vertex_mask(int n, std::span<const int> vs) {
  std::vector<std::uint64_t> m((n + 63) / 64, 0ULL);
  for (int v : vs) m[v >> 6] |= 1ULL << (v & 63);
  return m;
}

inline int degree_into(const BinaryGraph& g, int v, const std::vector<std::uint64_t>& mask) {
  auto r = g.row(v);
  int c = 0;
  for (int w = 0; w < g.words(); ++w) c += std::popcount(r[w] & mask[w]);
  return c;
}

/// e_G(A,B), ordered count.
inline double edges_between(const BinaryGraph& g, std::span<const int> a, std::span<const int> b) {
  const auto mb = vertex_mask(g.n(), b);
  double e = 0.0;
  for (int v : a) e += degree_into(g, v, mb);
  return e;
}

inline std::vector<int> sample_subset(std::span<const int> from, int size, CounterRng& rng) {
  std::vector<int> pool(from.begin(), from.end());
  size = std::min<int>(size, static_cast<int>(pool.size()));
  for (int k = 0; k < size; ++k) std::swap(pool[k], pool[k + rng.below(pool.size() - k)]);
  pool.resize(size);
  return pool;
}

/// Keeps the `target` members with largest score, or tops up from outside by score.
template <class Score>
std::vector<int> align(std::vector<int> set, int target, std::span<const int> pool, Score&& score) {
  auto by_score = [&](int u, int v) { return score(u) != score(v) ? score(u) > score(v) : u < v; };
  if (static_cast<int>(set.size()) > target) {
    std::sort(set.begin(), set.end(), by_score);
    set.resize(target);
  } else if (static_cast<int>(set.size()) < target) {
    std::vector<int> extra;
    for (int v : pool)
      if (std::find(set.begin(), set.end(), v) == set.end()) extra.push_back(v);
    std::sort(extra.begin(), extra.end(), by_score);
    for (int v : extra) {
      if (static_cast<int>(set.size()) == target) break;
      set.push_back(v);
    }
  }
  std::sort(set.begin(), set.end());
  return set;
}

}  // namespace detail

inline StructureReport detect_structure(const BinaryGraph& g, double p, int max_degree,
                                        const DetectOptions& opt = {}) {
  check_p(p);
  const int n = g.n();
  StructureReport rep;
  rep.hub_threshold = (1.0 - opt.delta_hub) * n;
  for (int v = 0; v < n; ++v)
    if (g.degree(v) >= rep.hub_threshold) rep.hub.push_back(v);
  const auto hub_mask = detail::vertex_mask(n, rep.hub);
  std::vector<char> in_hub(n, 0);
  for (int v : rep.hub) in_hub[v] = 1;

  // Candidates by degree in G minus the hub.
  rep.clique_threshold = n * p + std::sqrt(static_cast<double>(n));
  std::vector<int> cand;
  for (int v = 0; v < n; ++v)
    if (!in_hub[v] && g.degree(v) - detail::degree_into(g, v, hub_mask) >= rep.clique_threshold) cand.push_back(v);

  // Peel lowest within-degree vertices until the block is dense.
  const double keep = 1.0 - 2.0 * opt.peel_xi;
  std::vector<int> inside = cand;
  while (inside.size() >= 2) {
    const auto mask = detail::vertex_mask(n, inside);
    double e = 0.0;
    int worst = 0, worst_deg = n + 1;
    for (std::size_t x = 0; x < inside.size(); ++x) {
      const int d = detail::degree_into(g, inside[x], mask);
      e += d;
      if (d < worst_deg) worst_deg = d, worst = static_cast<int>(x);
    }
    const double m = static_cast<double>(inside.size());
    if (e / (m * (m - 1)) >= keep) break;
    inside.erase(inside.begin() + worst);
  }
  // Add back outsiders adjacent to almost all of the block.
  std::vector<char> in_i(n, 0);
  for (int v : inside) in_i[v] = 1;
  while (true) {
    const auto mask = detail::vertex_mask(n, inside);
    const double need = std::max(2.0, keep * static_cast<double>(inside.size()));
    int pick = -1, pick_deg = -1;
    for (int v = 0; v < n; ++v) {
      if (in_i[v] || in_hub[v]) continue;
      const int d = detail::degree_into(g, v, mask);
      if (d >= need && d > pick_deg) pick = v, pick_deg = d;
    }
    if (pick < 0) break;
    inside.push_back(pick);
    in_i[pick] = 1;
  }
  std::sort(inside.begin(), inside.end());
  rep.clique = inside;

  // Certificate sizes: hints if given, else the detected sizes.
  const double pd = std::pow(p, max_degree);
  int ni = static_cast<int>(rep.clique.size()), nj = static_cast<int>(rep.hub.size());
  if (opt.a_hint || opt.b_hint) {
    const auto [hi, hj] = clique_hub_sizes(n, p, max_degree, opt.a_hint.value_or(0.0), opt.b_hint.value_or(0.0));
    if (opt.a_hint) ni = hi;
    if (opt.b_hint) nj = hj;
  }
  rep.a = opt.a_hint ? *opt.a_hint : (static_cast<double>(ni) / n) * (static_cast<double>(ni) / n) / pd;
  rep.b = opt.b_hint ? *opt.b_hint : static_cast<double>(nj) / (n * pd);

  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  rep.witness_hub = detail::align(rep.hub, nj, all, [&](int v) { return g.degree(v); });
  std::vector<char> wj(n, 0);
  for (int v : rep.witness_hub) wj[v] = 1;
  std::vector<int> rest;
  for (int v : all)
    if (!wj[v]) rest.push_back(v);
  std::vector<int> seed_clique;
  for (int v : rep.clique)
    if (!wj[v]) seed_clique.push_back(v);
  {
    const auto mask = detail::vertex_mask(n, seed_clique);
    const auto jm = detail::vertex_mask(n, rep.witness_hub);
    rep.witness_clique = detail::align(seed_clique, ni, rest, [&](int v) {
      return static_cast<double>(detail::degree_into(g, v, mask)) * n + (g.degree(v) - detail::degree_into(g, v, jm));
    });
  }

  // G^1 certificate: smallest xi making the almost-clique-hub inequalities hold.
  const double scale = static_cast<double>(n) * n * pd;
  const double wi = static_cast<double>(rep.witness_clique.size());
  const double wjn = static_cast<double>(rep.witness_hub.size());
  const double def_i = wi * (wi - 1.0) - detail::edges_between(g, rep.witness_clique, rep.witness_clique);
  const double def_j = wjn * (n - wjn) - detail::edges_between(g, rep.witness_hub, rest);
  rep.xi1_clique = std::max(0.0, def_i) / (2.0 * scale);
  rep.xi1_hub = std::max(0.0, def_j) / scale;
  rep.xi1 = std::max(rep.xi1_clique, rep.xi1_hub);

  if (!opt.spectral) return rep;
  CliqueHub q{n, p, rep.witness_clique, rep.witness_hub};
  SpectralOptions so = opt.spectral_options;
  so.seed = split_seed(opt.seed, 1);
  const auto sr = spectral_distance(g, q, so);
  rep.spectral_norm = sr.norm;
  rep.spectral_converged = sr.converged;
  rep.xi2 = sr.norm / (n * std::pow(p, 0.5 * max_degree));

  // Block discrepancies on disjoint random pairs (A,B); the diagonal of Q is zero.
  CounterRng rng(opt.seed, 0x646973ULL);
  const double xi = *rep.xi2 * (1.0 + 1e-6) + 1e-12;
  auto record = [&](const std::string& kind, std::span<const int> pool_a, std::span<const int> pool_b,
                    bool bulk) {
    if (pool_a.empty() || pool_b.empty()) return;
    const int sa = 1 + static_cast<int>(rng.below(pool_a.size()));
    auto a = detail::sample_subset(pool_a, sa, rng);
    std::vector<int> pb;
    for (int v : pool_b)
      if (std::find(a.begin(), a.end(), v) == a.end()) pb.push_back(v);
    if (pb.empty()) return;
    const int sb = 1 + static_cast<int>(rng.below(pb.size()));
    auto b = detail::sample_subset(pb, sb, rng);
    const double ab = static_cast<double>(a.size()) * b.size();
    const double e = detail::edges_between(g, a, b);
    DiscrepancySample s{kind, static_cast<int>(a.size()), static_cast<int>(b.size()), 0.0, 0.0, true};
    if (!bulk) {
      s.lhs = 1.0 - e / ab;
      s.rhs = xi * std::sqrt(scale / ab);
      s.holds = s.lhs >= -1e-12 && s.lhs <= s.rhs;
    } else {
      s.lhs = std::abs(e / (p * ab) - 1.0);
      s.rhs = xi * std::sqrt(static_cast<double>(n) * n * std::pow(p, max_degree - 2) / ab);
      s.holds = s.lhs <= s.rhs;
    }
    rep.discrepancies.push_back(s);
  };
  std::vector<char> wi_mask(n, 0);
  for (int v : rep.witness_clique) wi_mask[v] = 1;
  std::vector<int> outside_i;  // J^c minus I
  for (int v : rest)
    if (!wi_mask[v]) outside_i.push_back(v);
  for (int s = 0; s < opt.discrepancy_samples; ++s) {
    if (rep.witness_clique.size() >= 2) record("clique", rep.witness_clique, rep.witness_clique, false);
    record("hub", rep.witness_hub, rest, false);
    record("bulk", outside_i, rest, true);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Experiments

struct ExperimentConfig {
  int n = 64;
  double p = 0.1;
  HamiltonianSpec spec;
  int sweeps = 100;
  int burnin = 0;
  int thin = 1;
  int chains = 1;
  std::uint64_t seed = 0;
  bool detect = false;
  bool start_empty = false;  // default start is a G(n,p) draw
  DetectOptions detect_options;
};

struct TrajectoryRow {
  int chain = 0;
  int sweep = 0;
  std::int64_t edges = 0;
  std::vector<double> t;
  int hub_size = 0, clique_size = 0;
  double xi1 = 0.0, xi2 = 0.0;
};

struct SizeTarget {
  PlanarPoint optimizer;
  int clique = 0, hub = 0;
};

struct ChainSummary {
  int chain = 0;
  double mean_edge_density = 0.0;
  double edge_density_stderr = 0.0;  // batch means
  double max_drift = 0.0;
  int final_hub = 0, final_clique = 0;
  int nearest_target = -1;
};

struct ExperimentResult {
  std::vector<TrajectoryRow> rows;  // ordered by (chain, sweep)
  std::vector<BinaryGraph> final_graphs;
  std::vector<SizeTarget> targets;
  std::vector<ChainSummary> chains;
  bool multimodal = false;
  std::vector<std::string> warnings;
};

inline void check_config(const ExperimentConfig& c) {
  if (c.n < 2) throw ConfigError("experiment: n must be at least 2");
  if (!(c.p > 0.0 && c.p < 1.0)) throw ConfigError("experiment: p must lie in (0,1)");
  if (c.sweeps <= 0) throw ConfigError("experiment: sweeps must be positive");
  if (c.burnin < 0 || c.burnin >= c.sweeps) throw ConfigError("experiment: burn-in must be in [0, sweeps)");
  if (c.thin <= 0) throw ConfigError("experiment: thinning must be positive");
  if (c.chains <= 0) throw ConfigError("experiment: chains must be positive");
}

namespace detail {

inline double batch_stderr(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 4) return std::numeric_limits<double>::infinity();
  const std::size_t batches = std::min<std::size_t>(20, n / 2), len = n / batches;
  std::vector<double> means;
  for (std::size_t b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t k = b * len; k < (b + 1) * len; ++k) s += xs[k];
    means.push_back(s / len);
  }
  const double mu = std::accumulate(means.begin(), means.end(), 0.0) / means.size();
  double var = 0.0;
  for (double m : means) var += (m - mu) * (m - mu);
  var /= (means.size() - 1);
  return std::sqrt(var / means.size());
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  check_config(cfg);
  const ErgmModel model(cfg.n, cfg.p, cfg.spec);
  ExperimentResult out;
  const int dmax = cfg.spec.family.max_degree;

  if (!cfg.spec.terms.empty()) {
    const auto psi = psi_solve(cfg.spec);
    for (const auto& pt : psi.optimizers) {
      SizeTarget t{pt, 0, 0};
      try {
        std::tie(t.clique, t.hub) = clique_hub_sizes(cfg.n, cfg.p, dmax, pt.a, pt.b);
      } catch (const DomainError&) {
        out.warnings.push_back("optimizer sizes exceed n");
        t.clique = t.hub = -1;
      }
      out.targets.push_back(t);
    }
    out.multimodal = out.targets.size() > 1;
    if (out.multimodal) out.warnings.push_back("multiple free-energy optimizers; comparing with the nearest");
  } else {
    out.targets.push_back({PlanarPoint{}, 0, 0});
  }

  std::vector<std::vector<TrajectoryRow>> per_chain(cfg.chains);
  std::vector<ChainSummary> summaries(cfg.chains);
  std::vector<BinaryGraph> finals(cfg.chains);
  auto run_chain = [&](int c) {
    CounterRng init(cfg.seed, 2 * static_cast<std::uint64_t>(c) + 1);
    BinaryGraph start = cfg.start_empty ? BinaryGraph(cfg.n) : erdos_renyi(cfg.n, cfg.p, init);
    ErgmChain chain(model, std::move(start), cfg.seed, 2 * static_cast<std::uint64_t>(c));
    std::vector<double> densities;
    const double pairs = static_cast<double>(pair_count(cfg.n));
    for (int s = 1; s <= cfg.sweeps; ++s) {
      chain.sweep();
      if (s <= cfg.burnin) continue;
      densities.push_back(chain.graph().edge_count() / pairs);
      if ((s - cfg.burnin) % cfg.thin != 0 && s != cfg.sweeps) continue;
      TrajectoryRow row{c, s, chain.graph().edge_count(), chain.densities(), 0, 0, 0.0, 0.0};
      if (cfg.detect) {
        DetectOptions d = cfg.detect_options;
        d.seed = split_seed(cfg.seed, 1000003ULL * c + s);
        const auto rep = detect_structure(chain.graph(), cfg.p, dmax, d);
        row.hub_size = static_cast<int>(rep.hub.size());
        row.clique_size = static_cast<int>(rep.clique.size());
        row.xi1 = rep.xi1;
        row.xi2 = rep.xi2.value_or(0.0);
      }
      per_chain[c].push_back(std::move(row));
    }
    chain.resync();
    ChainSummary& sum = summaries[c];
    sum.chain = c;
    sum.mean_edge_density = std::accumulate(densities.begin(), densities.end(), 0.0) / densities.size();
    sum.edge_density_stderr = detail::batch_stderr(densities);
    sum.max_drift = chain.max_drift();
    finals[c] = chain.graph();
  };
  std::vector<std::thread> pool;
  for (int c = 0; c < cfg.chains; ++c) pool.emplace_back(run_chain, c);
  for (auto& th : pool) th.join();

  for (int c = 0; c < cfg.chains; ++c) {
    ChainSummary& sum = summaries[c];
    if (!per_chain[c].empty()) {
      sum.final_hub = per_chain[c].back().hub_size;
      sum.final_clique = per_chain[c].back().clique_size;
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < out.targets.size(); ++k) {
      const double di = sum.final_clique - out.targets[k].clique, dj = sum.final_hub - out.targets[k].hub;
      if (di * di + dj * dj < best) best = di * di + dj * dj, sum.nearest_target = static_cast<int>(k);
    }
    for (auto& row : per_chain[c]) out.rows.push_back(std::move(row));
  }
  out.chains = std::move(summaries);
  out.final_graphs = std::move(finals);
  return out;
}

}  // namespace sparse_ergm

#endif  // SPARSE_ERGM_ERGM_SIM_HPP
