#ifndef SPARSE_ERGM_NMF_HPP
#define SPARSE_ERGM_NMF_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sparse_ergm/errors.hpp"
#include "sparse_ergm/hamiltonian.hpp"
#include "sparse_ergm/hom_density.hpp"
#include "sparse_ergm/planar.hpp"
#include "sparse_ergm/rng.hpp"
#include "sparse_ergm/weight_table.hpp"

namespace sparse_ergm {

inline constexpr int nmf_max_n = 256;

/// I_p(q) = q log(q/p) + (1-q) log((1-q)/(1-p)), with 0 log 0 = 0.
inline double bernoulli_entropy(double q, double p) {
  double out = 0.0;
  if (q > 0.0) out += q * std::log(q / p);
  if (q < 1.0) out += (1.0 - q) * std::log((1.0 - q) / (1.0 - p));
  return std::max(0.0, out);  // nonnegative; rounding near q = p can dip below
}

inline double bernoulli_entropy_derivative(double q, double p) {
  return std::log(q * (1.0 - p) / (p * (1.0 - q)));
}

inline void check_p(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0,1)");
}

/// Sum over i<j of I_p(Q_ij).
inline double entropy(const WeightTable& q, double p) {
  check_p(p);
  double s = 0.0;
  for (int i = 1; i < q.n(); ++i)
    for (int j = 0; j < i; ++j) s += bernoulli_entropy(q(i, j), p);
  return s;
}

/// Weighted clique-hub graph: 1 on the clique I (off-diagonal) and between the
/// hub J and its complement, p elsewhere off the diagonal.
struct CliqueHub {
  int n = 0;
  double p = 0.0;
  std::vector<int> clique;
  std::vector<int> hub;

  WeightTable table() const {
    WeightTable t(n, p);
    std::vector<char> in_hub(n, 0);
    for (int j : hub) in_hub[j] = 1;
    for (std::size_t x = 0; x < clique.size(); ++x)
      for (std::size_t y = 0; y < x; ++y) t.set(clique[x], clique[y], 1.0);
    for (int j : hub)
      for (int v = 0; v < n; ++v)
        if (!in_hub[v]) t.set(j, v, 1.0);
    return t;
  }

  /// Number of pairs i<j at value 1 times log(1/p).
  double entropy() const {
    const double ni = static_cast<double>(clique.size()), nj = static_cast<double>(hub.size());
    return (ni * (ni - 1) / 2 + nj * (n - nj)) * std::log(1.0 / p);
  }
};

/// Sizes floor((a p^D)^{1/2} n) and floor(b p^D n). A 1e-9 guard absorbs
/// rounding when the product is an exact integer.
inline std::pair<int, int> clique_hub_sizes(int n, double p, int max_degree, double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0)) throw DomainError("clique-hub: a and b must be nonnegative");
  const double pd = std::pow(p, max_degree);
  const double ci = std::floor(std::sqrt(a * pd) * n + 1e-9), cj = std::floor(b * pd * n + 1e-9);
  if (ci + cj > n) throw DomainError("clique-hub: sizes exceed n");
  return {static_cast<int>(ci), static_cast<int>(cj)};
}

/// Clique on the first vertices, hub right after it.
inline CliqueHub clique_hub_of_sizes(int n, double p, int ni, int nj) {
  check_p(p);
  if (n <= 0 || ni < 0 || nj < 0 || ni + nj > n) throw DomainError("clique-hub: sizes exceed n");
  CliqueHub h{n, p, {}, {}};
  for (int v = 0; v < ni; ++v) h.clique.push_back(v);
  for (int v = ni; v < ni + nj; ++v) h.hub.push_back(v);
  return h;
}

inline CliqueHub clique_hub(int n, double p, int max_degree, double a, double b) {
  check_p(p);
  const auto [ni, nj] = clique_hub_sizes(n, p, max_degree, a, b);
  return clique_hub_of_sizes(n, p, ni, nj);
}

namespace detail {

using Vec = Eigen::VectorXd;

inline Vec to_vec(const WeightTable& t) {
  const auto tri = t.triangle();
  return Eigen::Map<const Vec>(tri.data(), static_cast<Eigen::Index>(tri.size()));
}

inline WeightTable to_table(int n, const Vec& x) {
  return WeightTable::from_triangle(n, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

inline Vec lower_triangle(const RowMatrix& g) {
  const int n = static_cast<int>(g.rows());
  Vec out(n * (n - 1) / 2);
  Eigen::Index k = 0;
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) out(k++) = g(i, j);
  return out;
}

struct AscentOptions {
  int max_iter = 1500;
  double grad_tol = 1e-7;
  double lo = 1e-9;
  double hi = 1.0 - 1e-9;
};

struct AscentResult {
  Vec x;
  double value = -std::numeric_limits<double>::infinity();
  double start_value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

inline Vec project(const Vec& x, double lo, double hi) { return x.cwiseMax(lo).cwiseMin(hi); }

/// Projected gradient ascent with Barzilai-Borwein steps and Armijo
/// backtracking. The unprojected start point counts as an iterate, so the
/// result is never worse than the start.
template <class F, class G>
AscentResult projected_ascent(F&& f, G&& grad, const Vec& x0, const AscentOptions& opt) {
  AscentResult res;
  res.x = x0;
  res.value = res.start_value = f(x0);
  Vec x = project(x0, opt.lo, opt.hi);
  double fx = f(x);
  Vec gx = grad(x);
  auto pg_norm = [&](const Vec& y, const Vec& gy) { return (project(y + gy, opt.lo, opt.hi) - y).lpNorm<Eigen::Infinity>(); };
  if (fx > res.value) {
    res.value = fx;
    res.x = x;
  }
  res.grad_norm = pg_norm(x, gx);
  double alpha = 1.0 / std::max(1.0, gx.lpNorm<Eigen::Infinity>());
  for (int it = 0; it < opt.max_iter; ++it) {
    res.iterations = it + 1;
    const double pn = pg_norm(x, gx);
    if (pn <= opt.grad_tol) {
      res.converged = true;
      break;
    }
    Vec xn;
    double fn = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      xn = project(x + alpha * gx, opt.lo, opt.hi);
      fn = f(xn);
      if (fn >= fx + 1e-4 * gx.dot(xn - x)) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    const Vec gn = grad(xn);
    const Vec s = xn - x, y = gn - gx;
    const double sy = s.dot(y), ss = s.squaredNorm();
    alpha = sy < 0.0 ? ss / -sy : 2.0 * alpha;
    alpha = std::clamp(alpha, 1e-12, 1e6);
    x = xn;
    fx = fn;
    gx = gn;
    if (fx > res.value) {
      res.value = fx;
      res.x = x;
      res.grad_norm = pg_norm(x, gx);
    }
  }
  return res;
}

/// Densities t(F_k, Q/p) and their gradients.
inline std::vector<double> densities(const MotifFamily& fam, const WeightTable& q, double p) {
  std::vector<double> t;
  for (const auto& f : fam.motifs) t.push_back(hom_density(f, q, p));
  return t;
}

inline Vec entropy_gradient(const Vec& x, double p) {
  return x.unaryExpr([p](double q) { return bernoulli_entropy_derivative(q, p); });
}

inline double entropy_of(const Vec& x, double p) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) s += bernoulli_entropy(x(k), p);
  return s;
}

}  // namespace detail

struct NmfOptions {
  int max_iter = 1500;
  double grad_tol = 1e-7;
  double clip = 1e-9;
  int random_starts = 3;
  double size_perturbation = 0.2;
  std::uint64_t seed = 0;
  PsiOptions psi;
};

struct RestartRecord {
  std::string origin;
  double start_value = 0.0;
  double value = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
};

struct NmfResult {
  double value = 0.0;
  WeightTable q;
  double rate = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  double witness_value = -std::numeric_limits<double>::infinity();  // best clique-hub start
  double constant_value = 0.0;                                      // objective at Q = p
  std::vector<RestartRecord> restarts;
  std::vector<std::string> warnings;
};

/// Objective r h(t(F,Q/p)) - I_p(Q).
inline double nmf_objective(const HamiltonianSpec& spec, const WeightTable& q, double p) {
  const double r = rate(q.n(), p, spec.family.max_degree);
  return r * spec(detail::densities(spec.family, q, p)) - entropy(q, p);
}

/// Gradient of the NMF objective over the pairs i<j (as a symmetric matrix).
inline RowMatrix nmf_gradient(const HamiltonianSpec& spec, const WeightTable& q, double p) {
  const int n = q.n();
  const double r = rate(n, p, spec.family.max_degree);
  const auto t = detail::densities(spec.family, q, p);
  RowMatrix g = RowMatrix::Zero(n, n);
  std::vector<double> dh(spec.family.size(), 0.0);
  for (const auto& term : spec.terms) dh[term.k] += term.derivative(t[term.k]);
  for (std::size_t k = 0; k < spec.family.size(); ++k)
    if (dh[k] != 0.0) g += (r * dh[k]) * hom_density_gradient(spec.family[k], q, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) g(i, j) -= bernoulli_entropy_derivative(std::clamp(q(i, j), 1e-300, 1.0 - 1e-16), p);
  return g;
}

namespace detail {

inline Vec nmf_grad_vec(const HamiltonianSpec& spec, const WeightTable& q, double p, double r, const Vec& x) {
  const auto t = densities(spec.family, q, p);
  std::vector<double> dh(spec.family.size(), 0.0);
  for (const auto& term : spec.terms) dh[term.k] += term.derivative(t[term.k]);
  Vec g = -entropy_gradient(x, p);
  for (std::size_t k = 0; k < spec.family.size(); ++k)
    if (dh[k] != 0.0) g += (r * dh[k]) * lower_triangle(hom_density_gradient(spec.family[k], q, p));
  return g;
}

inline bool better(const AscentResult& a, const AscentResult& b) {
  if (a.value != b.value) return a.value > b.value;
  return a.grad_norm < b.grad_norm;
}

inline WeightTable random_table(int n, CounterRng& rng) {
  WeightTable t(n);
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) t.set(i, j, rng.uniform());
  return t;
}

}  // namespace detail

/// sup over Q of r h(t(F,Q/p)) - I_p(Q) by multi-start projected gradient ascent.
/// Starts: Q = p, clique-hub graphs at every point of Opt(psi) with sizes scaled
/// by 1 -/+ the perturbation, and random tables.
inline NmfResult nmf_solve(const HamiltonianSpec& spec, int n, double p, const NmfOptions& opt = {}) {
  check_p(p);
  if (n < 2) throw DomainError("nmf: n must be at least 2");
  if (n > nmf_max_n) throw CapabilityError("nmf: n above the supported maximum " + std::to_string(nmf_max_n));
  NmfResult res;
  res.warnings = validate(spec).warnings;
  res.rate = rate(n, p, spec.family.max_degree);
  const double r = res.rate;
  const detail::AscentOptions aopt{opt.max_iter, opt.grad_tol, opt.clip, 1.0 - opt.clip};
  auto f = [&](const detail::Vec& x) {
    return r * spec(detail::densities(spec.family, detail::to_table(n, x), p)) - detail::entropy_of(x, p);
  };
  auto grad = [&](const detail::Vec& x) {
    const auto xc = detail::project(x, opt.clip, 1.0 - opt.clip);
    return detail::nmf_grad_vec(spec, detail::to_table(n, xc), p, r, xc);
  };

  struct Start {
    std::string origin;
    WeightTable q;
    bool witness;
  };
  std::vector<Start> starts;
  starts.push_back({"constant", WeightTable(n, p), false});
  if (!spec.terms.empty()) {
    const auto psi = psi_solve(spec, opt.psi);
    for (const auto& pt : psi.optimizers) {
      const double pd = std::pow(p, spec.family.max_degree);
      const double ci = std::sqrt(pt.a * pd) * n, cj = pt.b * pd * n;
      for (double scale : {1.0 - opt.size_perturbation, 1.0, 1.0 + opt.size_perturbation}) {
        int ni = static_cast<int>(std::floor(ci * scale + 1e-9)), nj = static_cast<int>(std::floor(cj * scale + 1e-9));
        ni = std::min(ni, n);
        nj = std::min(nj, n - ni);
        starts.push_back({"clique-hub(" + std::to_string(ni) + "," + std::to_string(nj) + ")",
                          clique_hub_of_sizes(n, p, ni, nj).table(), true});
      }
    }
  }
  CounterRng rng(opt.seed, 0x6e6d66);
  for (int k = 0; k < opt.random_starts; ++k) starts.push_back({"random " + std::to_string(k), detail::random_table(n, rng), false});

  std::optional<detail::AscentResult> best;
  for (const auto& st : starts) {
    const auto run = detail::projected_ascent(f, grad, detail::to_vec(st.q), aopt);
    res.restarts.push_back({st.origin, run.start_value, run.value, run.iterations, run.grad_norm, run.converged});
    if (st.witness) res.witness_value = std::max(res.witness_value, run.start_value);
    if (st.origin == "constant") res.constant_value = run.start_value;
    if (!best || detail::better(run, *best)) best = run;
  }
  res.value = best->value;
  res.q = detail::to_table(n, best->x);
  res.grad_norm = best->grad_norm;
  res.iterations = best->iterations;
  res.converged = best->converged;
  if (!res.converged) res.warnings.push_back("best restart stopped before the gradient tolerance was met");
  return res;
}

struct PhiNpOptions {
  int rounds = 8;
  double penalty_growth = 10.0;
  int max_iter = 800;
  double grad_tol = 1e-9;
  double clip = 1e-9;
  double feasibility_tol = 1e-6;  // relative residual reported as feasible
  PlanarOptions planar;
};

struct PhiNpResult {
  double value = 0.0;  // Phi_{n,p}(s)
  WeightTable q;
  double rate = 0.0;
  std::vector<double> densities;
  std::vector<double> residuals;  // max(0, 1 + s_k - t_k) / (1 + s_k)
  double solver_value = std::numeric_limits<double>::infinity();
  double witness_value = std::numeric_limits<double>::infinity();  // best feasible clique-hub
  std::string witness_origin;
  std::string source;  // "solver", "witness" or "cache"
  int iterations = 0;
  std::vector<std::string> warnings;
};

namespace detail {

inline bool satisfies(const MotifFamily& fam, const WeightTable& q, double p, std::span<const double> s) {
  const auto t = densities(fam, q, p);
  for (std::size_t k = 0; k < s.size(); ++k)
    if (s[k] > 0.0 && t[k] < 1.0 + s[k]) return false;  // s_k = 0 is vacuous, as in the planar problem
  return true;
}

/// Feasible table near q: raise entries below p to p, then inflate
/// p + lam (Q - p) capped at 1, and as a last resort blend toward all ones.
inline std::optional<WeightTable> repair(const MotifFamily& fam, WeightTable q, double p, std::span<const double> s) {
  const int n = q.n();
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (q(i, j) < p) q.set(i, j, p);
  if (satisfies(fam, q, p, s)) return q;
  auto inflate = [&](double lam) {
    WeightTable t(n);
    for (int i = 1; i < n; ++i)
      for (int j = 0; j < i; ++j) t.set(i, j, std::min(1.0, p + lam * (q(i, j) - p)));
    return t;
  };
  double hi = 2.0;
  while (hi < 1e12 && !satisfies(fam, inflate(hi), p, s)) hi *= 2;
  if (satisfies(fam, inflate(hi), p, s)) {
    double lo = 1.0;
    for (int it = 0; it < 100 && hi - lo > 1e-13 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (satisfies(fam, inflate(mid), p, s) ? hi : lo) = mid;
    }
    return inflate(hi);
  }
  auto blend = [&](double mu) {
    WeightTable t(n);
    for (int i = 1; i < n; ++i)
      for (int j = 0; j < i; ++j) t.set(i, j, std::min(1.0, (1 - mu) * q(i, j) + mu));
    return t;
  };
  if (!satisfies(fam, blend(1.0), p, s)) return std::nullopt;
  double lo = 0.0, up = 1.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + up);
    (satisfies(fam, blend(mid), p, s) ? up : lo) = mid;
  }
  return blend(up);
}

/// Smallest clique-hub graph on the ray through (a,b) (sizes grown one vertex
/// at a time) satisfying every constraint.
inline std::optional<CliqueHub> feasible_witness(const MotifFamily& fam, int n, double p, std::span<const double> s,
                                                 const PlanarPoint& pt) {
  auto [ni, nj] = clique_hub_sizes(n, p, fam.max_degree, std::min(pt.a, 1e300), pt.b);
  if (pt.a > 0 && ni == 0) ni = 1;
  if (pt.b > 0 && nj == 0) nj = 1;
  while (ni + nj <= n) {
    const auto h = clique_hub_of_sizes(n, p, ni, nj);
    if (satisfies(fam, h.table(), p, s)) return h;
    if (pt.a > 0) ++ni;
    if (pt.b > 0) ++nj;
    if (pt.a == 0 && pt.b == 0) break;
  }
  return std::nullopt;
}

}  // namespace detail

/// Phi_{n,p}(s) = inf { I_p(Q) : t(F_k, Q/p) >= 1 + s_k for all k }.
/// Keeps the solutions it has produced; a cached table for a coordinatewise
/// larger s is feasible for a smaller one, which makes Phi monotone in s.
class PhiNpSolver {
public:
  PhiNpSolver(MotifFamily family, int n, double p, PhiNpOptions options = {})
      : family_(std::move(family)), n_(n), p_(p), opt_(options) {
    check_p(p);
    if (n < 2) throw DomainError("phi-np: n must be at least 2");
    if (n > nmf_max_n) throw CapabilityError("phi-np: n above the supported maximum " + std::to_string(nmf_max_n));
  }

  PhiNpResult solve(std::span<const double> s) {
    detail::validate_s(family_, s);
    PhiNpResult res;
    res.rate = rate(n_, p_, family_.max_degree);
    const double r = res.rate;
    const std::size_t m = family_.size();
    const std::vector<double> sv(s.begin(), s.end());

    if (std::all_of(sv.begin(), sv.end(), [](double x) { return x == 0.0; }))
      return finish(std::move(res), WeightTable(n_, p_), sv, "solver", 0.0);

    std::vector<std::pair<std::string, WeightTable>> starts{{"constant", WeightTable(n_, p_)}};
    const auto planar = phi_solve(family_, sv, opt_.planar);
    std::vector<PlanarPoint> points = planar.optimizers;
    for (const auto& c : planar.candidates)
      if (c.feasible && (c.point.a == 0.0 || c.point.b == 0.0)) points.push_back(c.point);
    for (const auto& pt : points) {
      const auto w = detail::feasible_witness(family_, n_, p_, sv, pt);
      if (!w) continue;
      const double e = w->entropy();
      if (e < res.witness_value) {
        res.witness_value = e;
        res.witness_origin = "clique-hub(" + std::to_string(w->clique.size()) + "," + std::to_string(w->hub.size()) + ")";
        starts.push_back({res.witness_origin, w->table()});
      }
    }

    const detail::AscentOptions aopt{opt_.max_iter, opt_.grad_tol, opt_.clip, 1.0 - opt_.clip};
    std::optional<WeightTable> best_q;
    for (const auto& [origin, q0] : starts) {
      detail::Vec x = detail::to_vec(q0);
      double mu = r;
      for (int round = 0; round < opt_.rounds; ++round, mu *= opt_.penalty_growth) {
        auto f = [&](const detail::Vec& y) {
          const auto t = detail::densities(family_, detail::to_table(n_, y), p_);
          double pen = 0.0;
          for (std::size_t k = 0; k < m; ++k)
            if (sv[k] > 0.0) pen += std::pow(std::max(0.0, 1.0 + sv[k] - t[k]), 2);
          return -(detail::entropy_of(y, p_) + mu * pen);
        };
        auto g = [&](const detail::Vec& y) {
          const auto yc = detail::project(y, opt_.clip, 1.0 - opt_.clip);
          const WeightTable q = detail::to_table(n_, yc);
          const auto t = detail::densities(family_, q, p_);
          detail::Vec grad = -detail::entropy_gradient(yc, p_);
          for (std::size_t k = 0; k < m; ++k) {
            const double v = sv[k] > 0.0 ? std::max(0.0, 1.0 + sv[k] - t[k]) : 0.0;
            if (v > 0.0) grad += (2.0 * mu * v) * detail::lower_triangle(hom_density_gradient(family_[k], q, p_));
          }
          return grad;
        };
        const auto run = detail::projected_ascent(f, g, x, aopt);
        res.iterations += run.iterations;
        x = run.x;
      }
      const auto fixed = detail::repair(family_, detail::to_table(n_, x), p_, sv);
      if (!fixed) continue;
      const double e = entropy(*fixed, p_);
      if (e < res.solver_value) {
        res.solver_value = e;
        best_q = *fixed;
      }
    }

    std::optional<WeightTable> chosen;
    std::string source;
    double value = std::numeric_limits<double>::infinity();
    if (best_q) {
      chosen = best_q;
      value = res.solver_value;
      source = "solver";
    }
    if (res.witness_value < value) {
      for (const auto& pt : points) {
        const auto w = detail::feasible_witness(family_, n_, p_, sv, pt);
        if (w && w->entropy() == res.witness_value) {
          chosen = w->table();
          break;
        }
      }
      value = res.witness_value;
      source = "witness";
    }
    for (const auto& c : cache_) {
      bool dominates = true;
      for (std::size_t k = 0; k < m; ++k)
        if (c.s[k] < sv[k]) dominates = false;
      if (dominates && c.value < value) {
        chosen = c.q;
        value = c.value;
        source = "cache";
      }
    }
    if (!chosen)
      throw DomainError("phi-np: constraints are infeasible at this n and p (even the complete graph fails)");
    return finish(std::move(res), *chosen, sv, source, value);
  }

  const MotifFamily& family() const noexcept { return family_; }

private:
  struct Cached {
    std::vector<double> s;
    WeightTable q;
    double value;
  };

  PhiNpResult finish(PhiNpResult res, const WeightTable& q, const std::vector<double>& s, std::string source,
                     double value) {
    res.q = q;
    res.value = value;
    res.source = std::move(source);
    res.densities = detail::densities(family_, q, p_);
    for (std::size_t k = 0; k < s.size(); ++k)
      res.residuals.push_back(s[k] > 0.0 ? std::max(0.0, 1.0 + s[k] - res.densities[k]) / (1.0 + s[k]) : 0.0);
    for (double v : res.residuals)
      if (v > opt_.feasibility_tol) res.warnings.push_back("constraint residual above tolerance");
    cache_.push_back({s, q, value});
    return res;
  }

  MotifFamily family_;
  int n_;
  double p_;
  PhiNpOptions opt_;
  std::vector<Cached> cache_;
};

inline PhiNpResult phi_np_solve(const MotifFamily& family, int n, double p, std::span<const double> s,
                                const PhiNpOptions& opt = {}) {
  return PhiNpSolver(family, n, p, opt).solve(s);
}

struct StabilityReport {
  double distance = std::numeric_limits<double>::infinity();  // ||Q - Q^{I,J}||_HS / (n p^{D/2})
  PlanarPoint optimizer;
  int clique_size = 0;
  int hub_size = 0;
  std::vector<int> clique;
  std::vector<int> hub;
};

/// Distance from q to the nearest aligned clique-hub graph over Opt(phi; s).
/// Alignment takes J as the |J| rows of largest total mass and I as the |I|
/// remaining rows of largest mass outside J.
inline StabilityReport stability_probe(const MotifFamily& family, const WeightTable& q, double p,
                                       std::span<const double> s, const PlanarOptions& popt = {}) {
  check_p(p);
  const int n = q.n();
  const auto planar = phi_solve(family, s, popt);
  const auto m = q.matrix();
  StabilityReport best;
  for (const auto& pt : planar.optimizers) {
    const auto [ni, nj] = clique_hub_sizes(n, p, family.max_degree, pt.a, pt.b);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    const Eigen::VectorXd rows = m.rowwise().sum();
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return rows(x) > rows(y); });
    std::vector<int> hub(order.begin(), order.begin() + nj);
    std::vector<char> in_hub(n, 0);
    for (int v : hub) in_hub[v] = 1;
    Eigen::VectorXd outside = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (!in_hub[j]) outside(i) += m(i, j);
    std::vector<int> rest;
    for (int v : order)
      if (!in_hub[v]) rest.push_back(v);
    std::stable_sort(rest.begin(), rest.end(), [&](int x, int y) { return outside(x) > outside(y); });
    std::vector<int> clique(rest.begin(), rest.begin() + ni);
    std::sort(clique.begin(), clique.end());
    std::sort(hub.begin(), hub.end());
    const CliqueHub h{n, p, clique, hub};
    const double hs = (m - h.table().matrix()).norm();
    const double dist = hs / (n * std::pow(p, 0.5 * family.max_degree));
    if (dist < best.distance) best = {dist, pt, ni, nj, clique, hub};
  }
  return best;
}

}  // namespace sparse_ergm

#endif  // SPARSE_ERGM_NMF_HPP
