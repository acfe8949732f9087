#ifndef SPARSE_ERGM_HAMILTONIAN_HPP
#define SPARSE_ERGM_HAMILTONIAN_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sparse_ergm/errors.hpp"
#include "sparse_ergm/indep_poly.hpp"
#include "sparse_ergm/motif.hpp"
#include "sparse_ergm/optim.hpp"
#include "sparse_ergm/planar.hpp"

namespace sparse_ergm {

/// beta * (x_k - shift)_+^gamma
struct HamTerm {
  int k = 0;
  double beta = 1.0;
  double shift = 1.0;
  double gamma = 1.0;

  double operator()(double x) const {
    const double d = x - shift;
    return d > 0.0 ? beta * std::pow(d, gamma) : 0.0;
  }
  double derivative(double x) const {
    const double d = x - shift;
    return d > 0.0 ? beta * gamma * std::pow(d, gamma - 1.0) : 0.0;
  }
};

/// h(x) = sum of terms over the motif densities x_1..x_m.
struct HamiltonianSpec {
  MotifFamily family;
  std::vector<HamTerm> terms;
  bool allow_degenerate = false;

  double operator()(std::span<const double> x) const {
    double h = 0.0;
    for (const auto& t : terms) h += t(x[t.k]);
    return h;
  }

  /// Growth exponent bound Delta/e(F_k) for term t.
  double growth_bound(const HamTerm& t) const {
    return static_cast<double>(family.max_degree) / family[t.k].edge_count();
  }
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> warnings;
};

/// Rejects nonpositive parameters (DomainError) and growth violations
/// (HypothesisError) unless degenerate specs are explicitly allowed.
inline ValidationReport validate(const HamiltonianSpec& spec) {
  ValidationReport r;
  r.warnings = spec.family.warnings;
  for (std::size_t i = 0; i < spec.terms.size(); ++i) {
    const auto& t = spec.terms[i];
    const std::string where = "hamiltonian term " + std::to_string(i);
    if (t.k < 0 || static_cast<std::size_t>(t.k) >= spec.family.size())
      throw DomainError(where + ": motif index out of range");
    if (!(t.beta > 0.0) || !std::isfinite(t.beta)) throw DomainError(where + ": beta must be positive");
    if (!(t.gamma > 0.0) || !std::isfinite(t.gamma)) throw DomainError(where + ": exponent must be positive");
    if (!std::isfinite(t.shift)) throw DomainError(where + ": shift must be finite");
    const double bound = spec.growth_bound(t);
    if (t.gamma >= bound) {
      const std::string msg = where + ": exponent " + std::to_string(t.gamma) + " violates growth bound " +
                              std::to_string(bound) + " (Delta/e(F))";
      if (!spec.allow_degenerate) throw HypothesisError(msg);
      r.warnings.push_back(msg + "; degenerate regime: optimizers may escape to infinity for any beta > 0");
      r.ok = false;
    }
  }
  return r;
}

struct PsiOptions {
  int grid = 101;
  int refine_starts = 10;
  double opt_tolerance = 1e-9;  // relative value tie for Opt(psi)
  double dedup_distance = 1e-6;
  int dual_grid = 6;
  int dual_starts = 6;
  PlanarOptions planar;
};

struct PsiSolution {
  double value = 0.0;       // direct maximization
  double dual_value = 0.0;  // sup_s h(1+s) - phi(s)
  double excess = 0.0;      // value - h(1)
  std::vector<PlanarPoint> optimizers;
  std::vector<std::vector<double>> s_star;
  double radius = 0.0;  // search bound on a/2 + b
  std::vector<std::string> warnings;
};

namespace detail {

inline std::vector<PlanarProfile> profiles(const MotifFamily& fam) {
  std::vector<PlanarProfile> out;
  for (const auto& f : fam.motifs) out.emplace_back(f);
  return out;
}

struct PsiObjective {
  const HamiltonianSpec& spec;
  std::vector<PlanarProfile> prof;
  mutable std::vector<double> buf;

  explicit PsiObjective(const HamiltonianSpec& s) : spec(s), prof(profiles(s.family)), buf(prof.size()) {}

  double operator()(double a, double b) const {
    for (std::size_t k = 0; k < prof.size(); ++k) buf[k] = prof[k](a, b);
    return spec(buf) - 0.5 * a - b;
  }

  std::vector<double> s_of(double a, double b) const {
    std::vector<double> s(prof.size());
    for (std::size_t k = 0; k < prof.size(); ++k) {
      s[k] = prof[k](a, b) - 1.0;
      if (s[k] < 1e-13 * (1.0 + a + b)) s[k] = 0.0;
    }
    return s;
  }
};

/// Smallest R (doubling) with h(T(2t,t)) - t < h(1) - 1 at t = R, 2R, 4R.
inline double psi_radius(const PsiObjective& obj) {
  const double base = obj(0.0, 0.0);
  auto upper = [&](double t) { return obj(2 * t, t) + 2 * t; };  // h(T(2t,t)) - t after undoing the penalty
  double r = 1.0;
  for (int it = 0; it < 200; ++it, r *= 2) {
    bool ok = true;
    for (double t : {r, 2 * r, 4 * r})
      if (!(upper(t) - t < base - 1.0)) ok = false;
    if (ok) return r;
  }
  throw HypothesisError("psi: objective does not decay; the Hamiltonian is degenerate (growth condition fails)");
}

}  // namespace detail

inline double psi_dual_objective(const HamiltonianSpec& spec, std::span<const double> s,
                                 const PlanarOptions& opt = {}) {
  std::vector<double> x(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) x[k] = 1.0 + s[k];
  return spec(x) - phi_value(spec.family, s, opt);
}

/// psi = sup_{a,b>=0} h(T(a,b)) - a/2 - b, with Opt(psi) and the dual set S*.
inline PsiSolution psi_solve(const HamiltonianSpec& spec, const PsiOptions& opt = {}) {
  const auto report = validate(spec);
  PsiSolution sol;
  sol.warnings = report.warnings;
  const detail::PsiObjective obj(spec);
  const std::vector<double> ones(spec.family.size(), 1.0);
  const double h1 = spec(ones);

  if (spec.terms.empty()) {
    sol.value = sol.dual_value = 0.0;
    sol.optimizers = {{0.0, 0.0}};
    sol.s_star = {std::vector<double>(spec.family.size(), 0.0)};
    return sol;
  }

  const double r = detail::psi_radius(obj);
  sol.radius = r;
  const double umax = std::sqrt(2 * r), vmax = std::sqrt(r);

  // Grid in (u,v) with a = u^2, b = v^2.
  struct Cell {
    double value, u, v;
  };
  std::vector<Cell> cells;
  for (int i = 0; i < opt.grid; ++i)
    for (int j = 0; j < opt.grid; ++j) {
      const double u = umax * i / (opt.grid - 1), v = vmax * j / (opt.grid - 1);
      cells.push_back({obj(u * u, v * v), u, v});
    }
  const int starts = std::min<int>(opt.refine_starts, static_cast<int>(cells.size()));
  std::partial_sort(cells.begin(), cells.begin() + starts, cells.end(),
                    [](const Cell& x, const Cell& y) { return x.value > y.value; });

  auto uv_objective = [&](const std::vector<double>& w) { return obj(w[0] * w[0], w[1] * w[1]); };
  // Snap (a,b) onto Opt(phi; s(a,b)) until the value stops improving.
  auto polish = [&](PlanarPoint p) {
    double val = obj(p.a, p.b);
    for (int it = 0; it < 20; ++it) {
      const auto ph = phi_solve(spec.family, obj.s_of(p.a, p.b), opt.planar);
      PlanarPoint best = p;
      double best_val = val;
      for (const auto& q : ph.optimizers) {
        const double vq = obj(q.a, q.b);
        if (vq > best_val) {
          best = q;
          best_val = vq;
        }
      }
      if (best_val <= val + 1e-15 * (1 + std::abs(val))) {
        // Accept the snapped point on exact ties so optimizers land on curve intersections.
        for (const auto& q : ph.optimizers)
          if (std::abs(obj(q.a, q.b) - val) <= 1e-15 * (1 + std::abs(val))) return std::pair{q, obj(q.a, q.b)};
        return std::pair{p, val};
      }
      p = best;
      val = best_val;
    }
    return std::pair{p, val};
  };

  std::vector<std::pair<PlanarPoint, double>> found;
  found.push_back(polish({0.0, 0.0}));
  for (int c = 0; c < starts; ++c) {
    const auto nm = optim::nelder_mead_max(uv_objective, {cells[c].u, cells[c].v}, {4000, 0.05, 1e-16, 6});
    found.push_back(polish({nm.x[0] * nm.x[0], nm.x[1] * nm.x[1]}));
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& f : found) best = std::max(best, f.second);
  sol.value = best;
  sol.excess = best - h1;
  for (const auto& [p, v] : found) {
    if (best - v > opt.opt_tolerance * (1 + std::abs(best))) continue;
    const bool dup = std::any_of(sol.optimizers.begin(), sol.optimizers.end(), [&](const PlanarPoint& q) {
      return std::hypot(q.a - p.a, q.b - p.b) <= opt.dedup_distance * (1 + std::hypot(p.a, p.b));
    });
    if (!dup) sol.optimizers.push_back(p);
  }
  std::sort(sol.optimizers.begin(), sol.optimizers.end(), canonical_less);
  for (const auto& p : sol.optimizers) sol.s_star.push_back(obj.s_of(p.a, p.b));
  if (sol.optimizers.size() > 16)
    sol.warnings.push_back("more than 16 optimizers; Opt(psi) may be a continuum");

  // Dual problem searched independently over s = w^2.
  const std::size_t m = spec.family.size();
  std::vector<double> s_max(m);
  for (std::size_t k = 0; k < m; ++k) s_max[k] = obj.prof[k](2 * r, r) - 1.0;
  auto dual = [&](const std::vector<double>& w) {
    std::vector<double> s(m);
    for (std::size_t k = 0; k < m; ++k) s[k] = w[k] * w[k];
    return psi_dual_objective(spec, s, opt.planar);
  };
  struct DualStart {
    double value;
    std::vector<double> w;
  };
  std::vector<DualStart> dstarts;
  std::vector<int> idx(m, 0);
  while (true) {
    std::vector<double> w(m);
    for (std::size_t k = 0; k < m; ++k) w[k] = std::sqrt(s_max[k]) * idx[k] / (opt.dual_grid - 1);
    dstarts.push_back({dual(w), w});
    std::size_t k = 0;
    while (k < m && ++idx[k] == opt.dual_grid) idx[k++] = 0;
    if (k == m) break;
  }
  const int ds = std::min<int>(opt.dual_starts, static_cast<int>(dstarts.size()));
  std::partial_sort(dstarts.begin(), dstarts.begin() + ds, dstarts.end(),
                    [](const DualStart& x, const DualStart& y) { return x.value > y.value; });
  double dual_best = dstarts[0].value;
  for (int c = 0; c < ds; ++c) {
    const auto nm = optim::nelder_mead_max(dual, dstarts[c].w, {3000, 0.05, 1e-16, 6});
    dual_best = std::max(dual_best, nm.value);
  }
  sol.dual_value = dual_best;
  return sol;
}

/// Single-motif model Ham = beta * f(t(F, X/p)), f(x) = (x - shift)_+^exponent.
struct EdgeFModel {
  Motif motif;
  double beta = 1.0;
  double exponent = 1.0 / 3.0;
  double shift = 1.0;

  HamiltonianSpec spec(bool allow_degenerate = false) const {
    return {MotifFamily::make({motif}), {{0, beta, shift, exponent}}, allow_degenerate};
  }
  double f(double x) const { return HamTerm{0, 1.0, shift, exponent}(x); }
  /// f(1+s) and f'(1+s) without forming 1+s, which loses digits for small s.
  double f_at(double s) const {
    const double d = s + (1.0 - shift);
    return d > 0.0 ? std::pow(d, exponent) : 0.0;
  }
  double f_prime_at(double s) const {
    const double d = s + (1.0 - shift);
    return d > 0.0 ? exponent * std::pow(d, exponent - 1.0) : 0.0;
  }
};

/// The exponent gamma/e(F) used by the CLI's --gamma convention.
inline EdgeFModel edge_f_model(const Motif& f, double gamma, double beta) {
  return {f, beta, gamma / f.edge_count(), 1.0};
}

enum class EdgePhase { hub, clique };

inline const char* to_string(EdgePhase p) { return p == EdgePhase::hub ? "hub" : "clique"; }

struct BranchMax {
  double s = 0.0;
  double value = 0.0;
  bool ambiguous = false;
  double s_alt = 0.0;  // second plateau endpoint when ambiguous
};

struct EdgeFReport {
  bool regular = false;
  std::optional<double> s_c;
  double beta_o = 0.0;
  std::optional<double> beta_c;
  BranchMax hub;
  std::optional<BranchMax> clique;
  EdgePhase phase = EdgePhase::hub;
  double s_star = 0.0;
  double a_star = 0.0;
  double b_star = 0.0;
  double psi = 0.0;
  std::vector<std::string> warnings;
};

namespace detail {

/// Maximizes a 1-D function on [lo, hi] by multi-start golden section, then
/// sharpens the location by bisecting the analytic derivative.
template <class U, class DU>
BranchMax branch_max(U&& u, DU&& du, double lo, double hi) {
  BranchMax out;
  if (!(hi > lo)) {
    out.s = lo;
    out.value = u(lo);
    return out;
  }
  constexpr int starts = 8;
  struct Probe {
    double x, value;
    bool interior;
  };
  std::vector<Probe> pts;
  for (int k = 0; k < starts; ++k) {
    const double a = lo + (hi - lo) * k / starts, b = lo + (hi - lo) * (k + 1) / starts;
    const auto p = optim::golden_max(u, a, b, 1e-15);
    const double width = b - a;
    pts.push_back({p.x, p.value, p.x > a + 1e-6 * width && p.x < b - 1e-6 * width});
  }
  for (double x : {lo, hi}) pts.push_back({x, u(x), true});
  std::sort(pts.begin(), pts.end(), [](const auto& p, const auto& q) { return p.value > q.value; });
  out.s = pts[0].x;
  out.value = pts[0].value;
  // Derivative refinement around the golden-section estimate.
  const double x0 = out.s;
  double step = 1e-7 * (1.0 + std::abs(x0));
  for (int it = 0; it < 40; ++it, step *= 2) {
    const double a = std::max(lo, x0 - step), b = std::min(hi, x0 + step);
    const double da = du(a), db = du(b);
    if (da > 0 && db < 0) {
      const double x = optim::bisect([&](double x) { return du(x); }, a, b, 1e-15 * (1 + std::abs(x0)));
      const double v = u(x);
      if (v >= out.value - 1e-14 * (1 + std::abs(v))) {
        out.s = x;
        out.value = std::max(out.value, v);
      }
      break;
    }
    if (a == lo && b == hi) break;
  }
  for (std::size_t k = 1; k < pts.size(); ++k)
    if (pts[k].interior && pts[0].value - pts[k].value <= 1e-12 * (1 + std::abs(pts[0].value)) &&
        std::abs(pts[k].x - out.s) >= 1e-5 * (1 + std::abs(out.s))) {
      out.ambiguous = true;
      out.s_alt = pts[k].x;
    }
  return out;
}

/// Upper end of the clique branch search: far enough that U is decreasing and
/// below its value at the left end.
template <class U>
double branch_upper(U&& u, double from) {
  const double ref = u(from);
  double hi = std::max(1.0, 2 * from);
  for (int it = 0; it < 200; ++it, hi *= 2)
    if (u(hi) < ref - 1.0 && u(2 * hi) < u(hi)) return hi;
  throw HypothesisError("edge-F: objective does not decay; the growth condition fails");
}

}  // namespace detail

/// Solves the one-dimensional edge-F problem U(beta,s) = beta f(1+s) - phi_F(s).
inline EdgeFReport edge_f_solve(const EdgeFModel& model) {
  if (model.motif.edge_count() == 0 || !model.motif.is_connected())
    throw DomainError("edge-F: motif must be connected with at least one edge");
  if (!(model.beta >= 0.0)) throw DomainError("edge-F: beta must be nonnegative");
  EdgeFReport rep;
  if (model.beta > 0.0) {
    rep.warnings = validate(model.spec()).warnings;
  } else if (!(model.exponent > 0.0)) {
    throw DomainError("edge-F: exponent must be positive");
  }
  const PlanarProfile prof(model.motif);
  const int v = prof.vertices;
  rep.regular = prof.regular;
  auto hub_phi = [&](double s) { return p_inverse(prof.core_poly, 1.0 + s); };
  auto hub_dphi = [&](double s) { return 1.0 / prof.core_poly.derivative(hub_phi(s)); };
  auto clique_phi = [&](double s) { return 0.5 * std::pow(s, 2.0 / v); };
  auto clique_dphi = [&](double s) { return s > 0 ? std::pow(s, 2.0 / v - 1.0) / v : 1e300; };

  auto solve_at = [&](double beta, BranchMax& hub, std::optional<BranchMax>& clique) {
    auto u_hub = [&](double s) { return beta * model.f_at(s) - hub_phi(s); };
    auto du_hub = [&](double s) { return beta * model.f_prime_at(s) - hub_dphi(s); };
    auto u_cl = [&](double s) { return beta * model.f_at(s) - clique_phi(s); };
    auto du_cl = [&](double s) { return beta * model.f_prime_at(s) - clique_dphi(s); };
    if (rep.s_c) {
      hub = detail::branch_max(u_hub, du_hub, 0.0, *rep.s_c);
      clique = detail::branch_max(u_cl, du_cl, *rep.s_c, detail::branch_upper(u_cl, *rep.s_c));
    } else {
      hub = detail::branch_max(u_hub, du_hub, 0.0, detail::branch_upper(u_hub, 0.0));
      clique.reset();
    }
  };

  if (rep.regular) {
    auto g = [&](double s) { return clique_phi(s) - hub_phi(s); };
    double hi = 1.0;
    while (g(hi) > 0) {
      hi *= 2;
      if (hi > 1e300) throw InternalError("edge-F: cannot bracket s_c");
    }
    double lo = hi / 2;
    while (lo > 1e-300 && g(lo) <= 0) lo /= 2;
    rep.s_c = optim::bisect(g, lo, hi, 0.0);
  }

  solve_at(model.beta, rep.hub, rep.clique);
  if (rep.hub.ambiguous) rep.warnings.push_back("hub branch maximizer is not unique");
  if (rep.clique && rep.clique->ambiguous) rep.warnings.push_back("clique branch maximizer is not unique");

  if (rep.regular) {
    // beta_c: crossing of the two branch maxima, bracket doubled from 1.
    auto gap = [&](double beta) {
      BranchMax h;
      std::optional<BranchMax> c;
      solve_at(beta, h, c);
      return h.value - c->value;
    };
    double hi = 1.0;
    int doublings = 0;
    while (gap(hi) > 0) {
      hi *= 2;
      if (++doublings > 20) throw InternalError("edge-F: cannot bracket the critical beta");
    }
    double lo = hi / 2;
    while (lo > 1e-12 && gap(lo) <= 0) lo /= 2;
    rep.beta_c = optim::bisect(gap, lo, hi, 1e-14 * hi);
    const bool clique_wins = rep.clique->value > rep.hub.value;
    rep.phase = clique_wins ? EdgePhase::clique : EdgePhase::hub;
  }
  if (rep.phase == EdgePhase::hub) {
    rep.s_star = rep.hub.s;
    rep.b_star = hub_phi(rep.hub.s);
    rep.psi = rep.hub.value;
  } else {
    rep.s_star = rep.clique->s;
    rep.a_star = std::pow(rep.clique->s, 2.0 / v);
    rep.psi = rep.clique->value;
  }

  // beta_o = inf_{s>0} phi(s) / (f(1+s) - f(1)) over s in [e^-20, e^30] with golden refinement.
  auto phi = [&](double s) { return rep.s_c && s >= *rep.s_c ? clique_phi(s) : hub_phi(s); };
  auto ratio = [&](double ls) {
    const double s = std::exp(ls);
    const double df = model.f_at(s) - model.f_at(0.0);
    return df > 0 ? phi(s) / df : std::numeric_limits<double>::infinity();
  };
  double best_ls = -20, best_r = ratio(-20);
  for (double ls = -20; ls <= 30; ls += 0.25)
    if (ratio(ls) < best_r) {
      best_r = ratio(ls);
      best_ls = ls;
    }
  const auto refined = optim::golden_max([&](double ls) { return -ratio(ls); }, best_ls - 0.25, best_ls + 0.25);
  rep.beta_o = std::min(best_r, -refined.value);
  return rep;
}

/// True iff the branch maximizers do not decrease from beta1 to beta2.
inline bool monotone_selection_check(EdgeFModel model, double beta1, double beta2, double tol = 1e-7) {
  if (beta1 > beta2) std::swap(beta1, beta2);
  if (beta1 == beta2) return true;
  model.beta = beta1;
  const auto r1 = edge_f_solve(model);
  model.beta = beta2;
  const auto r2 = edge_f_solve(model);
  bool ok = r2.hub.s >= r1.hub.s - tol * (1 + r1.hub.s);
  if (r1.clique && r2.clique) ok = ok && r2.clique->s >= r1.clique->s - tol * (1 + r1.clique->s);
  return ok;
}

}  // namespace sparse_ergm

#endif  // SPARSE_ERGM_HAMILTONIAN_HPP
