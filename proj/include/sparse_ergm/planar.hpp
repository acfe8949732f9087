#ifndef SPARSE_ERGM_PLANAR_HPP
#define SPARSE_ERGM_PLANAR_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sparse_ergm/errors.hpp"
#include "sparse_ergm/indep_poly.hpp"
#include "sparse_ergm/motif.hpp"
#include "sparse_ergm/optim.hpp"

namespace sparse_ergm {

/// Unique x >= 0 with P(x) = y.
inline double p_inverse(const IndepPoly& p, double y) {
  if (!(y >= 1.0) || !std::isfinite(y)) throw DomainError("p_inverse: argument must be finite and >= 1");
  if (y == 1.0) return 0.0;
  const auto& c = p.coefficients();
  if (p.degree() == 0) throw DomainError("p_inverse: constant polynomial cannot reach " + std::to_string(y));
  if (p.degree() == 1) return (y - 1.0) / static_cast<double>(c[1]);
  double lo = 0.0, hi = 1.0;
  while (p(hi) < y) {
    lo = hi;
    hi *= 2.0;
  }
  // Bisect down to adjacent doubles, then one Newton step for the last ulp.
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (p(mid) < y ? lo : hi) = mid;
  }
  double x = std::abs(p(lo) - y) <= std::abs(p(hi) - y) ? lo : hi;
  const double dp = p.derivative(x);
  if (dp > 0.0) {
    const double nx = x - (p(x) - y) / dp;
    if (nx >= 0.0 && std::abs(p(nx) - y) < std::abs(p(x) - y)) x = nx;
  }
  return x;
}

struct PlanarPoint {
  double a = 0.0;
  double b = 0.0;

  double objective() const noexcept { return 0.5 * a + b; }
  friend bool operator==(const PlanarPoint&, const PlanarPoint&) = default;
};

inline bool canonical_less(const PlanarPoint& p, const PlanarPoint& q) {
  return p.a != q.a ? p.a < q.a : p.b < q.b;
}

struct PlanarCandidate {
  PlanarPoint point;
  bool feasible = false;
  std::string origin;  // "axis-a", "axis-b", "pair k,l"
};

struct PlanarOptions {
  double bisection_tol = 1e-12;
  double dedup_distance = 1e-8;
  double tie_tolerance = 1e-9;
  double near_tie_window = 1e-6;
  double feasibility_tol = 1e-10;  // relative slack on T_k >= 1+s_k
  double active_tol = 1e-8;        // relative slack for reporting active constraints
  int scan_points = 512;
};

struct PlanarSolution {
  double value = 0.0;
  std::vector<PlanarPoint> optimizers;
  /// Per optimizer: motif indices k with T_k = 1+s_k, then m for a = 0 and m+1 for b = 0.
  std::vector<std::vector<int>> active_constraints;
  double tolerance = 0.0;
  bool near_tie = false;
  std::vector<PlanarCandidate> candidates;
};

/// Level curve {T_k(a,b) = 1+s_k} of one motif in the planar problem.
struct LevelCurve {
  std::size_t index = 0;  // position in the family
  PlanarProfile profile;
  double target = 1.0;  // 1 + s_k
  double b_star = 0.0;  // hub intercept P^{-1}(1+s_k)
  double a_star = 0.0;  // clique intercept s_k^{2/v} (regular only)

  LevelCurve(std::size_t k, const Motif& f, double s)
      : index(k), profile(f), target(1.0 + s), b_star(p_inverse(profile.core_poly, 1.0 + s)) {
    if (profile.regular) a_star = std::pow(s, 2.0 / profile.vertices);
  }

  bool regular() const noexcept { return profile.regular; }

  /// Clique coordinate on the curve as a function of b (regular motifs).
  double a_of_b(double b) const {
    const double slack = target - profile.core_poly(b);
    return slack > 0.0 ? std::pow(slack, 2.0 / profile.vertices) : 0.0;
  }

  double value(const PlanarPoint& p) const { return profile(p.a, p.b); }
};

namespace detail {

inline void validate_s(const MotifFamily& family, std::span<const double> s) {
  if (s.size() != family.size())
    throw DomainError("phi_solve: expected " + std::to_string(family.size()) + " s values, got " +
                      std::to_string(s.size()));
  for (double x : s)
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("phi_solve: s values must be finite and nonnegative");
}

inline std::vector<LevelCurve> level_curves(const MotifFamily& family, std::span<const double> s) {
  std::vector<LevelCurve> out;
  for (std::size_t k = 0; k < family.size(); ++k)
    if (s[k] > 0.0) out.emplace_back(k, family[k], s[k]);
  return out;
}

/// Intersections of two regular level curves, found as sign changes of a_k(b) - a_l(b).
inline std::vector<PlanarPoint> regular_intersections(const LevelCurve& k, const LevelCurve& l,
                                                      const PlanarOptions& opt) {
  std::vector<PlanarPoint> out;
  const double hi = std::min(k.b_star, l.b_star);
  if (!(hi > 0.0)) return out;
  auto gap = [&](double b) { return k.a_of_b(b) - l.a_of_b(b); };
  auto push = [&](double b) {
    if (b >= hi) return;  // the curve touches the axis there; handled by axis candidates
    out.push_back({0.5 * (k.a_of_b(b) + l.a_of_b(b)), b});
  };
  const int n = std::max(opt.scan_points, 8);
  double prev_b = 0.0, prev_g = gap(0.0);
  if (prev_g == 0.0) push(0.0);
  for (int i = 1; i <= n; ++i) {
    const double b = hi * i / n;
    const double g = gap(b);
    if (g == 0.0) {
      push(b);
    } else if (prev_g != 0.0 && (g > 0) != (prev_g > 0)) {
      push(optim::bisect(gap, prev_b, b, opt.bisection_tol));
    }
    prev_b = b;
    prev_g = g;
  }
  return out;
}

inline bool feasible(const std::vector<LevelCurve>& curves, const PlanarPoint& p, double tol) {
  if (!(p.a >= 0.0) || !(p.b >= 0.0)) return false;
  for (const auto& c : curves)
    if (c.value(p) < c.target * (1.0 - tol)) return false;
  return true;
}

}  // namespace detail

/// Minimizes a/2 + b over the region {T_k(a,b) >= 1+s_k for all k} by
/// enumerating axis intercepts and pairwise level-curve intersections.
inline PlanarSolution phi_solve(const MotifFamily& family, std::span<const double> s,
                                const PlanarOptions& opt = {}) {
  detail::validate_s(family, s);
  const auto curves = detail::level_curves(family, s);
  const int m = static_cast<int>(family.size());
  PlanarSolution sol;
  sol.tolerance = opt.tie_tolerance;
  if (curves.empty()) {
    sol.value = 0.0;
    sol.optimizers = {{0.0, 0.0}};
    std::vector<int> act;
    for (int k = 0; k < m; ++k) act.push_back(k);
    act.push_back(m);
    act.push_back(m + 1);
    sol.active_constraints = {act};
    sol.candidates = {{{0.0, 0.0}, true, "origin"}};
    return sol;
  }

  auto& cand = sol.candidates;
  for (const auto& c : curves) {
    cand.push_back({{0.0, c.b_star}, false, "axis-b " + std::to_string(c.index)});
    if (c.regular()) cand.push_back({{c.a_star, 0.0}, false, "axis-a " + std::to_string(c.index)});
  }
  for (std::size_t i = 0; i < curves.size(); ++i)
    for (std::size_t j = i + 1; j < curves.size(); ++j) {
      const auto& k = curves[i];
      const auto& l = curves[j];
      const std::string tag = "pair " + std::to_string(k.index) + "," + std::to_string(l.index);
      if (k.regular() && l.regular()) {
        for (const auto& p : detail::regular_intersections(k, l, opt)) cand.push_back({p, false, tag});
      } else if (k.regular() != l.regular()) {
        const auto& reg = k.regular() ? k : l;
        const auto& irr = k.regular() ? l : k;
        if (irr.b_star < reg.b_star) cand.push_back({{reg.a_of_b(irr.b_star), irr.b_star}, false, tag});
      }
      // Two irregular curves are parallel horizontal lines: only axis points matter.
    }

  double best = std::numeric_limits<double>::infinity();
  for (auto& c : cand) {
    c.feasible = detail::feasible(curves, c.point, opt.feasibility_tol);
    if (c.feasible) best = std::min(best, c.point.objective());
  }
  if (!std::isfinite(best)) throw InternalError("phi_solve: no feasible candidate found");
  sol.value = best;

  std::vector<PlanarPoint> opts;
  for (const auto& c : cand) {
    if (!c.feasible) continue;
    const double obj = c.point.objective();
    if (obj - best <= opt.tie_tolerance * std::max(1.0, best)) {
      const bool dup = std::any_of(opts.begin(), opts.end(), [&](const PlanarPoint& q) {
        return std::hypot(q.a - c.point.a, q.b - c.point.b) <= opt.dedup_distance;
      });
      if (!dup) opts.push_back(c.point);
    }
  }
  std::sort(opts.begin(), opts.end(), canonical_less);
  for (const auto& c : cand) {
    if (!c.feasible) continue;
    const double gap = c.point.objective() - best;
    const bool far = std::all_of(opts.begin(), opts.end(), [&](const PlanarPoint& q) {
      return std::hypot(q.a - c.point.a, q.b - c.point.b) > opt.dedup_distance;
    });
    if (far && gap > opt.tie_tolerance * std::max(1.0, best) && gap <= opt.near_tie_window * std::max(1.0, best))
      sol.near_tie = true;
  }
  for (const auto& p : opts) {
    std::vector<int> act;
    for (int k = 0; k < m; ++k) {
      const double target = 1.0 + s[k];
      const double t = PlanarProfile(family[k])(p.a, p.b);
      if (std::abs(t - target) <= opt.active_tol * target) act.push_back(k);
    }
    if (p.a == 0.0) act.push_back(m);
    if (p.b == 0.0) act.push_back(m + 1);
    sol.active_constraints.push_back(std::move(act));
  }
  sol.optimizers = std::move(opts);
  return sol;
}

inline PlanarSolution phi_solve(const MotifFamily& family, std::initializer_list<double> s,
                                const PlanarOptions& opt = {}) {
  return phi_solve(family, std::span<const double>(s.begin(), s.size()), opt);
}

inline double phi_value(const MotifFamily& family, std::span<const double> s, const PlanarOptions& opt = {}) {
  return phi_solve(family, s, opt).value;
}

struct RegionGrid {
  double a_max = 1.0;
  double b_max = 1.0;
  int a_steps = 100;
  int b_steps = 100;
};

struct RegionRow {
  double a, b;
  bool feasible;
  double objective;
};

struct RegionData {
  std::vector<RegionRow> rows;
  /// One polyline of (a,b) points per motif, in family order; empty when s_k = 0.
  std::vector<std::vector<PlanarPoint>> curves;
};

/// Samples the feasible region on a grid and traces every level curve.
inline RegionData phi_region_emit(const MotifFamily& family, std::span<const double> s, const RegionGrid& grid,
                                  int curve_points = 200) {
  detail::validate_s(family, s);
  if (!(grid.a_max > 0.0) || !(grid.b_max > 0.0) || grid.a_steps < 1 || grid.b_steps < 1)
    throw DomainError("region grid: bounds and step counts must be positive");
  const auto curves = detail::level_curves(family, s);
  RegionData out;
  for (int i = 0; i <= grid.a_steps; ++i)
    for (int j = 0; j <= grid.b_steps; ++j) {
      const PlanarPoint p{grid.a_max * i / grid.a_steps, grid.b_max * j / grid.b_steps};
      out.rows.push_back({p.a, p.b, detail::feasible(curves, p, 0.0), p.objective()});
    }
  out.curves.resize(family.size());
  for (const auto& c : curves) {
    auto& line = out.curves[c.index];
    if (c.regular()) {
      for (int i = 0; i <= curve_points; ++i) {
        const double b = c.b_star * i / curve_points;
        line.push_back({c.a_of_b(b), b});
      }
    } else {
      line.push_back({0.0, c.b_star});
      line.push_back({grid.a_max, c.b_star});
    }
  }
  return out;
}

}  // namespace sparse_ergm

#endif  // SPARSE_ERGM_PLANAR_HPP
