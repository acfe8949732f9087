#ifndef SPARSE_ERGM_OPTIM_HPP
#define SPARSE_ERGM_OPTIM_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "sparse_ergm/errors.hpp"

namespace sparse_ergm::optim {

struct Point1 {
  double x = 0.0;
  double value = 0.0;
};

/// Root of a continuous function with g(lo) and g(hi) of opposite sign (or zero).
template <class F>
double bisect(F&& g, double lo, double hi, double abs_tol = 1e-14, int max_iter = 400) {
  double glo = g(lo), ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if ((glo > 0) == (ghi > 0)) throw InternalError("bisection: root is not bracketed");
  for (int it = 0; it < max_iter && hi - lo > abs_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm > 0) == (glo > 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
template <class F>
Point1 golden_max(F&& f, double lo, double hi, double abs_tol = 1e-13, int max_iter = 300) {
  constexpr double inv_phi = 0.6180339887498949;
  double c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && hi - lo > abs_tol * std::max(1.0, std::abs(lo) + std::abs(hi)); ++it) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  Point1 best{lo, f(lo)};
  for (double x : {c, d, hi}) {
    const double fx = f(x);
    if (fx > best.value) best = {x, fx};
  }
  return best;
}

/// Best of golden-section runs on `starts` equal sub-brackets of [lo, hi].
/// All sub-bracket maxima are returned sorted by decreasing value.
template <class F>
std::vector<Point1> multistart_golden_max(F&& f, double lo, double hi, int starts = 8, double abs_tol = 1e-13) {
  std::vector<Point1> out;
  for (int k = 0; k < starts; ++k) {
    const double a = lo + (hi - lo) * k / starts, b = lo + (hi - lo) * (k + 1) / starts;
    out.push_back(golden_max(f, a, b, abs_tol));
  }
  std::sort(out.begin(), out.end(), [](const Point1& p, const Point1& q) { return p.value > q.value; });
  return out;
}

struct NelderMeadOptions {
  int max_evaluations = 4000;
  double initial_step = 0.1;
  double value_tol = 1e-15;
  int restarts = 6;
};

struct PointN {
  std::vector<double> x;
  double value = -std::numeric_limits<double>::infinity();
  int evaluations = 0;
};

/// Nelder-Mead maximization with restarts from the incumbent; each restart
/// shrinks the initial simplex.
template <class F>
PointN nelder_mead_max(F&& f, std::vector<double> x0, const NelderMeadOptions& opt = {}) {
  const std::size_t d = x0.size();
  PointN best{x0, f(x0), 1};
  double step = opt.initial_step;
  for (int restart = 0; restart <= opt.restarts; ++restart) {
    std::vector<std::vector<double>> simplex(d + 1, best.x);
    std::vector<double> vals(d + 1, best.value);
    for (std::size_t i = 0; i < d; ++i) {
      const double h = step * std::max(1.0, std::abs(best.x[i]));
      simplex[i + 1][i] += h;
      vals[i + 1] = f(simplex[i + 1]);
    }
    int evals = static_cast<int>(d);
    std::vector<std::size_t> idx(d + 1);
    while (evals < opt.max_evaluations) {
      std::iota(idx.begin(), idx.end(), 0);
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
      const double top = vals[idx[0]], bottom = vals[idx[d]];
      if (std::abs(top - bottom) <= opt.value_tol * (1.0 + std::abs(top))) break;
      std::vector<double> centroid(d, 0.0);
      for (std::size_t k = 0; k < d; ++k)
        for (std::size_t i = 0; i < d; ++i) centroid[i] += simplex[idx[k]][i] / static_cast<double>(d);
      auto along = [&](double t) {
        std::vector<double> p(d);
        for (std::size_t i = 0; i < d; ++i) p[i] = centroid[i] + t * (simplex[idx[d]][i] - centroid[i]);
        return p;
      };
      const auto reflected = along(-1.0);
      const double fr = f(reflected);
      ++evals;
      if (fr > top) {
        const auto expanded = along(-2.0);
        const double fe = f(expanded);
        ++evals;
        if (fe > fr) {
          simplex[idx[d]] = expanded;
          vals[idx[d]] = fe;
        } else {
          simplex[idx[d]] = reflected;
          vals[idx[d]] = fr;
        }
      } else if (fr > vals[idx[d - 1]]) {
        simplex[idx[d]] = reflected;
        vals[idx[d]] = fr;
      } else {
        const bool outside = fr > bottom;
        const auto contracted = along(outside ? -0.5 : 0.5);
        const double fc = f(contracted);
        ++evals;
        if (fc > (outside ? fr : bottom)) {
          simplex[idx[d]] = contracted;
          vals[idx[d]] = fc;
        } else {
          for (std::size_t k = 1; k <= d; ++k) {
            for (std::size_t i = 0; i < d; ++i)
              simplex[idx[k]][i] = simplex[idx[0]][i] + 0.5 * (simplex[idx[k]][i] - simplex[idx[0]][i]);
            vals[idx[k]] = f(simplex[idx[k]]);
            ++evals;
          }
        }
      }
    }
    best.evaluations += evals;
    const auto top = std::max_element(vals.begin(), vals.end()) - vals.begin();
    const bool improved = vals[top] > best.value + 1e-15 * (1.0 + std::abs(best.value));
    if (vals[top] > best.value) {
      best.value = vals[top];
      best.x = simplex[top];
    }
    if (!improved && restart > 0) break;
    step *= 0.3;
  }
  return best;
}

}  // namespace sparse_ergm::optim

#endif  // SPARSE_ERGM_OPTIM_HPP
