#ifndef SPARSE_ERGM_INDEP_POLY_HPP
#define SPARSE_ERGM_INDEP_POLY_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sparse_ergm/errors.hpp"
#include "sparse_ergm/motif.hpp"

namespace sparse_ergm {

/// Independence polynomial sum_j c_j x^j, c_j = number of independent sets of size j.
class IndepPoly {
public:
  IndepPoly() : coefficients_{1} {}
  explicit IndepPoly(std::vector<std::uint64_t> coefficients) : coefficients_(std::move(coefficients)) {
    if (coefficients_.empty() || coefficients_[0] != 1)
      throw DomainError("independence polynomial: constant term must be 1");
    while (coefficients_.size() > 1 && coefficients_.back() == 0) coefficients_.pop_back();
  }

  const std::vector<std::uint64_t>& coefficients() const noexcept { return coefficients_; }
  int degree() const noexcept { return static_cast<int>(coefficients_.size()) - 1; }

  double operator()(double x) const noexcept {
    double y = 0.0;
    for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) y = y * x + static_cast<double>(*it);
    return y;
  }

  double derivative(double x) const noexcept {
    double y = 0.0;
    for (int j = degree(); j >= 1; --j) y = y * x + static_cast<double>(j) * static_cast<double>(coefficients_[j]);
    return y;
  }

  friend bool operator==(const IndepPoly&, const IndepPoly&) = default;

private:
  std::vector<std::uint64_t> coefficients_;
};

inline constexpr int indep_poly_vertex_cap = 24;

/// Exact enumeration of independent sets.
inline IndepPoly indep_poly(const Motif& f) {
  const int v = f.vertex_count();
  if (v > indep_poly_vertex_cap)
    throw CapabilityError("independence polynomial: at most " + std::to_string(indep_poly_vertex_cap) +
                          " vertices, got " + std::to_string(v));
  const auto& masks = f.adjacency_masks();
  std::vector<std::uint64_t> c(v + 1, 0);
  // Extend independent sets one vertex at a time in increasing order.
  auto recurse = [&](auto&& self, int next, std::uint32_t blocked, int size) -> void {
    ++c[size];
    for (int u = next; u < v; ++u)
      if (!(blocked & (1u << u))) self(self, u + 1, blocked | masks[u] | (1u << u), size + 1);
  };
  recurse(recurse, 0, 0u, 0);
  return IndepPoly(std::move(c));
}

/// Planar data of a motif: P_{F*}, regularity and v(F).
struct PlanarProfile {
  IndepPoly core_poly;
  bool regular = false;
  int vertices = 0;
  int edges = 0;
  int max_degree = 0;

  explicit PlanarProfile(const Motif& f)
      : core_poly(indep_poly(f.core())),
        regular(f.is_regular()),
        vertices(f.vertex_count()),
        edges(f.edge_count()),
        max_degree(f.max_degree()) {}

  /// T_F(a,b) = P_{F*}(b) + a^{v/2} [F regular].
  double operator()(double a, double b) const noexcept {
    return core_poly(b) + (regular ? std::pow(a, 0.5 * vertices) : 0.0);
  }
};

inline double t_planar(const Motif& f, double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0)) throw DomainError("t_planar: a and b must be nonnegative");
  return PlanarProfile(f)(a, b);
}

/// r_{n,p} = n^2 p^Delta log(1/p).
inline double rate(long long n, double p, int max_degree) {
  if (n <= 0) throw DomainError("rate: n must be positive");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("rate: p must lie in (0,1)");
  if (max_degree <= 0) throw DomainError("rate: max degree must be positive");
  const double nn = static_cast<double>(n);
  return nn * nn * std::pow(p, max_degree) * std::log(1.0 / p);
}

}  // namespace sparse_ergm

#endif  // SPARSE_ERGM_INDEP_POLY_HPP
