#ifndef SPARSE_ERGM_FINNER_HPP
#define SPARSE_ERGM_FINNER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "sparse_ergm/errors.hpp"
#include "sparse_ergm/rng.hpp"

namespace sparse_ergm::finner {

inline constexpr double mass_tol = 1e-12;
inline constexpr double integral_slack = 1e-12;
inline constexpr double max_states = 1e7;

/// One member of the set system: vertices in increasing order and a weight.
struct SetTerm {
  std::vector<int> vertices;
  double lambda = 1.0;
  friend bool operator==(const SetTerm&, const SetTerm&) = default;
};

/// Finite product space with a weighted set system and one tensor per set.
/// Tensors are row-major over the set's vertices in increasing order.
struct ProductInstance {
  std::vector<std::vector<double>> spaces;
  std::vector<SetTerm> system;
  std::vector<std::vector<double>> functions;

  int vertex_count() const noexcept { return static_cast<int>(spaces.size()); }
  friend bool operator==(const ProductInstance&, const ProductInstance&) = default;
};

/// Per class B: vertices and a unit-mean tensor over Omega_B.
struct FactorFamily {
  std::vector<std::vector<int>> classes;
  std::vector<std::vector<double>> h;
};

namespace detail {

inline std::size_t tensor_size(const std::vector<std::vector<double>>& spaces, const std::vector<int>& vs) {
  std::size_t s = 1;
  for (int v : vs) s *= spaces[v].size();
  return s;
}

/// Product measure over vs, row-major.
inline std::vector<double> product_mass(const std::vector<std::vector<double>>& spaces, const std::vector<int>& vs) {
  std::vector<double> m{1.0};
  for (int v : vs) {
    std::vector<double> next;
    next.reserve(m.size() * spaces[v].size());
    for (double a : m)
      for (double b : spaces[v]) next.push_back(a * b);
    m = std::move(next);
  }
  return m;
}

inline double integral(const std::vector<std::vector<double>>& spaces, const std::vector<int>& vs,
                       const std::vector<double>& f) {
  const auto m = product_mass(spaces, vs);
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) s += m[k] * f[k];
  return s;
}

/// Integrates coordinate `pos` of the tensor over vs out.
inline std::vector<double> marginalize(const std::vector<std::vector<double>>& spaces, const std::vector<int>& vs,
                                       const std::vector<double>& f, std::size_t pos) {
  std::size_t inner = 1;
  for (std::size_t k = pos + 1; k < vs.size(); ++k) inner *= spaces[vs[k]].size();
  const std::size_t width = spaces[vs[pos]].size();
  const std::size_t outer = f.size() / (inner * width);
  const auto& mu = spaces[vs[pos]];
  std::vector<double> out(outer * inner, 0.0);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t x = 0; x < width; ++x)
      for (std::size_t i = 0; i < inner; ++i) out[o * inner + i] += mu[x] * f[(o * width + x) * inner + i];
  return out;
}

/// Tensor product of per-vertex tensors in the order of vs.
inline std::vector<double> outer_product(const std::vector<std::vector<double>>& parts) {
  std::vector<double> t{1.0};
  for (const auto& h : parts) {
    std::vector<double> next;
    next.reserve(t.size() * h.size());
    for (double a : t)
      for (double b : h) next.push_back(a * b);
    t = std::move(next);
  }
  return t;
}

inline double l1_distance(const std::vector<std::vector<double>>& spaces, const std::vector<int>& vs,
                          const std::vector<double>& f, const std::vector<double>& g) {
  const auto m = product_mass(spaces, vs);
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) s += m[k] * std::abs(f[k] - g[k]);
  return s;
}

}  // namespace detail

/// Structural checks (DomainError) and theorem hypotheses (HypothesisError).
inline void validate(const ProductInstance& inst) {
  const int nv = inst.vertex_count();
  if (nv == 0) throw DomainError("finner instance: no coordinates");
  for (const auto& sp : inst.spaces) {
    if (sp.empty()) throw DomainError("finner instance: empty space");
    double s = 0.0;
    for (double x : sp) {
      if (!(x > 0.0)) throw DomainError("finner instance: masses must be positive");
      s += x;
    }
    if (std::abs(s - 1.0) > mass_tol) throw DomainError("finner instance: masses must sum to 1");
  }
  if (inst.functions.size() != inst.system.size()) throw DomainError("finner instance: one function per set required");
  std::vector<double> load(nv, 0.0);
  for (std::size_t a = 0; a < inst.system.size(); ++a) {
    const auto& t = inst.system[a];
    if (t.vertices.empty()) throw DomainError("finner instance: empty set in system");
    for (std::size_t k = 0; k < t.vertices.size(); ++k) {
      if (t.vertices[k] < 0 || t.vertices[k] >= nv) throw DomainError("finner instance: vertex out of range");
      if (k && t.vertices[k] <= t.vertices[k - 1])
        throw DomainError("finner instance: set vertices must be strictly increasing");
    }
    if (!(t.lambda > 0.0) || !std::isfinite(t.lambda)) throw DomainError("finner instance: weights must be positive");
    for (int v : t.vertices) load[v] += t.lambda;
    const auto& f = inst.functions[a];
    if (f.size() != detail::tensor_size(inst.spaces, t.vertices))
      throw DomainError("finner instance: function " + std::to_string(a) + " has wrong length");
    for (double x : f)
      if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("finner instance: functions must be nonnegative");
    if (detail::integral(inst.spaces, t.vertices, f) > 1.0 + integral_slack)
      throw HypothesisError("finner instance: function " + std::to_string(a) + " has integral above 1");
  }
  for (int v = 0; v < nv; ++v)
    if (load[v] > 1.0 + 1e-12)
      throw HypothesisError("finner instance: weights through vertex " + std::to_string(v) + " sum above 1");
}

/// Partition of V into classes of vertices lying in exactly the same sets.
inline std::vector<std::vector<int>> equivalence_classes(int nv, const std::vector<SetTerm>& system) {
  std::map<std::vector<char>, std::vector<int>> by_signature;
  std::vector<std::vector<int>> order;
  for (int v = 0; v < nv; ++v) {
    std::vector<char> sig(system.size(), 0);
    for (std::size_t a = 0; a < system.size(); ++a)
      sig[a] = std::binary_search(system[a].vertices.begin(), system[a].vertices.end(), v);
    by_signature[sig].push_back(v);
  }
  for (auto& [sig, vs] : by_signature) order.push_back(vs);
  std::sort(order.begin(), order.end());
  return order;
}

/// Exact integral of prod_A f_A^{lambda_A} over the product space.
inline double finner_integral(const ProductInstance& inst) {
  validate(inst);
  const int nv = inst.vertex_count();
  double states = 1.0;
  for (const auto& sp : inst.spaces) states *= static_cast<double>(sp.size());
  if (states > max_states) throw CapabilityError("finner integral: state space exceeds 1e7 points");
  // stride of vertex v inside each set's tensor
  std::vector<std::vector<std::size_t>> stride(inst.system.size(), std::vector<std::size_t>(nv, 0));
  for (std::size_t a = 0; a < inst.system.size(); ++a) {
    std::size_t s = 1;
    const auto& vs = inst.system[a].vertices;
    for (auto it = vs.rbegin(); it != vs.rend(); ++it) {
      stride[a][*it] = s;
      s *= inst.spaces[*it].size();
    }
  }
  std::vector<std::size_t> omega(nv, 0);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (int v = 0; v < nv; ++v) w *= inst.spaces[v][omega[v]];
    for (std::size_t a = 0; a < inst.system.size() && w > 0.0; ++a) {
      std::size_t idx = 0;
      for (int v : inst.system[a].vertices) idx += omega[v] * stride[a][v];
      const double f = inst.functions[a][idx];
      w *= f == 0.0 ? 0.0 : std::pow(f, inst.system[a].lambda);
    }
    total += w;
    int v = nv - 1;
    while (v >= 0 && ++omega[v] == inst.spaces[v].size()) omega[v--] = 0;
    if (v < 0) break;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Normalization passes

struct Padded {
  ProductInstance instance;
  std::size_t original_terms = 0;  // padding terms follow these
};

/// Adds {v} with f = 1 and weight 1 - load(v) wherever the load is below 1.
inline Padded pad_cover(const ProductInstance& inst, double tol = 1e-12) {
  Padded out{inst, inst.system.size()};
  std::vector<double> load(inst.vertex_count(), 0.0);
  for (const auto& t : inst.system)
    for (int v : t.vertices) load[v] += t.lambda;
  for (int v = 0; v < inst.vertex_count(); ++v)
    if (load[v] < 1.0 - tol) {
      out.instance.system.push_back({{v}, 1.0 - load[v]});
      out.instance.functions.emplace_back(inst.spaces[v].size(), 1.0);
    }
  return out;
}

inline ProductInstance strip_padding(const Padded& p) {
  ProductInstance inst = p.instance;
  inst.system.resize(p.original_terms);
  inst.functions.resize(p.original_terms);
  return inst;
}

/// Each equivalence class becomes one coordinate whose space is the product
/// of its members' spaces (row-major in member order).
struct Merged {
  ProductInstance instance;
  std::vector<std::vector<int>> classes;
  std::vector<std::vector<double>> original_spaces;
};

namespace detail {

/// Reorders tensor f over `from` (vertex order) into the order `to` (a permutation of from).
inline std::vector<double> permute(const std::vector<std::vector<double>>& spaces, const std::vector<int>& from,
                                   const std::vector<int>& to, const std::vector<double>& f) {
  const std::size_t k = from.size();
  std::vector<std::size_t> src_stride(k), pos(k);
  std::size_t s = 1;
  for (std::size_t x = k; x-- > 0;) {
    src_stride[x] = s;
    s *= spaces[from[x]].size();
  }
  for (std::size_t x = 0; x < k; ++x) pos[x] = std::find(from.begin(), from.end(), to[x]) - from.begin();
  std::vector<double> out(f.size());
  std::vector<std::size_t> digit(k, 0);
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    std::size_t src = 0;
    for (std::size_t x = 0; x < k; ++x) src += digit[x] * src_stride[pos[x]];
    out[idx] = f[src];
    for (std::size_t x = k; x-- > 0;) {
      if (++digit[x] < spaces[to[x]].size()) break;
      digit[x] = 0;
    }
  }
  return out;
}

}  // namespace detail

inline Merged merge_classes(const ProductInstance& inst) {
  Merged out;
  out.classes = equivalence_classes(inst.vertex_count(), inst.system);
  out.original_spaces = inst.spaces;
  std::vector<int> class_of(inst.vertex_count());
  for (std::size_t c = 0; c < out.classes.size(); ++c)
    for (int v : out.classes[c]) class_of[v] = static_cast<int>(c);
  for (const auto& cls : out.classes) out.instance.spaces.push_back(detail::product_mass(inst.spaces, cls));
  for (std::size_t a = 0; a < inst.system.size(); ++a) {
    std::vector<int> cs;
    for (int v : inst.system[a].vertices)
      if (cs.empty() || std::find(cs.begin(), cs.end(), class_of[v]) == cs.end()) cs.push_back(class_of[v]);
    std::sort(cs.begin(), cs.end());
    std::vector<int> grouped;
    for (int c : cs) grouped.insert(grouped.end(), out.classes[c].begin(), out.classes[c].end());
    out.instance.system.push_back({cs, inst.system[a].lambda});
    out.instance.functions.push_back(detail::permute(inst.spaces, inst.system[a].vertices, grouped, inst.functions[a]));
  }
  return out;
}

/// Inverse of merge_classes.
inline ProductInstance split_classes(const Merged& m) {
  ProductInstance inst;
  inst.spaces = m.original_spaces;
  for (std::size_t a = 0; a < m.instance.system.size(); ++a) {
    std::vector<int> grouped;
    for (int c : m.instance.system[a].vertices)
      grouped.insert(grouped.end(), m.classes[c].begin(), m.classes[c].end());
    std::vector<int> sorted = grouped;
    std::sort(sorted.begin(), sorted.end());
    inst.system.push_back({sorted, m.instance.system[a].lambda});
    inst.functions.push_back(detail::permute(inst.spaces, grouped, sorted, m.instance.functions[a]));
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Stability checks

/// sqrt(2 / (lambda (1 - lambda)))
inline double c_bar(double lambda) { return std::sqrt(2.0 / (lambda * (1.0 - lambda))); }

/// 2 c_bar(lambda) + 1 / min(lambda, 1 - lambda)
inline double c_lambda(double lambda) { return 2.0 * c_bar(lambda) + 1.0 / std::min(lambda, 1.0 - lambda); }

/// (l + l')^{-1/2} C_{l / (l + l')}
inline double c_pair(double l1, double l2) { return c_lambda(l1 / (l1 + l2)) / std::sqrt(l1 + l2); }

struct HolderReport {
  double eps = 0.0;
  double bound = 0.0;
  double l1 = 0.0;  // ||g - 1||_1
  bool pass = true;
};

inline HolderReport holder_stability_check(const std::vector<double>& g, const std::vector<double>& nu,
                                           double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("holder check: lambda must lie in (0,1)");
  if (g.size() != nu.size() || g.empty()) throw DomainError("holder check: size mismatch");
  double mean = 0.0, pw = 0.0, l1 = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!(g[k] >= 0.0)) throw DomainError("holder check: g must be nonnegative");
    mean += nu[k] * g[k];
    pw += nu[k] * std::pow(g[k], lambda);
    l1 += nu[k] * std::abs(g[k] - 1.0);
  }
  if (mean > 1.0 + integral_slack) throw HypothesisError("holder check: integral of g exceeds 1");
  HolderReport r;
  r.eps = std::clamp(1.0 - pw, 0.0, 1.0);
  r.bound = 2.0 * c_bar(lambda) * std::sqrt(r.eps);
  r.l1 = l1;
  r.pass = l1 <= r.bound + 1e-10;
  return r;
}

struct PairReport {
  int k = 0, l = 0;
  double distance = 0.0, bound = 0.0;
  bool pass = true;
};

struct GenHolderReport {
  double eps = 0.0;
  std::vector<PairReport> pairs;
  bool pass = true;
};

/// Functions f_i on one space with weights summing to at most 1.
inline GenHolderReport genholder_stability_check(const std::vector<std::vector<double>>& f,
                                                 const std::vector<double>& lambda, const std::vector<double>& nu) {
  if (f.size() < 2 || f.size() != lambda.size()) throw DomainError("generalized holder: need m >= 2 weighted functions");
  const double total = std::accumulate(lambda.begin(), lambda.end(), 0.0);
  if (total > 1.0 + 1e-12) throw HypothesisError("generalized holder: weights sum above 1");
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i].size() != nu.size()) throw DomainError("generalized holder: size mismatch");
    if (!(lambda[i] > 0.0)) throw DomainError("generalized holder: weights must be positive");
    double m = 0.0;
    for (std::size_t x = 0; x < nu.size(); ++x) {
      if (!(f[i][x] >= 0.0)) throw DomainError("generalized holder: functions must be nonnegative");
      m += nu[x] * f[i][x];
    }
    if (m > 1.0 + integral_slack) throw HypothesisError("generalized holder: a function has integral above 1");
  }
  double prod = 0.0;
  for (std::size_t x = 0; x < nu.size(); ++x) {
    double w = nu[x];
    for (std::size_t i = 0; i < f.size(); ++i) w *= f[i][x] == 0.0 ? 0.0 : std::pow(f[i][x], lambda[i]);
    prod += w;
  }
  GenHolderReport r;
  r.eps = std::clamp(1.0 - prod, 0.0, 1.0);
  for (std::size_t k = 0; k < f.size(); ++k)
    for (std::size_t l = k + 1; l < f.size(); ++l) {
      PairReport p{static_cast<int>(k), static_cast<int>(l), 0.0, 0.0, true};
      for (std::size_t x = 0; x < nu.size(); ++x) p.distance += nu[x] * std::abs(f[k][x] - f[l][x]);
      p.bound = c_pair(lambda[k], lambda[l]) * std::sqrt(r.eps);
      p.pass = p.distance <= p.bound + 1e-10;
      r.pass = r.pass && p.pass;
      r.pairs.push_back(p);
    }
  return r;
}

// ---------------------------------------------------------------------------
// Factor recovery

namespace detail {

struct Term {
  std::vector<int> vs;  // local coordinates, increasing
  double lambda = 1.0;
  std::vector<double> f;
  bool unit = false;  // identically 1
};

struct System {
  std::vector<std::vector<double>> spaces;
  std::vector<Term> terms;
};

inline bool is_unit(const std::vector<double>& f) {
  return std::all_of(f.begin(), f.end(), [](double x) { return x == 1.0; });
}

inline std::vector<double> normalized(std::vector<double> h, const std::vector<double>& mu) {
  double m = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) m += mu[k] * h[k];
  if (!(m > 0.0)) return std::vector<double>(h.size(), 1.0);
  for (double& x : h) x /= m;
  return h;
}

std::vector<std::vector<double>> recover(const System& s);

/// Contracts coordinate v: sets through v are integrated over it.
inline System contract(const System& s, int v) {
  System out;
  for (int u = 0; u < static_cast<int>(s.spaces.size()); ++u)
    if (u != v) out.spaces.push_back(s.spaces[u]);
  for (const Term& t : s.terms) {
    Term c;
    c.lambda = t.lambda;
    const auto it = std::find(t.vs.begin(), t.vs.end(), v);
    if (it == t.vs.end()) {
      c.f = t.f;
      c.unit = t.unit;
    } else {
      c.f = marginalize(s.spaces, t.vs, t.f, static_cast<std::size_t>(it - t.vs.begin()));
      c.unit = t.unit;
    }
    for (int u : t.vs)
      if (u != v) c.vs.push_back(u > v ? u - 1 : u);
    if (!c.vs.empty()) out.terms.push_back(std::move(c));
  }
  return out;
}

inline std::vector<std::vector<double>> recover(const System& s) {
  const int n = static_cast<int>(s.spaces.size());
  std::vector<std::vector<double>> h(n);
  if (n == 0) return h;

  // Coordinates in no set: constant factor.
  std::vector<char> covered(n, 0);
  for (const Term& t : s.terms)
    for (int v : t.vs) covered[v] = 1;
  if (std::find(covered.begin(), covered.end(), 0) != covered.end()) {
    System inner;
    std::vector<int> map(n, -1), back;
    for (int v = 0; v < n; ++v)
      if (covered[v]) map[v] = static_cast<int>(back.size()), back.push_back(v), inner.spaces.push_back(s.spaces[v]);
    for (const Term& t : s.terms) {
      Term c = t;
      for (int& v : c.vs) v = map[v];
      inner.terms.push_back(std::move(c));
    }
    const auto hi = recover(inner);
    for (int v = 0; v < n; ++v) h[v] = covered[v] ? hi[map[v]] : std::vector<double>(s.spaces[v].size(), 1.0);
    return h;
  }

  // Base case: every set is the single coordinate.
  if (n == 1) {
    for (const Term& t : s.terms)
      if (t.unit || is_unit(t.f)) return {std::vector<double>(s.spaces[0].size(), 1.0)};
    return {normalized(s.terms.front().f, s.spaces[0])};
  }

  // Merge equivalent coordinates, recover on classes, marginalize back.
  std::vector<SetTerm> sys;
  for (const Term& t : s.terms) sys.push_back({t.vs, t.lambda});
  const auto classes = equivalence_classes(n, sys);
  if (static_cast<int>(classes.size()) < n) {
    ProductInstance pi{s.spaces, sys, {}};
    for (const Term& t : s.terms) pi.functions.push_back(t.f);
    const Merged m = merge_classes(pi);
    System inner{m.instance.spaces, {}};
    for (std::size_t a = 0; a < s.terms.size(); ++a)
      inner.terms.push_back({m.instance.system[a].vertices, s.terms[a].lambda, m.instance.functions[a], s.terms[a].unit});
    const auto hc = recover(inner);
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const auto& cls = classes[c];
      for (std::size_t x = 0; x < cls.size(); ++x) {
        std::vector<double> marg = hc[c];
        std::vector<int> local = cls;
        // integrate out every member but x, last to first so positions stay valid
        for (std::size_t y = cls.size(); y-- > 0;)
          if (y != x) {
            marg = marginalize(s.spaces, local, marg, y);
            local.erase(local.begin() + static_cast<std::ptrdiff_t>(y));
          }
        h[cls[x]] = normalized(std::move(marg), s.spaces[cls[x]]);
      }
    }
    return h;
  }

  // Sets covering all of V: drop them and renormalize the remaining weights.
  double full = 0.0;
  System rest{s.spaces, {}};
  for (const Term& t : s.terms) {
    if (static_cast<int>(t.vs.size()) == n) full += t.lambda;
    else rest.terms.push_back(t);
  }
  if (full > 0.0) {
    for (Term& t : rest.terms) t.lambda /= (1.0 - full);
    return recover(rest);
  }

  // Contract the two pivots w = 0, z = 1.
  const auto hw = recover(contract(s, 0));
  const auto hz = recover(contract(s, 1));
  for (int u = 1; u < n; ++u) h[u] = hw[u - 1];
  h[0] = hz[0];
  return h;
}

}  // namespace detail

struct Recovery {
  FactorFamily factors;
  std::vector<double> residuals;  // per original set
  double eps = 0.0;               // 1 - finner integral, clamped at 0
};

/// Factors per class following the inductive construction; residuals are
/// ||f_A - tensor of h_B over B in A||_1.
inline Recovery recover_factors(const ProductInstance& inst) {
  validate(inst);
  const Padded padded = pad_cover(inst);
  const Merged merged = merge_classes(padded.instance);
  detail::System sys{merged.instance.spaces, {}};
  for (std::size_t a = 0; a < merged.instance.system.size(); ++a)
    sys.terms.push_back({merged.instance.system[a].vertices, merged.instance.system[a].lambda,
                         merged.instance.functions[a], a >= padded.original_terms});
  auto h = detail::recover(sys);
  Recovery out;
  out.factors.classes = merged.classes;
  for (std::size_t c = 0; c < h.size(); ++c) out.factors.h.push_back(detail::normalized(h[c], sys.spaces[c]));
  for (std::size_t a = 0; a < padded.original_terms; ++a) {
    const auto& vs = merged.instance.system[a].vertices;
    std::vector<std::vector<double>> parts;
    for (int c : vs) parts.push_back(out.factors.h[c]);
    out.residuals.push_back(
        detail::l1_distance(sys.spaces, vs, merged.instance.functions[a], detail::outer_product(parts)));
  }
  out.eps = std::max(0.0, 1.0 - finner_integral(inst));
  return out;
}

/// Load sum_{A contains B} lambda_A on a class.
inline double class_load(const ProductInstance& inst, const std::vector<int>& cls) {
  double load = 0.0;
  for (const auto& t : inst.system)
    if (std::includes(t.vertices.begin(), t.vertices.end(), cls.begin(), cls.end())) load += t.lambda;
  return load;
}

struct SlackReport {
  std::vector<int> cls;
  double distance = 0.0;  // ||h_B - 1||_1
  double bound = 0.0;     // C eps^c
  bool pass = true;
};

/// For each class with load below 1, adds a copy of the class with f = 1 and
/// the missing weight, recovers, and compares h_B with 1.
inline std::vector<SlackReport> remark_hb1_check(const ProductInstance& inst, double c_const, double c_exp) {
  validate(inst);
  const auto classes = equivalence_classes(inst.vertex_count(), inst.system);
  ProductInstance aug = inst;
  std::vector<std::vector<int>> slack;
  for (const auto& cls : classes) {
    const double load = class_load(inst, cls);
    if (load < 1.0 - 1e-12) {
      slack.push_back(cls);
      aug.system.push_back({cls, 1.0 - load});
      aug.functions.emplace_back(detail::tensor_size(inst.spaces, cls), 1.0);
    }
  }
  if (slack.empty()) throw HypothesisError("slack check: no class with weight below 1");
  const auto rec = recover_factors(aug);
  std::vector<SlackReport> out;
  for (const auto& cls : slack) {
    const auto it = std::find(rec.factors.classes.begin(), rec.factors.classes.end(), cls);
    const std::size_t c = static_cast<std::size_t>(it - rec.factors.classes.begin());
    const auto mu = detail::product_mass(inst.spaces, cls);
    SlackReport r{cls, 0.0, c_const * std::pow(rec.eps, c_exp), true};
    for (std::size_t k = 0; k < mu.size(); ++k) r.distance += mu[k] * std::abs(rec.factors.h[c][k] - 1.0);
    r.pass = r.distance <= r.bound + 1e-9;
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fixture generators and fits

struct PowerLawFit {
  double c_const = 0.0;  // C
  double c_exp = 0.0;    // c
  int points = 0;
};

/// Least-squares slope of log y on log x, then the smallest C with y <= C x^c
/// for every point. Points with x or y at zero are skipped.
inline PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < x.size(); ++k)
    if (x[k] > 0.0 && y[k] > 0.0) lx.push_back(std::log(x[k])), ly.push_back(std::log(y[k]));
  PowerLawFit fit;
  fit.points = static_cast<int>(lx.size());
  if (lx.size() < 2) return fit;
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) sxy += (lx[k] - mx) * (ly[k] - my), sxx += (lx[k] - mx) * (lx[k] - mx);
  fit.c_exp = sxx > 0.0 ? sxy / sxx : 0.0;
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < lx.size(); ++k) top = std::max(top, ly[k] - fit.c_exp * lx[k]);
  fit.c_const = std::exp(top);
  return fit;
}

inline std::vector<double> random_masses(int size, CounterRng& rng) {
  std::vector<double> m(size);
  for (double& x : m) x = 0.1 + rng.uniform();
  const double s = std::accumulate(m.begin(), m.end(), 0.0);
  for (double& x : m) x /= s;
  return m;
}

/// Random instance with |V| <= max_v, |Omega_v| <= max_omega, |A| <= max_sets.
inline ProductInstance random_instance(CounterRng& rng, int max_v = 4, int max_omega = 4, int max_sets = 5) {
  ProductInstance inst;
  const int nv = 1 + static_cast<int>(rng.below(max_v));
  for (int v = 0; v < nv; ++v) inst.spaces.push_back(random_masses(1 + static_cast<int>(rng.below(max_omega)), rng));
  const int m = 1 + static_cast<int>(rng.below(max_sets));
  std::vector<double> load(nv, 0.0);
  for (int a = 0; a < m; ++a) {
    std::uint64_t mask = 0;
    while (mask == 0) mask = rng.below(1ULL << nv);
    SetTerm t;
    for (int v = 0; v < nv; ++v)
      if ((mask >> v) & 1ULL) t.vertices.push_back(v);
    t.lambda = 0.05 + rng.uniform();
    for (int v : t.vertices) load[v] += t.lambda;
    inst.system.push_back(t);
  }
  const double top = *std::max_element(load.begin(), load.end());
  const double scale = (rng.uniform() < 0.5 ? 1.0 : 0.5 + 0.5 * rng.uniform()) / top;
  for (auto& t : inst.system) t.lambda *= scale;
  for (const auto& t : inst.system) {
    std::vector<double> f(detail::tensor_size(inst.spaces, t.vertices));
    for (double& x : f) x = rng.uniform() < 0.2 ? 0.0 : rng.uniform() * 3.0;
    const double mass = detail::integral(inst.spaces, t.vertices, f);
    const double target = rng.uniform() < 0.5 ? 1.0 : 0.5 + 0.5 * rng.uniform();
    if (mass > 0.0)
      for (double& x : f) x *= target / mass;
    // rounding can leave the integral a hair above 1
    while (detail::integral(inst.spaces, t.vertices, f) > 1.0)
      for (double& x : f) x = std::nextafter(x, 0.0);
    inst.functions.push_back(std::move(f));
  }
  return inst;
}

/// Consistent tensor-product instance: f_A = tensor of unit-mean h_v.
/// Returns the h_v used alongside.
struct ProductFixture {
  ProductInstance instance;
  std::vector<std::vector<double>> factors;
};

inline ProductFixture product_instance(const std::vector<std::vector<double>>& spaces, const std::vector<SetTerm>& system,
                                       CounterRng& rng) {
  ProductFixture out;
  out.instance.spaces = spaces;
  out.instance.system = system;
  for (const auto& sp : spaces) {
    std::vector<double> h(sp.size());
    for (double& x : h) x = 0.2 + 2.0 * rng.uniform();
    out.factors.push_back(detail::normalized(std::move(h), sp));
  }
  for (const auto& t : system) {
    std::vector<std::vector<double>> parts;
    for (int v : t.vertices) parts.push_back(out.factors[v]);
    out.instance.functions.push_back(detail::outer_product(parts));
  }
  return out;
}

/// Multiplies each f_A by (1 + amplitude u) with |u| <= 1 drawn once per
/// entry, then rescales to integral at most 1.
inline ProductInstance perturb(const ProductInstance& base, double amplitude, std::uint64_t seed) {
  ProductInstance inst = base;
  CounterRng rng(seed, 0x707274ULL);
  for (std::size_t a = 0; a < inst.system.size(); ++a) {
    auto& f = inst.functions[a];
    for (double& x : f) x *= 1.0 + amplitude * (2.0 * rng.uniform() - 1.0);
    const double mass = detail::integral(inst.spaces, inst.system[a].vertices, f);
    if (mass > 1.0)
      for (double& x : f) x /= mass;
    while (detail::integral(inst.spaces, inst.system[a].vertices, f) > 1.0)
      for (double& x : f) x = std::nextafter(x, 0.0);
  }
  return inst;
}

/// All (|V|-1)-subsets with weight 1/(|V|-1).
inline std::vector<SetTerm> uniform_cover(int nv) {
  std::vector<SetTerm> sys;
  for (int skip = 0; skip < nv; ++skip) {
    SetTerm t;
    for (int v = 0; v < nv; ++v)
      if (v != skip) t.vertices.push_back(v);
    t.lambda = 1.0 / (nv - 1);
    sys.push_back(t);
  }
  return sys;
}

}  // namespace sparse_ergm::finner

#endif  // SPARSE_ERGM_FINNER_HPP
