#ifndef SPARSE_ERGM_MOTIF_HPP
#define SPARSE_ERGM_MOTIF_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sparse_ergm/errors.hpp"

namespace sparse_ergm {

using Edge = std::pair<int, int>;

/// A small simple graph F. Vertices are 0..vertex_count-1.
class Motif {
public:
  static constexpr int max_vertices = 32;

  Motif() = default;

  Motif(int vertex_count, std::vector<Edge> edges, std::string name = {})
      : vertex_count_(vertex_count), edges_(std::move(edges)), name_(std::move(name)) {
    if (vertex_count_ <= 0) throw DomainError("motif: vertex count must be positive");
    if (vertex_count_ > max_vertices)
      throw CapabilityError("motif: at most " + std::to_string(max_vertices) + " vertices supported");
    masks_.assign(vertex_count_, 0u);
    for (auto& [u, v] : edges_) {
      if (u < 0 || v < 0 || u >= vertex_count_ || v >= vertex_count_)
        throw DomainError("motif: edge endpoint out of range");
      if (u == v) throw DomainError("motif: self-loop");
      if (u > v) std::swap(u, v);
      if (masks_[u] & (1u << v)) throw DomainError("motif: duplicate edge");
      masks_[u] |= 1u << v;
      masks_[v] |= 1u << u;
    }
  }

  int vertex_count() const noexcept { return vertex_count_; }
  int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::string& name() const noexcept { return name_; }

  /// Bit u of mask v is set iff {u,v} is an edge.
  const std::vector<std::uint32_t>& adjacency_masks() const noexcept { return masks_; }
  bool adjacent(int u, int v) const noexcept { return (masks_[u] >> v) & 1u; }

  int degree(int v) const noexcept { return std::popcount(masks_[v]); }

  std::vector<int> degrees() const {
    std::vector<int> d(vertex_count_);
    for (int v = 0; v < vertex_count_; ++v) d[v] = degree(v);
    return d;
  }

  int max_degree() const {
    int best = 0;
    for (int v = 0; v < vertex_count_; ++v) best = std::max(best, degree(v));
    return best;
  }

  /// Half the largest degree sum over an edge; may be a half-integer.
  double delta_star() const {
    int best = 0;
    for (auto [u, v] : edges_) best = std::max(best, degree(u) + degree(v));
    return 0.5 * best;
  }

  bool is_regular() const {
    for (int v = 1; v < vertex_count_; ++v)
      if (degree(v) != degree(0)) return false;
    return true;
  }

  bool is_connected() const {
    std::uint32_t seen = 1u, frontier = 1u;
    while (frontier) {
      std::uint32_t next = 0;
      for (int v = 0; v < vertex_count_; ++v)
        if (frontier & (1u << v)) next |= masks_[v];
      frontier = next & ~seen;
      seen |= next;
    }
    return seen == full_mask();
  }

  bool is_bipartite() const {
    std::vector<int> side(vertex_count_, -1);
    for (int root = 0; root < vertex_count_; ++root) {
      if (side[root] >= 0) continue;
      side[root] = 0;
      std::vector<int> stack{root};
      while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int w = 0; w < vertex_count_; ++w) {
          if (!adjacent(u, w)) continue;
          if (side[w] < 0) {
            side[w] = 1 - side[u];
            stack.push_back(w);
          } else if (side[w] == side[u]) {
            return false;
          }
        }
      }
    }
    return true;
  }

  /// Induced subgraph on the given vertices, relabeled in the given order.
  Motif induced(std::span<const int> vertices, std::string name = {}) const {
    std::vector<int> index(vertex_count_, -1);
    for (std::size_t i = 0; i < vertices.size(); ++i) index[vertices[i]] = static_cast<int>(i);
    std::vector<Edge> out;
    for (auto [u, v] : edges_)
      if (index[u] >= 0 && index[v] >= 0) out.emplace_back(index[u], index[v]);
    return Motif(static_cast<int>(vertices.size()), std::move(out), std::move(name));
  }

  /// F*: the induced subgraph on the vertices of maximal degree.
  Motif core() const {
    const int d = max_degree();
    std::vector<int> keep;
    for (int v = 0; v < vertex_count_; ++v)
      if (degree(v) == d) keep.push_back(v);
    return induced(keep, name_.empty() ? std::string{} : name_ + "*");
  }

  /// Connected components as separate motifs.
  std::vector<Motif> components() const {
    std::vector<Motif> out;
    std::uint32_t unseen = full_mask();
    while (unseen) {
      const int root = std::countr_zero(unseen);
      std::uint32_t comp = 1u << root, frontier = comp;
      while (frontier) {
        std::uint32_t next = 0;
        for (int v = 0; v < vertex_count_; ++v)
          if (frontier & (1u << v)) next |= masks_[v];
        frontier = next & ~comp;
        comp |= next;
      }
      unseen &= ~comp;
      std::vector<int> verts;
      for (int v = 0; v < vertex_count_; ++v)
        if (comp & (1u << v)) verts.push_back(v);
      out.push_back(induced(verts));
    }
    return out;
  }

  /// Vertex v is renamed perm[v].
  Motif relabeled(std::span<const int> perm) const {
    std::vector<Edge> out;
    out.reserve(edges_.size());
    for (auto [u, v] : edges_) out.emplace_back(perm[u], perm[v]);
    return Motif(vertex_count_, std::move(out), name_);
  }

  std::uint32_t full_mask() const noexcept {
    return vertex_count_ == 32 ? ~0u : ((1u << vertex_count_) - 1u);
  }

private:
  int vertex_count_ = 1;
  std::vector<Edge> edges_;
  std::string name_;
  std::vector<std::uint32_t> masks_ = std::vector<std::uint32_t>(1, 0u);
};

inline Motif cycle(int length) {
  if (length < 3) throw DomainError("cycle: length must be at least 3");
  std::vector<Edge> e;
  for (int i = 0; i < length; ++i) e.emplace_back(i, (i + 1) % length);
  return Motif(length, std::move(e), "C" + std::to_string(length));
}

/// K_{1,k}: vertex 0 is the center.
inline Motif star(int leaves) {
  if (leaves < 1) throw DomainError("star: need at least one leaf");
  std::vector<Edge> e;
  for (int i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return Motif(leaves + 1, std::move(e), "K1" + std::to_string(leaves));
}

inline Motif clique(int size) {
  if (size < 2) throw DomainError("clique: size must be at least 2");
  std::vector<Edge> e;
  for (int i = 0; i < size; ++i)
    for (int j = i + 1; j < size; ++j) e.emplace_back(i, j);
  return Motif(size, std::move(e), "K" + std::to_string(size));
}

inline Motif path(int vertices) {
  if (vertices < 1) throw DomainError("path: need at least one vertex");
  std::vector<Edge> e;
  for (int i = 0; i + 1 < vertices; ++i) e.emplace_back(i, i + 1);
  return Motif(vertices, std::move(e), "P" + std::to_string(vertices));
}

inline Motif disjoint_union(const Motif& a, const Motif& b) {
  std::vector<Edge> e = a.edges();
  for (auto [u, v] : b.edges()) e.emplace_back(u + a.vertex_count(), v + a.vertex_count());
  return Motif(a.vertex_count() + b.vertex_count(), std::move(e),
               a.name() + "+" + b.name());
}

/// Resolves "C3","C4","C5","K12","K13","K4" (and the general Cl, K1k, Kr patterns).
inline Motif builtin_motif(const std::string& name) {
  auto number = [&](std::size_t from) {
    if (from >= name.size()) throw DomainError("unknown motif name: " + name);
    for (std::size_t i = from; i < name.size(); ++i)
      if (name[i] < '0' || name[i] > '9') throw DomainError("unknown motif name: " + name);
    return std::stoi(name.substr(from));
  };
  if (name.size() >= 2 && name[0] == 'C') return cycle(number(1));
  if (name.size() >= 3 && name[0] == 'K' && name[1] == '1') {
    Motif m = star(number(2));
    return Motif(m.vertex_count(), m.edges(), name);
  }
  if (name.size() >= 2 && name[0] == 'K') return clique(number(1));
  throw DomainError("unknown motif name: " + name);
}

enum class MotifShape { edgeless, cycle, star, clique, other };

/// Recognizes the connected shapes that have closed-form counting.
inline MotifShape classify(const Motif& f) {
  const int v = f.vertex_count(), e = f.edge_count();
  if (e == 0) return MotifShape::edgeless;
  if (!f.is_connected()) return MotifShape::other;
  if (v >= 3 && e == v && f.is_regular() && f.max_degree() == 2) return MotifShape::cycle;  // K3 lands here
  if (e == v * (v - 1) / 2 && v >= 4) return MotifShape::clique;
  if (e == v - 1) {
    int centers = 0;
    for (int u = 0; u < v; ++u)
      if (f.degree(u) == v - 1) ++centers;
    if (centers >= 1) return MotifShape::star;  // includes the single edge K_{1,1}
  }
  return MotifShape::other;
}

/// Index of the center vertex of a star motif.
inline int star_center(const Motif& f) {
  for (int u = 0; u < f.vertex_count(); ++u)
    if (f.degree(u) == f.vertex_count() - 1) return u;
  return 0;
}

/// Motifs F_1..F_m sharing a maximal degree. Mixed degrees are rejected unless
/// explicitly allowed, in which case the largest degree is used and a warning
/// is recorded.
struct MotifFamily {
  std::vector<Motif> motifs;
  int max_degree = 0;
  std::vector<std::string> warnings;

  static MotifFamily make(std::vector<Motif> motifs, bool allow_mixed_degree = false) {
    if (motifs.empty()) throw DomainError("motif family: must be nonempty");
    MotifFamily fam;
    int lo = 1 << 30, hi = 0;
    for (const Motif& f : motifs) {
      if (f.edge_count() == 0) throw DomainError("motif family: motif without edges");
      lo = std::min(lo, f.max_degree());
      hi = std::max(hi, f.max_degree());
    }
    if (lo != hi) {
      if (!allow_mixed_degree)
        throw DomainError("motif family: motifs have different maximal degrees (" + std::to_string(lo) +
                          " and " + std::to_string(hi) + ")");
      fam.warnings.push_back("mixed maximal degrees; using Delta = " + std::to_string(hi));
    }
    fam.max_degree = hi;
    fam.motifs = std::move(motifs);
    return fam;
  }

  std::size_t size() const noexcept { return motifs.size(); }
  const Motif& operator[](std::size_t k) const noexcept { return motifs[k]; }
};

}  // namespace sparse_ergm

#endif  // SPARSE_ERGM_MOTIF_HPP
