#ifndef SPARSE_ERGM_WEIGHT_TABLE_HPP
#define SPARSE_ERGM_WEIGHT_TABLE_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sparse_ergm/errors.hpp"

namespace sparse_ergm {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Symmetric [0,1]-valued table over [n]^2 with zero diagonal.
/// Stored densely; set() keeps both triangles in sync.
class WeightTable {
public:
  static constexpr double entry_slack = 1e-12;

  WeightTable() = default;

  /// Constant `fill` off the diagonal.
  explicit WeightTable(int n, double fill = 0.0) : n_(n) {
    if (n <= 0) throw DomainError("weight table: n must be positive");
    check_value(fill);
    data_.assign(static_cast<std::size_t>(n) * n, fill);
    for (int i = 0; i < n; ++i) data_[index(i, i)] = 0.0;
  }

  /// From a full square matrix; validates symmetry, diagonal and range.
  static WeightTable from_matrix(const RowMatrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0) throw DomainError("weight table: matrix must be square");
    WeightTable t(static_cast<int>(m.rows()));
    for (int i = 0; i < t.n_; ++i) {
      if (std::abs(m(i, i)) > entry_slack) throw DomainError("weight table: nonzero diagonal");
      for (int j = 0; j < i; ++j) {
        if (std::abs(m(i, j) - m(j, i)) > entry_slack) throw DomainError("weight table: not symmetric");
        t.set(i, j, m(i, j));
      }
    }
    return t;
  }

  /// Strict lower triangle in row-major order: (1,0),(2,0),(2,1),(3,0),...
  static WeightTable from_triangle(int n, std::span<const double> triangle) {
    if (triangle.size() != static_cast<std::size_t>(n) * (n - 1) / 2)
      throw DomainError("weight table: triangle length does not match n");
    WeightTable t(n);
    std::size_t k = 0;
    for (int i = 1; i < n; ++i)
      for (int j = 0; j < i; ++j) t.set(i, j, triangle[k++]);
    return t;
  }

  std::vector<double> triangle() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n_) * (n_ - 1) / 2);
    for (int i = 1; i < n_; ++i)
      for (int j = 0; j < i; ++j) out.push_back((*this)(i, j));
    return out;
  }

  int n() const noexcept { return n_; }
  double operator()(int i, int j) const noexcept { return data_[index(i, j)]; }

  void set(int i, int j, double value) {
    if (i == j) {
      if (std::abs(value) > entry_slack) throw DomainError("weight table: diagonal must stay zero");
      return;
    }
    check_value(value);
    value = std::clamp(value, 0.0, 1.0);
    data_[index(i, j)] = value;
    data_[index(j, i)] = value;
  }

  bool is_binary() const noexcept {
    for (double x : data_)
      if (x != 0.0 && x != 1.0) return false;
    return true;
  }

  Eigen::Map<const RowMatrix> matrix() const noexcept { return {data_.data(), n_, n_}; }
  const std::vector<double>& data() const noexcept { return data_; }

  /// Sum over i<j.
  double pair_sum() const noexcept {
    double s = 0.0;
    for (int i = 1; i < n_; ++i)
      for (int j = 0; j < i; ++j) s += (*this)(i, j);
    return s;
  }

  friend bool operator==(const WeightTable&, const WeightTable&) = default;

private:
  std::size_t index(int i, int j) const noexcept { return static_cast<std::size_t>(i) * n_ + j; }

  static void check_value(double v) {
    if (!(v >= -entry_slack && v <= 1.0 + entry_slack))
      throw DomainError("weight table: entries must lie in [0,1]");
  }

  int n_ = 0;
  std::vector<double> data_;
};

/// Simple graph on [n] with bitset rows; the sampler's mutable state.
class BinaryGraph {
public:
  BinaryGraph() = default;

  explicit BinaryGraph(int n) : n_(n), words_((n + 63) / 64) {
    if (n <= 0) throw DomainError("graph: n must be positive");
    bits_.assign(static_cast<std::size_t>(n) * words_, 0ULL);
    degree_.assign(n, 0);
  }

  static BinaryGraph from_table(const WeightTable& t) {
    if (!t.is_binary()) throw DomainError("graph: weight table is not binary");
    BinaryGraph g(t.n());
    for (int i = 1; i < t.n(); ++i)
      for (int j = 0; j < i; ++j)
        if (t(i, j) == 1.0) g.add_edge(i, j);
    return g;
  }

  WeightTable to_table() const {
    WeightTable t(n_);
    for (int i = 1; i < n_; ++i)
      for (int j = 0; j < i; ++j)
        if (has_edge(i, j)) t.set(i, j, 1.0);
    return t;
  }

  int n() const noexcept { return n_; }
  int words() const noexcept { return words_; }
  std::int64_t edge_count() const noexcept { return edges_; }
  int degree(int v) const noexcept { return degree_[v]; }

  bool has_edge(int i, int j) const noexcept { return (row(i)[j >> 6] >> (j & 63)) & 1ULL; }

  void add_edge(int i, int j) {
    if (i == j) throw DomainError("graph: self-loop");
    if (has_edge(i, j)) return;
    flip(i, j);
    ++degree_[i];
    ++degree_[j];
    ++edges_;
  }

  void remove_edge(int i, int j) {
    if (!has_edge(i, j)) return;
    flip(i, j);
    --degree_[i];
    --degree_[j];
    --edges_;
  }

  std::span<const std::uint64_t> row(int i) const noexcept {
    return {bits_.data() + static_cast<std::size_t>(i) * words_, static_cast<std::size_t>(words_)};
  }

  int common_neighbors(int i, int j) const noexcept {
    auto a = row(i), b = row(j);
    int c = 0;
    for (int w = 0; w < words_; ++w) c += std::popcount(a[w] & b[w]);
    return c;
  }

  std::vector<int> neighbors(int i) const {
    std::vector<int> out;
    out.reserve(degree_[i]);
    auto r = row(i);
    for (int w = 0; w < words_; ++w) {
      std::uint64_t x = r[w];
      while (x) {
        out.push_back(w * 64 + std::countr_zero(x));
        x &= x - 1;
      }
    }
    return out;
  }

  friend bool operator==(const BinaryGraph&, const BinaryGraph&) = default;

private:
  void flip(int i, int j) noexcept {
    bits_[static_cast<std::size_t>(i) * words_ + (j >> 6)] ^= 1ULL << (j & 63);
    bits_[static_cast<std::size_t>(j) * words_ + (i >> 6)] ^= 1ULL << (i & 63);
  }

  int n_ = 0;
  int words_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<int> degree_;
  std::int64_t edges_ = 0;
};

}  // namespace sparse_ergm

#endif  // SPARSE_ERGM_WEIGHT_TABLE_HPP
