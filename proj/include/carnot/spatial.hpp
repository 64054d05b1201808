#pragma once

// Uniform coordinate grid for fixed-radius neighbor queries under the
// left-invariant quasi-distance.
//
// If d(x, y) < r then |y_x - x_x| < r coordinatewise on the first layer, and
// on the second layer |y_t - x_t| <= r^2 / sqrt(kappa) + |B(x_x, .)| r / 2.
// Cells are sized to those extents, so candidates lie in the 3^D cells
// around the query's cell. Callers still filter by exact distance.

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "carnot/group.hpp"

namespace carnot {

class PointGrid {
 public:
  /// `xmax` bounds |x| (first-layer Euclidean norm) of all inserted and
  /// queried points.
  PointGrid(const GroupSpec& g, double radius, double xmax) : dim_(g.dim()), h_(g.horizontal_dim()) {
    if (!(radius > 0.0)) throw Error("grid radius must be positive");
    double bnorm = 0.0;
    for (int k = 0; k < g.vertical_dim(); ++k) {
      double fro = 0.0;
      for (const auto& c : g.constants())
        if (c.k == k) fro += 2.0 * c.value * c.value;
      bnorm = std::max(bnorm, std::sqrt(fro));
    }
    for (int i = 0; i < dim_; ++i)
      cell_[i] = i < h_ ? radius : radius * radius / std::sqrt(g.kappa()) + 0.5 * bnorm * xmax * radius;
  }

  void insert(const Point& p, int id) { cells_[key_of(p)].push_back(id); }

  /// fn(id) for every inserted id in the neighborhood of x (superset of the
  /// ball of the grid radius).
  template <class Fn>
  void for_each_near(const Point& x, Fn&& fn) const {
    std::array<std::int64_t, kMaxDim> base{};
    for (int i = 0; i < dim_; ++i) base[i] = cell_index(x[i], i);
    std::array<int, kMaxDim> off{};
    for (int i = 0; i < dim_; ++i) off[i] = -1;
    for (;;) {
      std::array<std::int64_t, kMaxDim> c{};
      for (int i = 0; i < dim_; ++i) c[i] = base[i] + off[i];
      auto it = cells_.find(hash(c));
      if (it != cells_.end())
        for (int id : it->second) fn(id);
      int i = 0;
      while (i < dim_ && off[i] == 1) off[i++] = -1;
      if (i == dim_) break;
      ++off[i];
    }
  }

 private:
  std::int64_t cell_index(double v, int i) const { return static_cast<std::int64_t>(std::floor(v / cell_[i])); }

  std::uint64_t hash(const std::array<std::int64_t, kMaxDim>& c) const {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL;
    for (int i = 0; i < dim_; ++i) {
      h ^= static_cast<std::uint64_t>(c[i]) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }

  std::uint64_t key_of(const Point& p) const {
    std::array<std::int64_t, kMaxDim> c{};
    for (int i = 0; i < dim_; ++i) c[i] = cell_index(p[i], i);
    return hash(c);
  }

  int dim_;
  int h_;
  std::array<double, kMaxDim> cell_{};
  std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

/// Largest first-layer Euclidean norm over a point range.
template <class Range>
double max_horizontal_norm(const GroupSpec& g, const Range& points) {
  double m = 0.0;
  for (const auto& p : points) {
    double s = 0.0;
    for (int i = 0; i < g.horizontal_dim(); ++i) s += p[i] * p[i];
    m = std::max(m, std::sqrt(s));
  }
  return m;
}

}  // namespace carnot
