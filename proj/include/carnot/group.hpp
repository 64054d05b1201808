#pragma once

// Stratified nilpotent groups of step <= 2 in exponential coordinates of the
// first kind. The group law is the closed Baker-Campbell-Hausdorff product
//
//   (x, t) . (x', t') = (x + x', t + t' + 1/2 B(x, x'))
//
// where B^{(k)}_{ij} are the structure constants of [v_1, v_1] -> v_2.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace carnot {

inline constexpr int kMaxDim = 10;

/// Raised for invalid inputs: malformed specs, dimension mismatches, bad
/// parameters. Numerical-result failures are reported, not thrown.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A group element in exponential coordinates. Fixed capacity, no heap.
class Point {
 public:
  Point() = default;
  explicit Point(int dim) : dim_(dim) {
    if (dim < 0 || dim > kMaxDim) throw Error("point dimension out of range");
  }
  Point(std::initializer_list<double> coords) : Point(static_cast<int>(coords.size())) {
    std::copy(coords.begin(), coords.end(), c_.begin());
  }
  explicit Point(std::span<const double> coords) : Point(static_cast<int>(coords.size())) {
    std::copy(coords.begin(), coords.end(), c_.begin());
  }

  int dim() const { return dim_; }
  double& operator[](int i) { return c_[i]; }
  double operator[](int i) const { return c_[i]; }
  std::span<double> coords() { return {c_.data(), static_cast<std::size_t>(dim_)}; }
  std::span<const double> coords() const { return {c_.data(), static_cast<std::size_t>(dim_)}; }

  friend bool operator==(const Point& a, const Point& b) {
    return a.dim_ == b.dim_ && std::equal(a.c_.begin(), a.c_.begin() + a.dim_, b.c_.begin());
  }

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

inline double max_abs_diff(const Point& a, const Point& b) {
  double m = 0.0;
  for (int i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// One nonzero bracket coefficient: the v_2 component `k` of [e_i, e_j] for
/// horizontal basis vectors, stored with i < j (antisymmetry implied).
/// All indices are zero-based.
struct StructureConstant {
  int k;
  int i;
  int j;
  double value;
};

class GroupSpec {
 public:
  /// Validates stratification, antisymmetry and Q >= 3. `dense` is indexed
  /// dense[k][i][j] with k < dim v_2 and i, j < dim v_1.
  GroupSpec(std::vector<int> layer_dims,
            const std::vector<std::vector<std::vector<double>>>& dense,
            double kappa = 1.0, std::string name = "custom")
      : layer_dims_(std::move(layer_dims)), kappa_(kappa), name_(std::move(name)) {
    if (layer_dims_.empty() || layer_dims_.size() > 2)
      throw Error("layer_dims must have 1 or 2 entries (step <= 2)");
    for (int d : layer_dims_)
      if (d <= 0) throw Error("layer dimensions must be positive");
    if (!(kappa_ > 0.0) || !std::isfinite(kappa_)) throw Error("gauge kappa must be positive");
    h_ = layer_dims_[0];
    v_ = layer_dims_.size() == 2 ? layer_dims_[1] : 0;
    if (h_ + v_ > kMaxDim) throw Error("topological dimension exceeds supported maximum");
    if (homogeneous_dim() < 3) throw Error("homogeneous dimension Q must be at least 3");

    if (static_cast<int>(dense.size()) != v_)
      throw Error("structure_constants must have one matrix per vertical dimension");
    for (int k = 0; k < v_; ++k) {
      if (static_cast<int>(dense[k].size()) != h_) throw Error("structure matrix has wrong shape");
      for (int i = 0; i < h_; ++i) {
        if (static_cast<int>(dense[k][i].size()) != h_)
          throw Error("structure matrix has wrong shape");
      }
      for (int i = 0; i < h_; ++i) {
        if (dense[k][i][i] != 0.0) throw Error("structure constants are not antisymmetric (nonzero diagonal)");
        for (int j = i + 1; j < h_; ++j) {
          const double a = dense[k][i][j];
          const double b = dense[k][j][i];
          if (!std::isfinite(a) || !std::isfinite(b)) throw Error("structure constants must be finite");
          if (a != -b) throw Error("structure constants are not antisymmetric");
          if (a != 0.0) constants_.push_back({k, i, j, a});
        }
      }
    }
    check_stratified(dense);
  }

  static GroupSpec euclidean(int n) {
    return GroupSpec({n}, {}, 1.0, "euclidean:" + std::to_string(n));
  }

  /// Heisenberg group H^n, dims (2n, 1), [e_i, e_{n+i}] = e_{2n+1}.
  static GroupSpec heisenberg(int n, double kappa = 1.0) {
    if (n < 1) throw Error("heisenberg index must be >= 1");
    std::vector<std::vector<std::vector<double>>> b(
        1, std::vector<std::vector<double>>(2 * n, std::vector<double>(2 * n, 0.0)));
    for (int i = 0; i < n; ++i) {
      b[0][i][n + i] = 1.0;
      b[0][n + i][i] = -1.0;
    }
    return GroupSpec({2 * n, 1}, b, kappa, "heisenberg:" + std::to_string(n));
  }

  int horizontal_dim() const { return h_; }
  int vertical_dim() const { return v_; }
  int dim() const { return h_ + v_; }
  int step() const { return v_ > 0 ? 2 : 1; }
  int homogeneous_dim() const { return h_ + 2 * v_; }
  double kappa() const { return kappa_; }
  const std::string& name() const { return name_; }
  const std::vector<int>& layer_dims() const { return layer_dims_; }
  const std::vector<StructureConstant>& constants() const { return constants_; }

  /// Layer (1 or 2) of coordinate index `i`.
  int weight(int i) const { return i < h_ ? 1 : 2; }

  std::vector<std::vector<std::vector<double>>> dense_constants() const {
    std::vector<std::vector<std::vector<double>>> b(
        v_, std::vector<std::vector<double>>(h_, std::vector<double>(h_, 0.0)));
    for (const auto& c : constants_) {
      b[c.k][c.i][c.j] = c.value;
      b[c.k][c.j][c.i] = -c.value;
    }
    return b;
  }

  Point identity() const { return Point(dim()); }

  void require(const Point& p) const {
    if (p.dim() != dim()) throw Error("point dimension does not match group spec");
  }

 private:
  // v_2 must be spanned by [v_1, v_1]: the B^{(k)} must be linearly independent.
  void check_stratified(const std::vector<std::vector<std::vector<double>>>& dense) const {
    if (v_ == 0) return;
    const int cols = h_ * h_;
    std::vector<std::vector<double>> rows(v_, std::vector<double>(cols));
    for (int k = 0; k < v_; ++k)
      for (int i = 0; i < h_; ++i)
        for (int j = 0; j < h_; ++j) rows[k][i * h_ + j] = dense[k][i][j];
    int rank = 0;
    for (int c = 0; c < cols && rank < v_; ++c) {
      int piv = -1;
      double best = 1e-12;
      for (int r = rank; r < v_; ++r) {
        if (std::abs(rows[r][c]) > best) {
          best = std::abs(rows[r][c]);
          piv = r;
        }
      }
      if (piv < 0) continue;
      std::swap(rows[piv], rows[rank]);
      for (int r = rank + 1; r < v_; ++r) {
        const double f = rows[r][c] / rows[rank][c];
        for (int cc = c; cc < cols; ++cc) rows[r][cc] -= f * rows[rank][cc];
      }
      ++rank;
    }
    if (rank < v_) throw Error("second layer is not generated by brackets of the first layer");
  }

  std::vector<int> layer_dims_;
  std::vector<StructureConstant> constants_;
  double kappa_;
  std::string name_;
  int h_ = 0;
  int v_ = 0;
};

// ---------------------------------------------------------------------------
// Group operations

namespace detail {

/// Vertical BCH correction 1/2 B(x, x') added into `out`.
inline void add_bracket(const GroupSpec& g, const Point& p, const Point& q, Point& out) {
  const int h = g.horizontal_dim();
  for (const auto& c : g.constants())
    out[h + c.k] += 0.5 * c.value * (p[c.i] * q[c.j] - p[c.j] * q[c.i]);
}

inline Point mul(const GroupSpec& g, const Point& p, const Point& q) {
  Point r(p.dim());
  for (int i = 0; i < p.dim(); ++i) r[i] = p[i] + q[i];
  add_bracket(g, p, q, r);
  return r;
}

/// |x|^4 + kappa |t|^2, the fourth power of the gauge.
inline double gauge4(const GroupSpec& g, const Point& p) {
  const int h = g.horizontal_dim();
  double x2 = 0.0;
  for (int i = 0; i < h; ++i) x2 += p[i] * p[i];
  double t2 = 0.0;
  for (int i = h; i < p.dim(); ++i) t2 += p[i] * p[i];
  return x2 * x2 + g.kappa() * t2;
}

/// gauge4(p^{-1} q) without forming the product explicitly.
inline double dist4(const GroupSpec& g, const Point& p, const Point& q) {
  const int h = g.horizontal_dim();
  const int n = p.dim();
  std::array<double, kMaxDim> d{};
  for (int i = 0; i < n; ++i) d[i] = q[i] - p[i];
  // (-p) . q: bracket term 1/2 B(-p, q)
  for (const auto& c : g.constants()) d[h + c.k] -= 0.5 * c.value * (p[c.i] * q[c.j] - p[c.j] * q[c.i]);
  double x2 = 0.0;
  for (int i = 0; i < h; ++i) x2 += d[i] * d[i];
  double t2 = 0.0;
  for (int i = h; i < n; ++i) t2 += d[i] * d[i];
  return x2 * x2 + g.kappa() * t2;
}

inline double root4(double v) { return v > 0.0 ? std::sqrt(std::sqrt(v)) : 0.0; }

}  // namespace detail

inline Point multiply(const GroupSpec& g, const Point& p, const Point& q) {
  g.require(p);
  g.require(q);
  return detail::mul(g, p, q);
}

/// exp(X)^{-1} = exp(-X) in exponential coordinates.
inline Point inverse(const GroupSpec& g, const Point& p) {
  g.require(p);
  Point r(p.dim());
  for (int i = 0; i < p.dim(); ++i) r[i] = -p[i];
  return r;
}

inline Point dilate(const GroupSpec& g, double t, const Point& p) {
  g.require(p);
  if (!(t > 0.0) || !std::isfinite(t)) throw Error("dilation factor must be positive");
  Point r(p.dim());
  const double t2 = t * t;
  for (int i = 0; i < p.dim(); ++i) r[i] = p[i] * (g.weight(i) == 1 ? t : t2);
  return r;
}

/// Korányi-type homogeneous gauge (|x|^4 + kappa |t|^2)^{1/4}.
inline double gauge(const GroupSpec& g, const Point& p) {
  g.require(p);
  return detail::root4(detail::gauge4(g, p));
}

/// Left-invariant quasi-distance gauge(p^{-1} q).
inline double quasi_dist(const GroupSpec& g, const Point& p, const Point& q) {
  g.require(p);
  g.require(q);
  return detail::root4(detail::dist4(g, p, q));
}

/// Unit horizontal direction e_i (zero-based) scaled by `tau`.
inline Point horizontal_step(const GroupSpec& g, int i, double tau) {
  Point e(g.dim());
  e[i] = tau;
  return e;
}

/// Haar measure of the unit gauge ball, in closed form:
/// omega_{m1} omega_{m2} kappa^{-m2/2} (m1/4) B(m1/4, m2/2 + 1).
inline double unit_ball_volume(const GroupSpec& g) {
  auto omega = [](int n) { return n == 0 ? 1.0 : std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0 + 1.0); };
  const int m1 = g.horizontal_dim();
  const int m2 = g.vertical_dim();
  if (m2 == 0) return omega(m1);
  return omega(m1) * omega(m2) * std::pow(g.kappa(), -m2 / 2.0) * (m1 / 4.0) *
         std::beta(m1 / 4.0, m2 / 2.0 + 1.0);
}

/// Half-widths of the coordinate box containing the unit gauge ball.
inline Point unit_ball_box(const GroupSpec& g) {
  Point b(g.dim());
  for (int i = 0; i < g.dim(); ++i) b[i] = g.weight(i) == 1 ? 1.0 : 1.0 / std::sqrt(g.kappa());
  return b;
}

}  // namespace carnot
