#pragma once

// Iterated left-invariant horizontal derivatives X_alpha = X_{a1} ... X_{al},
// where X_i f(p) = d/dtau f(p . exp(tau e_i)) at tau = 0.

#include <cmath>
#include <string>
#include <vector>

#include "carnot/group.hpp"

namespace carnot {

inline constexpr int kMaxDerivativeOrder = 4;

/// Multi-index over horizontal directions. Entries are 1-based (X_1 .. X_m1).
class MultiIndex {
 public:
  MultiIndex() = default;
  MultiIndex(std::initializer_list<int> e) : entries_(e) {}
  explicit MultiIndex(std::vector<int> e) : entries_(std::move(e)) {}

  int order() const { return static_cast<int>(entries_.size()); }
  const std::vector<int>& entries() const { return entries_; }
  int operator[](int k) const { return entries_[k]; }

  void validate(const GroupSpec& g) const {
    for (int a : entries_)
      if (a < 1 || a > g.horizontal_dim()) throw Error("multi-index entry outside horizontal layer");
  }

  std::string str() const {
    std::string s = "(";
    for (std::size_t k = 0; k < entries_.size(); ++k) s += (k ? "," : "") + std::to_string(entries_[k]);
    return s + ")";
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> entries_;
};

/// All multi-indices of exactly the given order.
inline std::vector<MultiIndex> multi_indices(const GroupSpec& g, int order) {
  std::vector<MultiIndex> out;
  std::vector<int> cur(order, 1);
  if (order == 0) return {MultiIndex{}};
  for (;;) {
    out.emplace_back(cur);
    int k = order - 1;
    while (k >= 0 && cur[k] == g.horizontal_dim()) cur[k--] = 1;
    if (k < 0) break;
    ++cur[k];
  }
  return out;
}

/// Default finite-difference step: 1e-4 x scale for first order, 1e-3 x scale
/// for higher orders.
inline double default_step(int order, double scale = 1.0) { return (order <= 1 ? 1e-4 : 1e-3) * scale; }

namespace detail {

template <class F>
double nested_difference(const GroupSpec& g, const F& f, const MultiIndex& a, int k, const Point& p,
                         double h) {
  if (k == a.order()) {
    const double v = f(p);
    if (!std::isfinite(v)) throw Error("non-finite field value in horizontal derivative");
    return v;
  }
  const int dir = a[k] - 1;
  const Point plus = mul(g, p, horizontal_step(g, dir, h));
  const Point minus = mul(g, p, horizontal_step(g, dir, -h));
  return (nested_difference(g, f, a, k + 1, plus, h) - nested_difference(g, f, a, k + 1, minus, h)) /
         (2.0 * h);
}

}  // namespace detail

/// X_alpha f(p) by nested central differences along right-translation flows.
/// Truncation error is O(h^2) per level for smooth f.
template <class F>
double horizontal_derivative(const GroupSpec& g, const F& f, const MultiIndex& alpha, const Point& p,
                             double h) {
  g.require(p);
  alpha.validate(g);
  if (alpha.order() > kMaxDerivativeOrder) throw Error("derivative order above 4 is not supported");
  if (!(h > 0.0)) throw Error("finite-difference step must be positive");
  return detail::nested_difference(g, f, alpha, 0, p, h);
}

template <class F>
double horizontal_derivative(const GroupSpec& g, const F& f, const MultiIndex& alpha, const Point& p) {
  return horizontal_derivative(g, f, alpha, p, default_step(alpha.order()));
}

}  // namespace carnot
