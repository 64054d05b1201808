#pragma once

// Smooth partitions of unity subordinate to tile collections, and scale-eps
// cutoffs around a set with L^p-controlled horizontal derivatives.
//
// psi(q) = rho(gauge(p^{-1} q)) with rho = 1 on [0, R^out] and 0 beyond
// 2 R^out. For a tile T_w at level m, psi_w = psi o f_w^{-1}, which equals
// rho(2^m d(p_w, q)). The partition is phi_i = psi_i prod_{k<i} (1 - psi_k),
// so sum_{k<=i} phi_k = 1 - prod_{k<=i} (1 - psi_k).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "carnot/derivative.hpp"
#include "carnot/measure.hpp"
#include "carnot/random.hpp"
#include "carnot/spatial.hpp"
#include "carnot/tiling.hpp"

namespace carnot {

/// Smooth non-increasing step: 1 on [0, r1], 0 on [r2, inf), built from
/// e^{-1/tau} so every derivative vanishes at both ends.
class BumpProfile {
 public:
  BumpProfile(double r1, double r2) : r1_(r1), r2_(r2) {
    if (!(r1 > 0.0) || !(r2 > r1)) throw Error("bump profile needs 0 < r1 < r2");
  }
  double r1() const { return r1_; }
  double r2() const { return r2_; }

  double operator()(double r) const {
    if (r <= r1_) return 1.0;
    if (r >= r2_) return 0.0;
    const double tau = (r - r1_) / (r2_ - r1_);
    const double a = edge(1.0 - tau);
    const double b = edge(tau);
    return a / (a + b);
  }

 private:
  static double edge(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
  double r1_;
  double r2_;
};

class Bump {
 public:
  Bump(const GroupSpec& g, const Point& center, double r1, double r2)
      : spec_(g), center_inv_(inverse(g, center)), profile_(r1, r2) {
    g.require(center);
  }
  double operator()(const Point& q) const { return profile_(gauge(spec_, detail::mul(spec_, center_inv_, q))); }
  const BumpProfile& profile() const { return profile_; }

 private:
  GroupSpec spec_;
  Point center_inv_;
  BumpProfile profile_;
};

inline Bump build_bump(const GroupSpec& g, const Point& center, double r1, double r2) {
  return Bump(g, center, r1, r2);
}

/// psi_i and phi_i for a diameter-sorted tile list.
class HPPartition {
 public:
  HPPartition(const TileSystem& sys, std::vector<TileAddress> tiles)
      : spec_(sys.spec()), profile_(sys.r_out(), 2.0 * sys.r_out()), base_r_out_(sys.r_out()) {
    if (tiles.empty()) throw Error("partition needs at least one tile");
    std::stable_sort(tiles.begin(), tiles.end(),
                     [](const TileAddress& a, const TileAddress& b) { return a.level() < b.level(); });
    tiles_ = std::move(tiles);
    double xmax = 0.0;
    for (const auto& w : tiles_) {
      centers_.push_back(tile_center(sys, w));
      center_inv_.push_back(inverse(spec_, centers_.back()));
      double s = 0.0;
      for (int i = 0; i < spec_.horizontal_dim(); ++i) s += centers_.back()[i] * centers_.back()[i];
      xmax = std::max(xmax, std::sqrt(s));
    }
    const double reach = support_radius(0);
    grid_ = std::make_shared<PointGrid>(spec_, reach, xmax + 2.0 * reach);
    for (std::size_t i = 0; i < tiles_.size(); ++i) grid_->insert(centers_[i], static_cast<int>(i));
  }

  std::size_t size() const { return tiles_.size(); }
  const std::vector<TileAddress>& tiles() const { return tiles_; }
  const TileAddress& tile(std::size_t i) const { return tiles_[i]; }
  const Point& center(std::size_t i) const { return centers_[i]; }
  int level(std::size_t i) const { return tiles_[i].level(); }
  const GroupSpec& spec() const { return spec_; }
  /// supp psi_i lies in B(p_i, 2 R^out 2^{-m_i}).
  double support_radius(std::size_t i) const { return std::ldexp(2.0 * base_r_out_, -tiles_[i].level()); }
  double plateau_radius(std::size_t i) const { return std::ldexp(base_r_out_, -tiles_[i].level()); }

  double psi(std::size_t i, const Point& q) const {
    return profile_(std::ldexp(gauge(spec_, detail::mul(spec_, center_inv_[i], q)), tiles_[i].level()));
  }

  double phi(std::size_t i, const Point& q) const {
    double v = psi(i, q);
    for (std::size_t k = 0; k < i && v != 0.0; ++k) v *= 1.0 - psi(k, q);
    return v;
  }

  /// Indices i (ascending) whose support can contain q.
  std::vector<std::size_t> candidates(const Point& q) const {
    std::vector<std::size_t> out;
    grid_->for_each_near(q, [&](int id) {
      const auto i = static_cast<std::size_t>(id);
      if (quasi_dist(spec_, centers_[i], q) < support_radius(i)) out.push_back(i);
    });
    std::sort(out.begin(), out.end());
    return out;
  }

  /// sum_i phi_i(q) = 1 - prod_i (1 - psi_i(q)); tiles whose support misses q
  /// contribute a factor of one.
  double sum(const Point& q) const {
    double prod = 1.0;
    for (std::size_t i : candidates(q)) prod *= 1.0 - psi(i, q);
    return 1.0 - prod;
  }

  /// sum_{k<=i} phi_k(q), accumulated term by term.
  double partial_sum(std::size_t i, const Point& q) const {
    double s = 0.0;
    double prod = 1.0;
    for (std::size_t k = 0; k <= i; ++k) {
      const double p = psi(k, q);
      s += p * prod;
      prod *= 1.0 - p;
    }
    return s;
  }

  /// 1 - prod_{k<=i} (1 - psi_k(q)).
  double theta(std::size_t i, const Point& q) const {
    double prod = 1.0;
    for (std::size_t k = 0; k <= i; ++k) prod *= 1.0 - psi(k, q);
    return 1.0 - prod;
  }

 private:
  GroupSpec spec_;
  BumpProfile profile_;
  double base_r_out_;
  std::vector<TileAddress> tiles_;
  std::vector<Point> centers_;
  std::vector<Point> center_inv_;
  std::shared_ptr<PointGrid> grid_;
};

inline HPPartition build_partition(const TileSystem& sys, std::vector<TileAddress> tiles) {
  return HPPartition(sys, std::move(tiles));
}

/// The M children of the level-(m-1) tile 1...1 (letters zero-based 0).
inline std::vector<TileAddress> sibling_tiles(const TileSystem& sys, int level) {
  if (level < 1) throw Error("sibling tiles need level >= 1");
  TileAddress parent(std::vector<int>(static_cast<std::size_t>(level - 1), 0));
  std::vector<TileAddress> out;
  for (int j = 0; j < sys.size(); ++j) out.push_back(parent.child(j));
  return out;
}

// ---------------------------------------------------------------------------
// Verification

struct CAlphaEntry {
  MultiIndex alpha;
  int level = 0;
  double c_alpha = 0.0;  // max over samples and tiles of |X_a phi_i| 2^{-m|a|}
};

struct PartitionReport {
  double sum_error = 0.0;        // max |sum phi - 1| over samples of the tiles
  double theta_error = 0.0;      // max |partial sums - (1 - prod)| over samples
  double phi_min = 0.0;
  double phi_max = 0.0;
  double support_violation = 0.0;  // max phi_i beyond its support radius
  double constant_derivative = 0.0;  // max |X_a sum phi|, |a| = 1, deep interior
  std::vector<CAlphaEntry> c_alpha;
  std::vector<double> stability;  // per order: max/min of per-level C_alpha maxima
  std::size_t n_samples = 0;
};

struct PartitionCheckOptions {
  int max_order = 2;
  std::size_t derivative_samples = 400;
  int sample_depth = 10;
};

/// Sum-to-one, theta identity, range and support checks on samples of the
/// tiles; C_alpha from finite differences on support-ball samples that are
/// images of a fixed reference set, so levels are directly comparable.
inline PartitionReport verify_partition(const TileSystem& sys, const HPPartition& part, std::size_t n_samples,
                                        std::uint64_t seed, const PartitionCheckOptions& opt = {}) {
  if (opt.max_order < 0 || opt.max_order > kMaxDerivativeOrder) throw Error("unsupported derivative order");
  const GroupSpec& g = sys.spec();
  PartitionReport rep;
  rep.n_samples = n_samples;
  rep.phi_min = 1.0;
  rep.phi_max = 0.0;
  Rng rng(derive_seed(seed, "partition.samples"));

  const std::size_t per_tile = std::max<std::size_t>(1, n_samples / part.size());
  for (std::size_t i = 0; i < part.size(); ++i) {
    const auto pts = sample_tile(sys, part.tile(i), per_tile, opt.sample_depth, derive_seed(seed, i));
    for (const auto& q : pts) {
      rep.sum_error = std::max(rep.sum_error, std::abs(part.sum(q) - 1.0));
      const auto cand = part.candidates(q);
      if (!cand.empty()) {
        const std::size_t last = cand.back();
        rep.theta_error = std::max(rep.theta_error, std::abs(part.partial_sum(last, q) - part.theta(last, q)));
      }
      for (std::size_t k : cand) {
        const double v = part.phi(k, q);
        rep.phi_min = std::min(rep.phi_min, v);
        rep.phi_max = std::max(rep.phi_max, v);
      }
    }
  }

  // Support: points just beyond each support ball.
  for (std::size_t i = 0; i < part.size(); ++i) {
    for (int t = 0; t < 16; ++t) {
      const Point u = sample_unit_sphere(g, rng);
      const Point q = detail::mul(g, part.center(i), dilate(g, part.support_radius(i) * (1.0 + 1e-9 + 0.5 * uniform01(rng)), u));
      rep.support_violation = std::max(rep.support_violation, part.phi(i, q));
    }
  }

  // Derivative constants.
  std::vector<Point> ref;
  Rng rr(derive_seed(seed, "partition.reference"));
  for (std::size_t s = 0; s < opt.derivative_samples; ++s) ref.push_back(dilate(g, 2.0 * sys.r_out(), sample_unit_ball(g, rr)));
  std::vector<int> levels;
  for (std::size_t i = 0; i < part.size(); ++i) levels.push_back(part.level(i));
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  for (int order = 1; order <= opt.max_order; ++order) {
    std::vector<double> per_level;
    for (const auto& alpha : multi_indices(g, order)) {
      for (int lv : levels) {
        CAlphaEntry e{alpha, lv, 0.0};
        const double scale = std::ldexp(1.0, -lv);
        const double h = default_step(order, scale);
        for (std::size_t i = 0; i < part.size(); ++i) {
          if (part.level(i) != lv) continue;
          auto f = [&](const Point& q) { return part.phi(i, q); };
          for (const auto& z : ref) {
            const Point q = detail::mul(g, part.center(i), dilate(g, scale, z));
            e.c_alpha = std::max(e.c_alpha, std::abs(horizontal_derivative(g, f, alpha, q, h)) * std::pow(scale, order));
          }
        }
        rep.c_alpha.push_back(e);
      }
    }
    for (int lv : levels) {
      double m = 0.0;
      for (const auto& e : rep.c_alpha)
        if (e.alpha.order() == order && e.level == lv) m = std::max(m, e.c_alpha);
      per_level.push_back(m);
    }
    const double lo = *std::min_element(per_level.begin(), per_level.end());
    const double hi = *std::max_element(per_level.begin(), per_level.end());
    rep.stability.push_back(lo > 0.0 ? hi / lo : INFINITY);
  }

  // X_a (sum phi) at points deep inside the plateau of some tile.
  for (std::size_t i = 0; i < part.size(); ++i) {
    const double scale = std::ldexp(1.0, -part.level(i));
    auto f = [&](const Point& q) { return part.sum(q); };
    for (int t = 0; t < 8; ++t) {
      const Point q = detail::mul(g, part.center(i), dilate(g, scale * sys.r_in() * 0.5, sample_unit_ball(g, rng)));
      for (const auto& alpha : multi_indices(g, 1))
        rep.constant_derivative =
            std::max(rep.constant_derivative, std::abs(horizontal_derivative(g, f, alpha, q, default_step(1, scale))));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Cutoffs

struct Cutoff {
  HPPartition partition;
  DyadicCover cover;
  int level = 0;
  double eps = 0.0;

  double operator()(const Point& q) const { return partition.sum(q); }
};

/// Cover E by the level-m tiles with 2^{-m} diam T <= eps and take the sum of
/// the resulting partition.
template <class Range>
Cutoff build_cutoff(const TileSystem& sys, const Range& points, double eps, int max_level = 12) {
  if (!(eps > 0.0)) throw Error("cutoff scale must be positive");
  int m = 0;
  while (std::ldexp(sys.diameter(), -m) > eps * (1.0 + 1e-12)) ++m;
  if (m > max_level) throw Error("cutoff scale below the achievable tile resolution");
  auto cover = cover_at_level(sys, points, m);
  if (cover.size() == 0) throw Error("cutoff set is not covered by any tile");
  if (cover.size() > (std::size_t{1} << 22)) throw Error("cutoff cover too large");
  HPPartition part(sys, cover.addresses());
  return Cutoff{std::move(part), std::move(cover), m, eps};
}

struct CutoffLpRow {
  MultiIndex alpha;
  int level = 0;
  double eps = 0.0;
  double lp_norm = 0.0;
  double bound_rhs = 0.0;
  double ratio = 0.0;
};

struct CutoffLpReport {
  double p = 1.0;
  int ell = 0;
  double content_dim = 0.0;
  double content = 0.0;
  std::vector<CutoffLpRow> rows;
  bool low_samples = false;
};

/// Monte Carlo ||X_a phi_eps||_p over the union of support balls (uniform
/// ball samples weighted by 1 / multiplicity), paired with
/// eps^{ell - |a|} (content + eps)^{1/p}, content from the cutoff's cover at
/// dimension Q - ell p. p = infinity gives sup norms over the same samples.
inline CutoffLpReport cutoff_lp_report(const TileSystem& sys, const Cutoff& cut, int ell, double p, int alpha_max,
                                       std::size_t n_quad, std::uint64_t seed) {
  if (!(p >= 1.0)) throw Error("p must be at least 1");
  if (alpha_max < 0 || alpha_max > kMaxDerivativeOrder) throw Error("unsupported derivative order");
  const GroupSpec& g = sys.spec();
  const HPPartition& part = cut.partition;
  CutoffLpReport rep;
  rep.p = p;
  rep.ell = ell;
  rep.content_dim = g.homogeneous_dim() - ell * (std::isinf(p) ? 0.0 : p);
  rep.content = cut.cover.content(rep.content_dim);
  rep.low_samples = n_quad < 1000;

  const double rad = part.support_radius(0);
  const double ball_volume = unit_ball_volume(g) * std::pow(rad, g.homogeneous_dim());
  const double union_weight = static_cast<double>(part.size()) * ball_volume;

  std::vector<MultiIndex> alphas;
  for (int o = 0; o <= alpha_max; ++o)
    for (const auto& a : multi_indices(g, o)) alphas.push_back(a);
  std::vector<double> acc(alphas.size(), 0.0);

  Rng rng(derive_seed(seed, "cutoff.lp"));
  auto f = [&](const Point& q) { return part.sum(q); };
  for (std::size_t s = 0; s < n_quad; ++s) {
    const std::size_t i = static_cast<std::size_t>(uniform_int(rng, static_cast<int>(part.size())));
    const Point x = detail::mul(g, part.center(i), dilate(g, rad, sample_unit_ball(g, rng)));
    const double mult = static_cast<double>(std::max<std::size_t>(1, part.candidates(x).size()));
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      const double v = alphas[a].order() == 0
                           ? f(x)
                           : horizontal_derivative(g, f, alphas[a], x, default_step(alphas[a].order(), std::ldexp(1.0, -cut.level)));
      if (std::isinf(p)) {
        acc[a] = std::max(acc[a], std::abs(v));
      } else {
        acc[a] += std::pow(std::abs(v), p) / mult;
      }
    }
  }
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    CutoffLpRow row;
    row.alpha = alphas[a];
    row.level = cut.level;
    row.eps = cut.eps;
    row.lp_norm = std::isinf(p) ? acc[a] : std::pow(acc[a] / static_cast<double>(n_quad) * union_weight, 1.0 / p);
    const double tail = std::isinf(p) ? 1.0 : std::pow(rep.content + cut.eps, 1.0 / p);
    row.bound_rhs = std::pow(cut.eps, ell - alphas[a].order()) * tail;
    row.ratio = row.lp_norm / row.bound_rhs;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace carnot
