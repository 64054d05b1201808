#pragma once

// Self-similar dyadic tiles T = f_1(T) u ... u f_M(T), M = 2^Q, where each
// f_j = (left translation by a digit) o delta_{1/2}. Tiles are addressed by
// words w, with f_w = f_{w_1} o ... o f_{w_m} and T_w = f_w(T).
//
// Letters are stored zero-based (0 .. M-1); text output prints them 1-based.
//
// Geometry is estimated from the address tree: an "anchor" (the fixed point of
// f_1, which lies in T) generates exact points f_u(anchor) of T. Membership of
// an arbitrary point is decided up to resolution 2^{-depth} by a pruned
// search: x lies in T_u only if f_u^{-1}(x) lies in the hull ball about the
// barycenter. Surviving nodes at depth n correspond to lattice translates near
// delta_{2^n}(x), so the search width stays bounded.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "carnot/group.hpp"
#include "carnot/random.hpp"

namespace carnot {

class TileAddress {
 public:
  TileAddress() = default;
  explicit TileAddress(std::vector<int> letters) : letters_(std::move(letters)) {}
  TileAddress(std::initializer_list<int> letters) : letters_(letters) {}

  int level() const { return static_cast<int>(letters_.size()); }
  const std::vector<int>& letters() const { return letters_; }
  int operator[](int k) const { return letters_[k]; }

  TileAddress child(int j) const {
    TileAddress a = *this;
    a.letters_.push_back(j);
    return a;
  }
  TileAddress concat(const TileAddress& other) const {
    TileAddress a = *this;
    a.letters_.insert(a.letters_.end(), other.letters_.begin(), other.letters_.end());
    return a;
  }

  /// Base-M integer key; requires M^level < 2^64.
  std::uint64_t key(int m) const {
    std::uint64_t k = 0;
    for (int l : letters_) k = k * static_cast<std::uint64_t>(m) + static_cast<std::uint64_t>(l);
    return k;
  }
  static TileAddress from_key(std::uint64_t key, int level, int m) {
    std::vector<int> l(level);
    for (int i = level - 1; i >= 0; --i) {
      l[i] = static_cast<int>(key % static_cast<std::uint64_t>(m));
      key /= static_cast<std::uint64_t>(m);
    }
    return TileAddress(std::move(l));
  }

  /// 1-based letters joined by '.', empty for the root.
  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < letters_.size(); ++i) s += (i ? "." : "") + std::to_string(letters_[i] + 1);
    return s;
  }

  friend bool operator==(const TileAddress&, const TileAddress&) = default;
  friend auto operator<=>(const TileAddress&, const TileAddress&) = default;

 private:
  std::vector<int> letters_;
};

/// q -> translation . delta_{1/2}(q)
struct Homothety {
  Point translation;
};

struct TileSystemOptions {
  int beam_width = 256;
  int beam_depth = 20;
  int radii_samples = 20000;
  int membership_depth = 16;
  bool allow_duplicate_digits = false;
  std::uint64_t seed = 0x5eed;
};

class TileSystem;

namespace detail {
inline double estimate_inner_radius(const TileSystem& sys, const Point& center, double r_out, int n,
                                    std::uint64_t seed);
}

class TileSystem {
 public:
  TileSystem(GroupSpec spec, std::vector<Point> digits, const TileSystemOptions& opt = {})
      : spec_(std::move(spec)), opt_(opt) {
    const int q = spec_.homogeneous_dim();
    if (q > 20) throw Error("homogeneous dimension too large for a tile system");
    const std::size_t m = std::size_t{1} << q;
    if (digits.size() != m)
      throw Error("tile system needs exactly 2^Q = " + std::to_string(m) + " digits, got " +
                  std::to_string(digits.size()));
    for (const auto& d : digits) spec_.require(d);
    if (!opt.allow_duplicate_digits) {
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b)
          if (max_abs_diff(digits[a], digits[b]) < 1e-12) throw Error("duplicate digits in tile system");
    }
    maps_.reserve(m);
    for (auto& d : digits) maps_.push_back({d});
    build_groups();
    build_geometry();
  }

  const GroupSpec& spec() const { return spec_; }
  int size() const { return static_cast<int>(maps_.size()); }
  const std::vector<Homothety>& maps() const { return maps_; }
  const TileSystemOptions& options() const { return opt_; }

  /// Fixed point of f_1; an exact point of T.
  const Point& anchor() const { return anchor_; }
  /// Base center p used for tile centers p_w = f_w(p).
  const Point& center() const { return center_; }
  double r_in() const { return r_in_; }
  double r_out() const { return r_out_; }
  double diameter() const { return diam_; }
  /// Barycenter of the natural measure (in exponential coordinates).
  const Point& hull_center() const { return hull_center_; }
  /// Radius about the barycenter containing T (pruning bound, slightly inflated).
  double hull_radius() const { return hull_; }
  /// Empirical bound on gauge(p q) / (gauge(p) + gauge(q)), with margin.
  double quasi_constant() const { return quasi_; }
  /// Coordinate box containing T.
  const std::pair<Point, Point>& bounding_box() const { return box_; }
  double bounding_box_volume() const {
    double v = 1.0;
    for (int i = 0; i < spec_.dim(); ++i) v *= box_.second[i] - box_.first[i];
    return v;
  }

  /// f_j(p)
  Point apply(int j, const Point& p) const {
    Point r = p;
    for (int i = 0; i < r.dim(); ++i) r[i] *= spec_.weight(i) == 1 ? 0.5 : 0.25;
    return detail::mul(spec_, maps_[j].translation, r);
  }

  /// f_j^{-1}(p) = delta_2(a_j^{-1} p)
  Point apply_inverse(int j, const Point& p) const {
    const Point& a = maps_[j].translation;
    const int h = spec_.horizontal_dim();
    Point r(p.dim());
    for (int i = 0; i < p.dim(); ++i) r[i] = p[i] - a[i];
    for (const auto& c : spec_.constants()) r[h + c.k] -= 0.5 * c.value * (a[c.i] * p[c.j] - a[c.j] * p[c.i]);
    for (int i = 0; i < r.dim(); ++i) r[i] *= i < h ? 2.0 : 4.0;
    return r;
  }

  /// y = f_j^{-1}(z) if y can still lie in T (box and hull tests).
  bool pull_back(int j, const Point& z, Point& y) const {
    const Point& a = maps_[j].translation;
    const int h = spec_.horizontal_dim();
    y = Point(z.dim());
    for (int i = 0; i < h; ++i) {
      y[i] = 2.0 * (z[i] - a[i]);
      if (y[i] < box_.first[i] || y[i] > box_.second[i]) return false;
    }
    return finish_pull_back(j, z, y);
  }

  /// Calls fn(j, y) for each child j with y = f_j^{-1}(z) possibly in T;
  /// stops early when fn returns true. Digits sharing a horizontal part are
  /// rejected together by one horizontal box test.
  template <class Fn>
  bool for_each_child(const Point& z, Fn&& fn) const {
    const int h = spec_.horizontal_dim();
    Point y(z.dim());
    for (const auto& grp : hgroups_) {
      bool ok = true;
      for (int i = 0; i < h && ok; ++i) {
        y[i] = 2.0 * (z[i] - grp.x[i]);
        ok = y[i] >= box_.first[i] && y[i] <= box_.second[i];
      }
      if (!ok) continue;
      for (int j : grp.members)
        if (finish_pull_back(j, z, y) && fn(j, static_cast<const Point&>(y))) return true;
    }
    return false;
  }

  /// f_w(p), letters applied innermost-last.
  Point apply_address(const TileAddress& w, const Point& p) const {
    spec_.require(p);
    for (int l : w.letters())
      if (l < 0 || l >= size()) throw Error("tile address letter out of range");
    Point r = p;
    for (int k = w.level() - 1; k >= 0; --k) r = apply(w[k], r);
    return r;
  }

  Point apply_address_inverse(const TileAddress& w, const Point& p) const {
    Point r = p;
    for (int l : w.letters()) r = apply_inverse(l, r);
    return r;
  }

  /// Could f_u^{-1} applied to the current point still belong to T?
  bool in_hull(const Point& z) const {
    for (int i = 0; i < z.dim(); ++i)
      if (z[i] < box_.first[i] || z[i] > box_.second[i]) return false;
    return detail::dist4(spec_, hull_center_, z) <= hull4_;
  }

  /// x lies within resolution ~2^{-depth} hull of T (optionally restricted to
  /// the child tile T_first).
  bool contains(const Point& x, int depth, int first = -1) const {
    spec_.require(x);
    if (first >= 0) {
      Point y;
      return pull_back(first, x, y) && descend(y, depth - 1);
    }
    return in_hull(x) && descend(x, depth);
  }

  bool contains(const Point& x) const { return contains(x, opt_.membership_depth); }

  /// out[j] = whether x lies in T_j at resolution ~2^{-depth}; one
  /// breadth-first pass shared by all children.
  void child_membership(const Point& x, int depth, std::vector<char>& out) const {
    out.assign(static_cast<std::size_t>(size()), 0);
    struct Node {
      Point z;
      int first;
    };
    std::vector<Node> frontier;
    std::vector<Node> next;
    for_each_child(x, [&](int j, const Point& y) {
      frontier.push_back({y, j});
      return false;
    });
    for (int level = 1; level < depth && !frontier.empty(); ++level) {
      next.clear();
      for (const auto& nd : frontier)
        for_each_child(nd.z, [&](int, const Point& y) {
          next.push_back({y, nd.first});
          return false;
        });
      frontier.swap(next);
    }
    for (const auto& nd : frontier) out[static_cast<std::size_t>(nd.first)] = 1;
  }

  /// Visit every level-`level` address whose tile contains x (resolution
  /// 2^{-(level+extra)}); fn receives the base-M key.
  template <class Fn>
  void containing_tiles(const Point& x, int level, int extra, Fn&& fn) const {
    if (!in_hull(x)) return;
    collect(x, 0, level, extra, 0, fn);
  }

  int multiplicity(const Point& x, int level, int extra = 10) const {
    int n = 0;
    containing_tiles(x, level, extra, [&](std::uint64_t) { ++n; });
    return n;
  }

  /// Does T meet the ball B(z, rho)? Tested against the cloud of anchor
  /// images down to `cloud_depth` further levels.
  bool meets_ball(const Point& z, double rho, int cloud_depth = 6, int budget = 400) const {
    if (detail::root4(detail::dist4(spec_, hull_center_, z)) > quasi_ * (rho + hull_)) return false;
    return cloud_search(z, rho, cloud_depth, budget);
  }

  /// Maximum quasi-distance from `from` to points of T, by beam search over
  /// anchor images.
  double max_distance_from(const Point& from) const {
    struct Node {
      Point offset;  // f_u(identity)
      double d4;
    };
    const double q = 1.0;
    (void)q;
    std::vector<Node> beam{{spec_.identity(), detail::dist4(spec_, from, anchor_)}};
    double best = beam[0].d4;
    double scale = 1.0;
    for (int level = 0; level < opt_.beam_depth; ++level) {
      std::vector<Node> next;
      next.reserve(beam.size() * maps_.size());
      const double child_scale = scale * 0.5;
      for (const auto& nd : beam) {
        for (int j = 0; j < size(); ++j) {
          Point off = detail::mul(spec_, nd.offset, dilate_raw(scale, maps_[j].translation));
          const Point pt = detail::mul(spec_, off, dilate_raw(child_scale, anchor_));
          const double d4 = detail::dist4(spec_, from, pt);
          best = std::max(best, d4);
          next.push_back({off, d4});
        }
      }
      const std::size_t keep = std::min<std::size_t>(next.size(), static_cast<std::size_t>(opt_.beam_width));
      std::partial_sort(next.begin(), next.begin() + static_cast<long>(keep), next.end(),
                        [](const Node& a, const Node& b) { return a.d4 > b.d4; });
      next.resize(keep);
      beam = std::move(next);
      scale = child_scale;
    }
    return detail::root4(best);
  }

  Point dilate_raw(double t, const Point& p) const {
    Point r = p;
    const double t2 = t * t;
    for (int i = 0; i < r.dim(); ++i) r[i] *= spec_.weight(i) == 1 ? t : t2;
    return r;
  }

  /// f_w(p) = f_w(0) . delta_{2^{-m}}(p); returns f_w(0).
  Point address_offset(const TileAddress& w) const { return apply_address(w, spec_.identity()); }

  /// Every address of the given level, in lexicographic order.
  std::vector<TileAddress> level_addresses(int level) const {
    const double total = std::pow(static_cast<double>(size()), level);
    if (total > 5e7) throw Error("too many tiles to enumerate at this level");
    std::vector<TileAddress> out;
    out.reserve(static_cast<std::size_t>(total));
    for (std::uint64_t k = 0; k < static_cast<std::uint64_t>(total); ++k)
      out.push_back(TileAddress::from_key(k, level, size()));
    return out;
  }

  /// Radii recomputed with a different sample budget (center unchanged).
  std::pair<double, double> estimate_radii(int n_samples, std::uint64_t seed) const {
    if (n_samples < 100) throw Error("radius estimation needs at least 100 samples");
    return {detail::estimate_inner_radius(*this, center_, r_out_, n_samples, seed), r_out_};
  }

 private:
  bool descend(const Point& z, int remaining) const {
    if (remaining <= 0) return true;
    return for_each_child(z, [&](int, const Point& y) { return descend(y, remaining - 1); });
  }

  template <class Fn>
  void collect(const Point& z, int lvl, int level, int extra, std::uint64_t key, Fn& fn) const {
    if (lvl == level) {
      if (descend(z, extra)) fn(key);
      return;
    }
    for_each_child(z, [&](int j, const Point& y) {
      collect(y, lvl + 1, level, extra, key * static_cast<std::uint64_t>(size()) + static_cast<std::uint64_t>(j), fn);
      return false;
    });
  }

  // Closest-first search for an anchor image within rho of z. The node budget
  // bounds the work on tiles that graze the ball without meeting it.
  bool cloud_search(const Point& z, double rho, int remaining, int& budget) const {
    if (detail::dist4(spec_, anchor_, z) < rho * rho * rho * rho) return true;
    if (remaining <= 0 || --budget < 0) return false;
    const double reach = quasi_ * (2.0 * rho + hull_);
    std::vector<std::pair<double, Point>> kids;
    for (int j = 0; j < size(); ++j) {
      Point y = apply_inverse(j, z);
      const double dy = detail::root4(detail::dist4(spec_, hull_center_, y));
      if (dy <= reach) kids.emplace_back(dy, y);
    }
    std::sort(kids.begin(), kids.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [dy, y] : kids) {
      if (cloud_search(y, 2.0 * rho, remaining - 1, budget)) return true;
      if (budget < 0) return false;
    }
    return false;
  }

  // Vertical part of f_j^{-1}(z) given the horizontal part already in y.
  bool finish_pull_back(int j, const Point& z, Point& y) const {
    const Point& a = maps_[j].translation;
    const int h = spec_.horizontal_dim();
    for (int i = h; i < z.dim(); ++i) y[i] = z[i] - a[i];
    for (const auto& c : spec_.constants()) y[h + c.k] -= 0.5 * c.value * (a[c.i] * z[c.j] - a[c.j] * z[c.i]);
    for (int i = h; i < z.dim(); ++i) {
      y[i] *= 4.0;
      if (y[i] < box_.first[i] || y[i] > box_.second[i]) return false;
    }
    return detail::dist4(spec_, hull_center_, y) <= hull4_;
  }

  struct HorizontalGroup {
    Point x;
    std::vector<int> members;
  };

  void build_groups() {
    const int h = spec_.horizontal_dim();
    for (int j = 0; j < size(); ++j) {
      const Point& a = maps_[j].translation;
      auto it = std::find_if(hgroups_.begin(), hgroups_.end(), [&](const HorizontalGroup& g) {
        for (int i = 0; i < h; ++i)
          if (g.x[i] != a[i]) return false;
        return true;
      });
      if (it == hgroups_.end()) {
        hgroups_.push_back({a, {j}});
      } else {
        it->members.push_back(j);
      }
    }
  }

  void build_geometry();

  // Coordinate box containing T: start from the box of the hull ball and
  // iterate the interval image of the maps. Each f_j is affine in
  // coordinates, so every step is exact for boxes and stays a superset of T.
  std::pair<Point, Point> attractor_box() const {
    const int h = spec_.horizontal_dim();
    const int d = spec_.dim();
    const auto dense = spec_.dense_constants();
    Point lo(d);
    Point hi(d);
    for (int i = 0; i < h; ++i) {
      lo[i] = hull_center_[i] - hull_;
      hi[i] = hull_center_[i] + hull_;
    }
    for (int k = 0; k < spec_.vertical_dim(); ++k) {
      double w = hull_ * hull_ / std::sqrt(spec_.kappa());
      for (int j = 0; j < h; ++j) {
        double c = 0.0;
        for (int i = 0; i < h; ++i) c += dense[k][i][j] * hull_center_[i];
        w += 0.5 * std::abs(c) * hull_;
      }
      lo[h + k] = hull_center_[h + k] - w;
      hi[h + k] = hull_center_[h + k] + w;
    }
    for (int it = 0; it < 80; ++it) {
      Point nlo(d);
      Point nhi(d);
      for (int i = 0; i < d; ++i) {
        nlo[i] = INFINITY;
        nhi[i] = -INFINITY;
      }
      for (const auto& m : maps_) {
        const Point& a = m.translation;
        for (int i = 0; i < h; ++i) {
          nlo[i] = std::min(nlo[i], a[i] + 0.5 * lo[i]);
          nhi[i] = std::max(nhi[i], a[i] + 0.5 * hi[i]);
        }
        for (int k = 0; k < spec_.vertical_dim(); ++k) {
          double mid = a[h + k] + 0.125 * (lo[h + k] + hi[h + k]);
          double half = 0.125 * (hi[h + k] - lo[h + k]);
          for (int j = 0; j < h; ++j) {
            double c = 0.0;
            for (int i = 0; i < h; ++i) c += dense[k][i][j] * a[i];
            c *= 0.25;
            mid += c * 0.5 * (lo[j] + hi[j]);
            half += std::abs(c) * 0.5 * (hi[j] - lo[j]);
          }
          nlo[h + k] = std::min(nlo[h + k], mid - half);
          nhi[h + k] = std::max(nhi[h + k], mid + half);
        }
      }
      lo = nlo;
      hi = nhi;
    }
    for (int i = 0; i < d; ++i) {
      const double pad = 1e-9 * (1.0 + hi[i] - lo[i]);
      lo[i] -= pad;
      hi[i] += pad;
    }
    return {lo, hi};
  }

  GroupSpec spec_;
  TileSystemOptions opt_;
  std::vector<Homothety> maps_;
  std::vector<HorizontalGroup> hgroups_;
  Point anchor_;
  Point hull_center_;
  Point center_;
  double r_in_ = 0.0;
  double r_out_ = 0.0;
  double diam_ = 0.0;
  double hull_ = 0.0;
  double hull4_ = 0.0;
  double quasi_ = 1.0;
  std::pair<Point, Point> box_;
};

namespace detail {

/// Empirical sup of gauge(p q) / (gauge(p) + gauge(q)).
inline double empirical_quasi_constant(const GroupSpec& g, int n, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 1.0;
  for (int i = 0; i < n; ++i) {
    const Point p = sample_unit_sphere(g, rng);
    const Point q = dilate(g, log_uniform(rng, 1e-3, 1e3), sample_unit_sphere(g, rng));
    const double r = gauge(g, mul(g, p, q)) / (gauge(g, p) + gauge(g, q));
    worst = std::max(worst, r);
  }
  return worst;
}

/// Distance from `center` to the boundary of T: the nearest sampled
/// non-members seed rays center . delta_s(u); each ray is bisected to the
/// boundary and its direction hill-climbed toward shorter crossings. The
/// membership resolution is subtracted at the end.
inline double estimate_inner_radius(const TileSystem& sys, const Point& center, double r_out, int n,
                                    std::uint64_t seed) {
  const GroupSpec& g = sys.spec();
  Rng rng(seed);
  const int depth = sys.options().membership_depth;
  std::vector<std::pair<double, Point>> outside;
  for (int i = 0; i < n; ++i) {
    const Point x = sample_ball(g, center, r_out, rng);
    if (!sys.contains(x, depth)) outside.emplace_back(quasi_dist(g, center, x), x);
  }
  if (outside.empty()) return r_out;
  const std::size_t seeds = std::min<std::size_t>(4, outside.size());
  std::partial_sort(outside.begin(), outside.begin() + static_cast<long>(seeds), outside.end(),
                    [](const auto& a, const auto& b) { return a.first < b.first; });

  const Point cinv = inverse(g, center);
  auto crossing = [&](const Point& u, double hi) {
    // u has unit gauge; center . delta_hi(u) is outside T.
    double lo = 0.0;
    for (int it = 0; it < 24; ++it) {
      const double mid = 0.5 * (lo + hi);
      (sys.contains(mul(g, center, dilate(g, mid, u)), depth) ? lo : hi) = mid;
    }
    return hi;
  };
  double best = outside[0].first;
  for (std::size_t s = 0; s < seeds; ++s) {
    const double d0 = outside[s].first;
    Point u = dilate(g, 1.0 / d0, mul(g, cinv, outside[s].second));
    double r = crossing(u, d0);
    double step = 0.2;
    for (int it = 0; it < 40 && step > 1e-4; ++it) {
      Point v = u;
      for (int i = 0; i < g.dim(); ++i) v[i] += step * uniform(rng, -1.0, 1.0);
      const double gv = gauge(g, v);
      if (gv <= 0.0) continue;
      v = dilate(g, 1.0 / gv, v);
      if (sys.contains(mul(g, center, dilate(g, r, v)), depth)) {
        step *= 0.8;
        continue;
      }
      const double rv = crossing(v, r);
      if (rv < r) {
        r = rv;
        u = v;
      } else {
        step *= 0.8;
      }
    }
    best = std::min(best, r);
  }
  const double resolution = std::ldexp(sys.hull_radius(), -depth);
  return std::max(0.0, best - resolution);
}

}  // namespace detail

inline void TileSystem::build_geometry() {
  // anchor: fixed point of f_1
  Point a = spec_.identity();
  for (int i = 0; i < 200; ++i) a = apply(0, a);
  anchor_ = a;

  // Enumerate anchor images down to a level with at most 2^16 points.
  int k_enum = 1;
  while (std::pow(static_cast<double>(size()), k_enum + 1) <= 65536.0) ++k_enum;
  std::vector<Point> pts{anchor_};
  for (int level = 0; level < k_enum; ++level) {
    std::vector<Point> next;
    next.reserve(pts.size() * maps_.size());
    for (const auto& p : pts)
      for (int j = 0; j < size(); ++j) next.push_back(apply(j, p));
    pts = std::move(next);
  }

  quasi_ = 1.1 * detail::empirical_quasi_constant(spec_, 20000, derive_seed(opt_.seed, "quasi"));

  // Barycenter: each f_j is affine in exponential coordinates, so the mean
  // of the natural measure is the fixed point of the averaged map.
  Point bary = anchor_;
  for (int it = 0; it < 200; ++it) {
    Point next(spec_.dim());
    for (int j = 0; j < size(); ++j) {
      const Point y = apply(j, bary);
      for (int i = 0; i < spec_.dim(); ++i) next[i] += y[i];
    }
    for (int i = 0; i < spec_.dim(); ++i) next[i] /= size();
    bary = next;
  }
  hull_center_ = bary;
  hull_ = max_distance_from(bary) * 1.02 + 1e-12;
  hull4_ = hull_ * hull_ * hull_ * hull_;

  box_ = attractor_box();

  center_ = bary;
  if (!contains(center_, opt_.membership_depth)) {
    // Fall back to the level-k image of the barycenter nearest to it that is inside T.
    double best = INFINITY;
    const double shrink = std::ldexp(1.0, -k_enum);
    const Point rel = detail::mul(spec_, inverse(spec_, anchor_), bary);
    for (const auto& p : pts) {
      const Point c = detail::mul(spec_, p, dilate_raw(shrink, rel));
      const double d = detail::dist4(spec_, bary, c);
      if (d < best && contains(c, opt_.membership_depth)) {
        best = d;
        center_ = c;
      }
    }
  }
  // Beam search returns a lower bound on the true supremum; a small relative
  // margin keeps sampled tile points inside B(p, R^out).
  r_out_ = max_distance_from(center_) * (1.0 + 1e-3);

  // Diameter: farthest pair on a coarse net, refined by beam search from both ends.
  {
    std::vector<Point> net{anchor_};
    for (int level = 0; level < std::min(k_enum, 3); ++level) {
      std::vector<Point> next;
      for (const auto& p : net)
        for (int j = 0; j < size(); ++j) next.push_back(apply(j, p));
      net = std::move(next);
      if (net.size() > 4096) break;
    }
    double best = 0.0;
    std::size_t ia = 0;
    std::size_t ib = 0;
    for (std::size_t i = 0; i < net.size(); ++i)
      for (std::size_t j = i + 1; j < net.size(); ++j) {
        const double d = detail::dist4(spec_, net[i], net[j]);
        if (d > best) {
          best = d;
          ia = i;
          ib = j;
        }
      }
    diam_ = std::max({detail::root4(best), max_distance_from(net[ia]), max_distance_from(net[ib]), r_out_});
  }

  r_in_ = detail::estimate_inner_radius(*this, center_, r_out_, opt_.radii_samples, derive_seed(opt_.seed, "r_in"));
}

// ---------------------------------------------------------------------------
// Construction helpers

/// Smallest q <= 64 with q * c integral for every structure constant.
inline int structure_denominator(const GroupSpec& g) {
  for (int q = 1; q <= 64; ++q) {
    bool ok = true;
    for (const auto& c : g.constants()) {
      const double v = c.value * q;
      if (std::abs(v - std::round(v)) > 1e-9) ok = false;
    }
    if (ok) return q;
  }
  throw Error("structure constants are not rational with small denominators");
}

/// Lattice digit set: horizontal {0, 1/2}^{m1} crossed with vertical
/// {0, 1/4, 1/2, 3/4}^{m2} scaled by `vertical_step` (default 1/(2q), the
/// vertical step of the lattice Z^{m1} x (1/2q) Z^{m2}, halved twice by
/// delta_{1/2}). Index = horizontal bits + 2^{m1} * vertical digits.
inline std::vector<Point> default_digits(const GroupSpec& g, double vertical_step = -1.0) {
  const int m1 = g.horizontal_dim();
  const int m2 = g.vertical_dim();
  if (vertical_step <= 0.0 && m2 > 0) vertical_step = 1.0 / (2.0 * structure_denominator(g));
  std::vector<Point> out;
  const int nh = 1 << m1;
  const int nv = 1 << (2 * m2);
  for (int v = 0; v < nv; ++v)
    for (int hb = 0; hb < nh; ++hb) {
      Point d(g.dim());
      for (int i = 0; i < m1; ++i) d[i] = (hb >> i) & 1 ? 0.5 : 0.0;
      for (int k = 0; k < m2; ++k) d[m1 + k] = 0.25 * ((v >> (2 * k)) & 3) * vertical_step;
      out.push_back(d);
    }
  return out;
}

inline TileSystem build_system(const GroupSpec& g, std::vector<Point> digits, const TileSystemOptions& opt = {}) {
  return TileSystem(g, std::move(digits), opt);
}

inline TileSystem build_default_system(const GroupSpec& g, const TileSystemOptions& opt = {}) {
  return TileSystem(g, default_digits(g), opt);
}

inline Point apply_address(const TileSystem& sys, const TileAddress& w, const Point& p) {
  return sys.apply_address(w, p);
}

inline Point tile_center(const TileSystem& sys, const TileAddress& w) { return sys.apply_address(w, sys.center()); }

inline double tile_outer_radius(const TileSystem& sys, const TileAddress& w) {
  return std::ldexp(sys.r_out(), -w.level());
}

inline double tile_inner_radius(const TileSystem& sys, const TileAddress& w) {
  return std::ldexp(sys.r_in(), -w.level());
}

inline double tile_diameter(const TileSystem& sys, int level) { return std::ldexp(sys.diameter(), -level); }

/// n points f_{w u}(p) with u uniform in W^depth.
inline std::vector<Point> sample_tile(const TileSystem& sys, const TileAddress& w, std::size_t n, int depth,
                                      std::uint64_t seed) {
  std::vector<Point> out;
  out.reserve(n);
  Rng rng(seed);
  const Point offset = sys.address_offset(w);
  const double scale = std::ldexp(1.0, -w.level());
  for (std::size_t i = 0; i < n; ++i) {
    Point p = sys.center();
    std::vector<int> u(depth);
    for (int k = 0; k < depth; ++k) u[k] = uniform_int(rng, sys.size());
    for (int k = depth - 1; k >= 0; --k) p = sys.apply(u[k], p);
    out.push_back(detail::mul(sys.spec(), offset, sys.dilate_raw(scale, p)));
  }
  return out;
}

struct Radii {
  double r_in;
  double r_out;
};

inline Radii estimate_radii(const TileSystem& sys, int n_samples, std::uint64_t seed) {
  auto [ri, ro] = sys.estimate_radii(n_samples, seed);
  return {ri, ro};
}

/// Level m with 2^{-m-1} <= r < 2^{-m}.
inline int ball_level(double r) {
  if (!(r > 0.0) || r > 1.0) throw Error("ball radius must lie in (0, 1]");
  int m = static_cast<int>(std::floor(-std::log2(r)));
  while (std::ldexp(1.0, -m - 1) > r) ++m;
  while (m > 0 && std::ldexp(1.0, -m) <= r) --m;
  return m;
}

namespace detail {

template <class Fn>
void visit_tiles_meeting(const TileSystem& sys, const Point& z, double rho, int remaining, std::uint64_t key,
                         Fn& fn) {
  const GroupSpec& g = sys.spec();
  const double d = root4(dist4(g, sys.hull_center(), z));
  if (d > sys.quasi_constant() * (rho + sys.hull_radius())) return;
  if (remaining == 0) {
    if (sys.meets_ball(z, rho)) fn(key);
    return;
  }
  for (int j = 0; j < sys.size(); ++j)
    visit_tiles_meeting(sys, sys.apply_inverse(j, z), 2.0 * rho, remaining - 1,
                        key * static_cast<std::uint64_t>(sys.size()) + j, fn);
}

}  // namespace detail

/// Number of tiles of D_m (m from the radius) whose sample clouds meet B(q, r).
inline int count_tiles_meeting_ball(const TileSystem& sys, const Point& q, double r) {
  sys.spec().require(q);
  const int m = ball_level(r);
  int n = 0;
  auto fn = [&](std::uint64_t) { ++n; };
  detail::visit_tiles_meeting(sys, q, r, m, 0, fn);
  return n;
}

struct OverlapConstantEstimate {
  int level;
  int k_max;
  Point worst_center;
  double worst_radius;
};

/// Empirical K at one level: random centers in T with radius at the top of
/// the level's band, then local hill climbing from the best candidates.
inline OverlapConstantEstimate estimate_overlap_constant(const TileSystem& sys, int level, int n_queries,
                                                         std::uint64_t seed) {
  const GroupSpec& g = sys.spec();
  Rng rng(seed);
  const double r = std::ldexp(1.0, -level) * (1.0 - 1e-9);
  struct Cand {
    Point q;
    int n;
  };
  std::vector<Cand> cands;
  cands.reserve(static_cast<std::size_t>(n_queries));
  const auto starts = sample_tile(sys, {}, static_cast<std::size_t>(n_queries), level + 8, derive_seed(seed, "starts"));
  for (const auto& s : starts) {
    const Point q = sample_ball(g, s, 0.5 * r, rng);
    cands.push_back({q, count_tiles_meeting_ball(sys, q, r)});
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.n > b.n; });
  const std::size_t top = std::min<std::size_t>(cands.size(), 8);
  for (std::size_t c = 0; c < top; ++c) {
    for (int step = 0; step < 40; ++step) {
      const Point q = sample_ball(g, cands[c].q, 0.15 * r, rng);
      const int n = count_tiles_meeting_ball(sys, q, r);
      if (n >= cands[c].n) cands[c] = {q, n};
    }
  }
  const auto best = std::max_element(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.n < b.n; });
  return {level, best->n, best->q, r};
}

// ---------------------------------------------------------------------------
// Certification

struct PairOverlap {
  int j;
  int k;
  double ratio;
};

struct CertificationReport {
  bool pass = false;
  double tol = 0.0;
  std::size_t n_samples = 0;
  std::vector<PairOverlap> overlaps;  // every pair j < k, zero-based
  double max_overlap = 0.0;
  double volume = 0.0;        // |T| estimate
  double children_volume = 0.0;  // sum_j |T_j| estimate
  double consistency = 0.0;   // children_volume / volume
  double max_child_deviation = 0.0;  // max_j | |T_j| / |T| - 2^{-Q} | * 2^Q
  bool positive_volume = false;
  int k_estimate = 0;
  double r_in = 0.0;
  double r_out = 0.0;
  std::vector<std::string> failures;
};

struct CertifyOptions {
  int resolution_depth = 12;
  double box_fraction = 0.25;  // box samples per natural sample
  int k_level = 2;
  int k_queries = 400;
  int workers = 1;
};

/// Monte Carlo certification: (a) pairwise child overlap in natural-measure
/// samples, (b) consistency of sum_j |T_j| with |T| from box samples, (c)
/// positive volume.
inline CertificationReport certify_tiling(const TileSystem& sys, std::size_t n_samples, double tol,
                                          std::uint64_t seed, const CertifyOptions& opt = {}) {
  const GroupSpec& g = sys.spec();
  const int m = sys.size();
  CertificationReport rep;
  rep.tol = tol;
  rep.n_samples = n_samples;
  rep.r_in = sys.r_in();
  rep.r_out = sys.r_out();

  // (a) sample x = f_u(anchor); count x in T_k for k != u_1.
  constexpr std::size_t kChunk = 8192;
  const std::size_t n_chunks = chunk_count(n_samples, kChunk);
  std::vector<std::vector<std::uint64_t>> hits(n_chunks, std::vector<std::uint64_t>(static_cast<std::size_t>(m * m), 0));
  const int sample_depth = opt.resolution_depth + 12;
  for_each_chunk(derive_seed(seed, "natural"), n_chunks, opt.workers, [&](std::size_t c, Rng& rng) {
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(n_samples, begin + kChunk);
    auto& h = hits[c];
    std::vector<int> u(static_cast<std::size_t>(sample_depth));
    std::vector<char> in_child;
    for (std::size_t s = begin; s < end; ++s) {
      for (auto& l : u) l = uniform_int(rng, m);
      Point x = sys.anchor();
      for (int k = sample_depth - 1; k >= 0; --k) x = sys.apply(u[k], x);
      const int first = u[0];
      sys.child_membership(x, opt.resolution_depth, in_child);
      for (int k = 0; k < m; ++k)
        if (k != first && in_child[static_cast<std::size_t>(k)]) ++h[static_cast<std::size_t>(first * m + k)];
    }
  });
  std::vector<std::uint64_t> total(static_cast<std::size_t>(m * m), 0);
  for (const auto& h : hits)
    for (std::size_t i = 0; i < h.size(); ++i) total[i] += h[i];
  for (int j = 0; j < m; ++j)
    for (int k = j + 1; k < m; ++k) {
      const double ratio = 0.5 * static_cast<double>(total[static_cast<std::size_t>(j * m + k)] +
                                                     total[static_cast<std::size_t>(k * m + j)]) /
                           static_cast<double>(std::max<std::size_t>(n_samples, 1));
      rep.overlaps.push_back({j, k, ratio});
      rep.max_overlap = std::max(rep.max_overlap, ratio);
    }

  // (b), (c) uniform samples in the bounding box.
  const auto n_box = static_cast<std::size_t>(static_cast<double>(n_samples) * opt.box_fraction);
  const std::size_t box_chunks = chunk_count(n_box, kChunk);
  std::vector<std::uint64_t> inside(box_chunks, 0);
  std::vector<std::vector<std::uint64_t>> child(box_chunks, std::vector<std::uint64_t>(static_cast<std::size_t>(m), 0));
  const auto& [lo, hi] = sys.bounding_box();
  for_each_chunk(derive_seed(seed, "box"), box_chunks, opt.workers, [&](std::size_t c, Rng& rng) {
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(n_box, begin + kChunk);
    std::vector<char> in_child;
    for (std::size_t s = begin; s < end; ++s) {
      Point x(g.dim());
      for (int i = 0; i < g.dim(); ++i) x[i] = uniform(rng, lo[i], hi[i]);
      if (!sys.in_hull(x)) continue;
      sys.child_membership(x, opt.resolution_depth, in_child);
      bool any = false;
      for (int k = 0; k < m; ++k) {
        if (in_child[static_cast<std::size_t>(k)]) {
          ++child[c][static_cast<std::size_t>(k)];
          any = true;
        }
      }
      if (any) ++inside[c];
    }
  });
  std::uint64_t in_total = 0;
  std::vector<std::uint64_t> child_total(static_cast<std::size_t>(m), 0);
  for (std::size_t c = 0; c < box_chunks; ++c) {
    in_total += inside[c];
    for (int k = 0; k < m; ++k) child_total[static_cast<std::size_t>(k)] += child[c][static_cast<std::size_t>(k)];
  }
  const double cell = sys.bounding_box_volume() / static_cast<double>(std::max<std::size_t>(n_box, 1));
  rep.volume = static_cast<double>(in_total) * cell;
  const std::uint64_t child_sum = std::accumulate(child_total.begin(), child_total.end(), std::uint64_t{0});
  rep.children_volume = static_cast<double>(child_sum) * cell;
  rep.consistency = in_total > 0 ? static_cast<double>(child_sum) / static_cast<double>(in_total) : 0.0;
  for (int k = 0; k < m; ++k) {
    if (in_total == 0) break;
    const double frac = static_cast<double>(child_total[static_cast<std::size_t>(k)]) / static_cast<double>(in_total);
    rep.max_child_deviation = std::max(rep.max_child_deviation, std::abs(frac * m - 1.0));
  }
  rep.positive_volume = in_total >= 10;

  rep.k_estimate = estimate_overlap_constant(sys, opt.k_level, opt.k_queries, derive_seed(seed, "K")).k_max;

  if (rep.max_overlap >= tol) rep.failures.push_back("pairwise child overlap exceeds tolerance");
  if (std::abs(rep.consistency - 1.0) >= tol) rep.failures.push_back("sum of child volumes inconsistent with |T|");
  if (!rep.positive_volume) rep.failures.push_back("tile volume not positive");
  rep.pass = rep.failures.empty();
  return rep;
}

/// Largest sibling overlap ratio |T_{wj} ∩ T_{wk}| / |T_w| among level-m
/// tiles, from natural samples x = f_{w j u}(anchor) mapped back through f_w.
inline double sibling_overlap_at_level(const TileSystem& sys, int level, std::size_t n_samples, std::uint64_t seed,
                                       int resolution_depth = 12) {
  if (level < 1) throw Error("sibling overlap needs level >= 1");
  const int m = sys.size();
  Rng rng(seed);
  std::vector<std::uint64_t> hits(static_cast<std::size_t>(m * m), 0);
  std::vector<char> in_child;
  const int tail = resolution_depth + 12;
  for (std::size_t s = 0; s < n_samples; ++s) {
    std::vector<int> letters(static_cast<std::size_t>(level - 1 + tail));
    for (auto& l : letters) l = uniform_int(rng, m);
    const TileAddress parent(std::vector<int>(letters.begin(), letters.begin() + (level - 1)));
    const Point x = sys.apply_address(TileAddress(letters), sys.anchor());
    const int first = letters[static_cast<std::size_t>(level - 1)];
    sys.child_membership(sys.apply_address_inverse(parent, x), resolution_depth, in_child);
    for (int k = 0; k < m; ++k)
      if (k != first && in_child[static_cast<std::size_t>(k)]) ++hits[static_cast<std::size_t>(first * m + k)];
  }
  double worst = 0.0;
  for (int j = 0; j < m; ++j)
    for (int k = j + 1; k < m; ++k)
      worst = std::max(worst, 0.5 * static_cast<double>(hits[static_cast<std::size_t>(j * m + k)] +
                                                        hits[static_cast<std::size_t>(k * m + j)]) /
                                  static_cast<double>(std::max<std::size_t>(n_samples, 1)));
  return worst;
}

/// Digit-search fallback: scan vertical scalings (deterministic order) of the
/// lattice digit set and keep the one with the smallest certified overlap.
struct DigitSearchResult {
  double vertical_step;
  std::vector<Point> digits;
  CertificationReport report;
};

inline DigitSearchResult search_digits(const GroupSpec& g, std::size_t n_samples, double tol, std::uint64_t seed,
                                       const std::vector<double>& multipliers = {1.0, 0.5, 2.0, 0.25, 4.0}) {
  if (g.vertical_dim() == 0) {
    TileSystem sys(g, default_digits(g));
    return {0.0, default_digits(g), certify_tiling(sys, n_samples, tol, seed)};
  }
  const double base = 1.0 / (2.0 * structure_denominator(g));
  std::optional<DigitSearchResult> best;
  for (double mult : multipliers) {
    const double v = base * mult;
    auto digits = default_digits(g, v);
    TileSystem sys(g, digits);
    auto rep = certify_tiling(sys, n_samples, tol, seed);
    if (!best || rep.max_overlap < best->report.max_overlap) best = DigitSearchResult{v, digits, rep};
    if (rep.pass) break;
  }
  return *best;
}

}  // namespace carnot
