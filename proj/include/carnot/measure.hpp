#pragma once

// Dyadic covers, net box-counting dimension, Cantor sub-systems of a tile
// system and Frostman-type growth checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "carnot/random.hpp"
#include "carnot/spatial.hpp"
#include "carnot/tiling.hpp"

namespace carnot {

// ---------------------------------------------------------------------------
// Covers

/// Level-m tiles hit by a point set, stored as base-M keys (sorted, unique).
struct DyadicCover {
  int level = 0;
  int base = 2;
  double tile_diameter = 0.0;  // diam T; cell diameter is 2^{-level} of it
  std::vector<std::uint64_t> keys;
  std::size_t unmatched_points = 0;

  std::size_t size() const { return keys.size(); }
  double cell_diameter() const { return std::ldexp(tile_diameter, -level); }
  double content(double s) const { return static_cast<double>(keys.size()) * std::pow(cell_diameter(), s); }

  std::vector<TileAddress> addresses() const {
    std::vector<TileAddress> out;
    out.reserve(keys.size());
    for (auto k : keys) out.push_back(TileAddress::from_key(k, level, base));
    return out;
  }
};

struct CoverOptions {
  int extra_depth = 2;        // membership resolution below the deepest level
  int min_depth = 10;         // but never coarser than this absolute depth
  double far_factor = 2.0;    // reject points beyond far_factor * hull radius
};

namespace detail {

// Key set at one level: a bitmap when small enough, else a sorted vector.
class KeySet {
 public:
  explicit KeySet(double universe) : use_bits_(universe <= 268435456.0) {
    if (use_bits_) bits_.assign(static_cast<std::size_t>(universe / 64.0) + 1, 0);
  }
  void insert(std::uint64_t k) {
    if (use_bits_) {
      bits_[k >> 6] |= std::uint64_t{1} << (k & 63);
    } else {
      list_.push_back(k);
      if (list_.size() > (std::size_t{1} << 22)) compact();
    }
  }
  std::vector<std::uint64_t> keys() {
    if (!use_bits_) {
      compact();
      return list_;
    }
    std::vector<std::uint64_t> out;
    for (std::size_t w = 0; w < bits_.size(); ++w) {
      std::uint64_t b = bits_[w];
      while (b) {
        const int t = __builtin_ctzll(b);
        out.push_back((static_cast<std::uint64_t>(w) << 6) + static_cast<std::uint64_t>(t));
        b &= b - 1;
      }
    }
    return out;
  }

 private:
  void compact() {
    std::sort(list_.begin(), list_.end());
    list_.erase(std::unique(list_.begin(), list_.end()), list_.end());
  }
  bool use_bits_;
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint64_t> list_;
};

}  // namespace detail

/// Covers at several levels in one pass: each point's tiles are found at the
/// deepest level and prefixes give the coarser levels.
template <class Range>
std::vector<DyadicCover> covers_at_levels(const TileSystem& sys, const Range& points, std::vector<int> levels,
                                          const CoverOptions& opt = {}) {
  if (levels.empty()) return {};
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (levels.front() < 0) throw Error("cover level must be non-negative");
  const int top = levels.back();
  const double m = sys.size();
  if (std::pow(m, top) >= 1.8e19) throw Error("cover level too deep for 64-bit addresses");

  detail::KeySet deepest(std::pow(m, top));
  std::size_t unmatched = 0;
  const GroupSpec& g = sys.spec();
  const double far = opt.far_factor * sys.hull_radius();
  const int extra = std::max(opt.extra_depth, opt.min_depth - top);
  for (const auto& p : points) {
    g.require(p);
    if (quasi_dist(g, sys.hull_center(), p) > far) throw Error("point far outside the base tile");
    bool any = false;
    sys.containing_tiles(p, top, extra, [&](std::uint64_t k) {
      deepest.insert(k);
      any = true;
    });
    if (!any) ++unmatched;
  }
  const auto top_keys = deepest.keys();

  std::vector<DyadicCover> out;
  for (int lv : levels) {
    DyadicCover c;
    c.level = lv;
    c.base = sys.size();
    c.tile_diameter = sys.diameter();
    c.unmatched_points = unmatched;
    std::uint64_t div = 1;
    for (int i = lv; i < top; ++i) div *= static_cast<std::uint64_t>(sys.size());
    c.keys.reserve(top_keys.size());
    for (auto k : top_keys) c.keys.push_back(k / div);
    c.keys.erase(std::unique(c.keys.begin(), c.keys.end()), c.keys.end());
    out.push_back(std::move(c));
  }
  return out;
}

template <class Range>
DyadicCover cover_at_level(const TileSystem& sys, const Range& points, int level, const CoverOptions& opt = {}) {
  return covers_at_levels(sys, points, {level}, opt).front();
}

struct DimensionFit {
  double s_hat = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms of log2 count residuals
  std::vector<int> levels;
  std::vector<std::size_t> counts;
};

/// Least-squares slope of log2 N(m) against m for the given covers.
inline DimensionFit fit_dimension(const std::vector<DyadicCover>& covers) {
  DimensionFit fit;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& c : covers) {
    fit.levels.push_back(c.level);
    fit.counts.push_back(c.size());
    if (c.size() > 0) {
      xs.push_back(c.level);
      ys.push_back(std::log2(static_cast<double>(c.size())));
    }
  }
  if (xs.size() < 3) throw Error("dimension fit needs at least 3 levels with non-empty covers");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0) throw Error("dimension fit needs distinct levels");
  fit.s_hat = sxy / sxx;
  fit.intercept = my - fit.s_hat * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.s_hat * xs[i]);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / n);
  return fit;
}

template <class Range>
DimensionFit dimension_estimate(const TileSystem& sys, const Range& points, const std::vector<int>& levels,
                                const CoverOptions& opt = {}) {
  if (levels.size() < 3) throw Error("dimension fit needs at least 3 levels");
  return fit_dimension(covers_at_levels(sys, points, levels, opt));
}

/// Greedy cover by balls of radius r centered at the points; returns the
/// number of balls.
template <class Range>
std::size_t greedy_ball_cover(const GroupSpec& g, const Range& points, double r) {
  PointGrid grid(g, r, max_horizontal_norm(g, points));
  std::vector<Point> centers;
  for (const auto& p : points) {
    bool covered = false;
    grid.for_each_near(p, [&](int id) {
      if (!covered && quasi_dist(g, centers[static_cast<std::size_t>(id)], p) < r) covered = true;
    });
    if (!covered) {
      grid.insert(p, static_cast<int>(centers.size()));
      centers.push_back(p);
    }
  }
  return centers.size();
}

// ---------------------------------------------------------------------------
// Points along simple curves (dimension test sets)

/// n points p . exp(tau e_dir) for tau evenly spaced in [-half, half]; the
/// curve is horizontal for first-layer directions and vertical otherwise.
inline std::vector<Point> segment_points(const GroupSpec& g, const Point& p, int dir, double half, std::size_t n) {
  if (dir < 0 || dir >= g.dim()) throw Error("segment direction out of range");
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double tau = n == 1 ? 0.0 : -half + 2.0 * half * static_cast<double>(i) / static_cast<double>(n - 1);
    Point e(g.dim());
    e[dir] = tau;
    out.push_back(detail::mul(g, p, e));
  }
  return out;
}

/// Largest half-length (up to `cap`) with the whole segment inside T, found by
/// halving from the cap.
inline double segment_half_length_inside(const TileSystem& sys, const Point& p, int dir, double cap) {
  double half = cap;
  for (int it = 0; it < 40; ++it) {
    bool ok = true;
    for (const auto& q : segment_points(sys.spec(), p, dir, half, 257))
      if (!sys.contains(q)) {
        ok = false;
        break;
      }
    if (ok) return half;
    half *= 0.8;
  }
  throw Error("no segment of positive length fits inside the tile");
}

/// Streams all level-m tile centers f_w(p) without storing them.
class TileCenterRange {
 public:
  TileCenterRange(const TileSystem& sys, int level) : sys_(&sys), level_(level) {
    if (std::pow(static_cast<double>(sys.size()), level) > 4e9) throw Error("too many tile centers");
  }

  class iterator {
   public:
    using value_type = Point;
    using difference_type = std::ptrdiff_t;
    iterator() = default;
    iterator(const TileSystem* sys, int level, bool end) : sys_(sys), level_(level), digits_(level, 0) {
      if (end) {
        done_ = true;
        return;
      }
      stack_.assign(static_cast<std::size_t>(level) + 1, sys->center());
      rebuild(level - 1);
    }
    const Point& operator*() const { return stack_.front(); }
    iterator& operator++() {
      int k = level_ - 1;
      while (k >= 0 && digits_[k] == sys_->size() - 1) digits_[k--] = 0;
      if (k < 0) {
        done_ = true;
        return *this;
      }
      ++digits_[k];
      rebuild(k);
      return *this;
    }
    bool operator==(const iterator& o) const { return done_ == o.done_; }

   private:
    // stack_[i] = f_{w_i} o ... o f_{w_{m-1}}(p); stack_[level] = p. Positions
    // >= k changed, so entries <= k are recomputed.
    void rebuild(int k) {
      for (int i = k; i >= 0; --i) stack_[i] = sys_->apply(digits_[i], stack_[i + 1]);
    }
    const TileSystem* sys_ = nullptr;
    int level_ = 0;
    std::vector<int> digits_;
    std::vector<Point> stack_;
    bool done_ = false;
  };

  iterator begin() const { return iterator(sys_, level_, false); }
  iterator end() const { return iterator(sys_, level_, true); }

 private:
  const TileSystem* sys_;
  int level_;
};

// ---------------------------------------------------------------------------
// Measures

/// Explicit weighted atoms.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  DiscreteMeasure(const GroupSpec& g, std::vector<Point> atoms, std::vector<double> weights)
      : spec_(std::make_shared<GroupSpec>(g)), atoms_(std::move(atoms)), weights_(std::move(weights)) {
    if (atoms_.size() != weights_.size()) throw Error("atom and weight counts differ");
    for (const auto& a : atoms_) g.require(a);
    for (double w : weights_)
      if (!(w >= 0.0)) throw Error("atom weights must be non-negative");
    for (double w : weights_) total_ += w;
  }

  static DiscreteMeasure uniform(const GroupSpec& g, std::vector<Point> atoms, double total = 1.0) {
    const double w = atoms.empty() ? 0.0 : total / static_cast<double>(atoms.size());
    std::vector<double> ws(atoms.size(), w);
    return DiscreteMeasure(g, std::move(atoms), std::move(ws));
  }

  const GroupSpec& spec() const { return *spec_; }
  const std::vector<Point>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return atoms_.size(); }
  double total_mass() const { return total_; }

  /// Per-level branching (metadata from a Cantor construction; may be empty).
  std::vector<int> branching;

  double mass_in_ball(const Point& x, double r) const {
    double m = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      if (quasi_dist(*spec_, x, atoms_[i]) < r) m += weights_[i];
    return m;
  }

  Point sample_center(Rng& rng) const {
    if (atoms_.empty()) throw Error("empty measure");
    return atoms_[static_cast<std::size_t>(uniform_int(rng, static_cast<int>(atoms_.size())))];
  }

  DiscreteMeasure operator+(const DiscreteMeasure& o) const {
    auto a = atoms_;
    auto w = weights_;
    a.insert(a.end(), o.atoms_.begin(), o.atoms_.end());
    w.insert(w.end(), o.weights_.begin(), o.weights_.end());
    return DiscreteMeasure(*spec_, std::move(a), std::move(w));
  }

 private:
  std::shared_ptr<const GroupSpec> spec_;
  std::vector<Point> atoms_;
  std::vector<double> weights_;
  double total_ = 0.0;
};

/// Per-level branching k_l = 2^{b_l}, b_l = floor(s l) - floor(s (l-1)), so
/// that prod_{l<=m} k_l = 2^{floor(s m)}.
class BranchSchedule {
 public:
  BranchSchedule(double s, const TileSystem& sys) : s_(s), m_(sys.size()), q_(sys.spec().homogeneous_dim()) {
    if (!(s > 0.0) || s > q_ + 1e-12) throw Error("target dimension must lie in (0, Q]");
  }

  double dimension() const { return s_; }

  /// Branching at level l >= 1.
  int k(int level) const {
    const int b = static_cast<int>(std::floor(s_ * level + 1e-9) - std::floor(s_ * (level - 1) + 1e-9));
    return 1 << std::min(b, q_);
  }

  /// Kept children at level l: k evenly spread indices (stride M/k + 1, odd,
  /// hence a bijection mod M), so every coordinate class is represented.
  std::vector<int> kept(int level) const {
    const int kk = k(level);
    std::vector<int> out;
    if (kk >= m_) {
      for (int j = 0; j < m_; ++j) out.push_back(j);
      return out;
    }
    const int stride = m_ / kk + 1;
    for (int i = 0; i < kk; ++i) out.push_back((i * stride) % m_);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  double s_;
  int m_;
  int q_;
};

/// Uniform measure on the level-`depth` tile centers f_u(p) of a Cantor
/// sub-system (u follows the kept children of the schedule). Atoms are
/// implicit; the address tree serves as a spatial hierarchy.
class CantorMeasure {
 public:
  CantorMeasure(const TileSystem& sys, double s, int depth)
      : sys_(std::make_shared<TileSystem>(sys)), schedule_(s, sys), depth_(depth) {
    if (depth < 1 || depth > 60) throw Error("Cantor depth must lie in [1, 60]");
    kept_.resize(static_cast<std::size_t>(depth) + 1);
    for (int l = 1; l <= depth; ++l) kept_[static_cast<std::size_t>(l)] = schedule_.kept(l);
    mass_.assign(static_cast<std::size_t>(depth) + 1, 1.0);
    for (int l = 1; l <= depth; ++l)
      mass_[static_cast<std::size_t>(l)] = mass_[static_cast<std::size_t>(l) - 1] / static_cast<double>(kept_[static_cast<std::size_t>(l)].size());

    // Barycenter of the sub-measure below a level-l node, in that node's
    // rescaled frame. Each f_j is affine in coordinates, so means commute.
    bary_.assign(static_cast<std::size_t>(depth) + 1, sys.center());
    for (int l = depth - 1; l >= 0; --l) {
      Point acc(sys.spec().dim());
      const auto& kids = kept_[static_cast<std::size_t>(l) + 1];
      for (int j : kids) {
        const Point y = sys.apply(j, bary_[static_cast<std::size_t>(l) + 1]);
        for (int i = 0; i < acc.dim(); ++i) acc[i] += y[i];
      }
      for (int i = 0; i < acc.dim(); ++i) acc[i] /= static_cast<double>(kids.size());
      bary_[static_cast<std::size_t>(l)] = acc;
    }
    radius_.assign(static_cast<std::size_t>(depth) + 1, 0.0);
    for (int l = 0; l < depth; ++l) radius_[static_cast<std::size_t>(l)] = subtree_radius(l);
  }

  const TileSystem& system() const { return *sys_; }
  const GroupSpec& spec() const { return sys_->spec(); }
  const BranchSchedule& schedule() const { return schedule_; }
  int depth() const { return depth_; }
  double dimension() const { return schedule_.dimension(); }
  double total_mass() const { return 1.0; }
  const std::vector<int>& kept(int level) const { return kept_[static_cast<std::size_t>(level)]; }
  double node_mass(int level) const { return mass_[static_cast<std::size_t>(level)]; }
  /// Radius (rescaled frame) of the support below a level-l node about its barycenter.
  double node_radius(int level) const { return radius_[static_cast<std::size_t>(level)]; }
  const Point& node_barycenter(int level) const { return bary_[static_cast<std::size_t>(level)]; }
  double atom_count() const { return 1.0 / mass_.back(); }
  std::vector<int> branching() const {
    std::vector<int> b;
    for (int l = 1; l <= depth_; ++l) b.push_back(static_cast<int>(kept_[static_cast<std::size_t>(l)].size()));
    return b;
  }

  /// A node v at level l acts as q -> offset . delta_{2^{-l}}(q).
  struct Node {
    Point offset;
    int level;
  };
  Node root() const { return {spec().identity(), 0}; }
  Node child(const Node& n, int j) const {
    return {detail::mul(spec(), n.offset, sys_->dilate_raw(std::ldexp(1.0, -n.level), sys_->maps()[static_cast<std::size_t>(j)].translation)),
            n.level + 1};
  }
  Point map(const Node& n, const Point& q) const {
    return detail::mul(spec(), n.offset, sys_->dilate_raw(std::ldexp(1.0, -n.level), q));
  }
  Point center(const Node& n) const { return map(n, bary_[static_cast<std::size_t>(n.level)]); }
  double radius(const Node& n) const { return std::ldexp(radius_[static_cast<std::size_t>(n.level)], -n.level); }
  Point atom(const Node& n) const { return map(n, sys_->center()); }

  /// Atom f_u(p) for a random admissible address u.
  Point sample_atom(Rng& rng) const {
    Node n = root();
    for (int l = 1; l <= depth_; ++l) {
      const auto& kids = kept(l);
      n = child(n, kids[static_cast<std::size_t>(uniform_int(rng, static_cast<int>(kids.size())))]);
    }
    return atom(n);
  }

  /// A point of the tile under a random atom, at relative depth `extra`
  /// (unrestricted digits): a point of supp within 2^{-depth} R^out that is
  /// not itself an atom.
  Point sample_near_support(Rng& rng, int extra = 8) const {
    Node n = root();
    for (int l = 1; l <= depth_; ++l) {
      const auto& kids = kept(l);
      n = child(n, kids[static_cast<std::size_t>(uniform_int(rng, static_cast<int>(kids.size())))]);
    }
    Point q = sys_->anchor();
    for (int l = 0; l < extra; ++l) q = sys_->apply(uniform_int(rng, sys_->size()), q);
    return map(n, q);
  }

  Point sample_center(Rng& rng) const { return sample_atom(rng); }

  /// mu(B(x, r)). Nodes are resolved down to radius r * resolution and then
  /// classified by their barycenter; leaves are exact.
  double mass_in_ball(const Point& x, double r, double resolution = 1.0 / 32.0) const {
    return ball_mass(root(), x, r, r * resolution);
  }

  /// All atoms (guarded against huge counts).
  DiscreteMeasure atoms(std::size_t limit = 8'000'000) const {
    if (atom_count() > static_cast<double>(limit)) throw Error("too many atoms to materialize");
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(atom_count()));
    for_each_atom([&](const Point& p, const std::vector<int>&) { pts.push_back(p); });
    auto m = DiscreteMeasure::uniform(spec(), std::move(pts));
    m.branching = branching();
    return m;
  }

  std::vector<Point> points(std::size_t limit = 8'000'000) const { return atoms(limit).atoms(); }

  /// fn(atom, letters) over all atoms in lexicographic address order.
  template <class Fn>
  void for_each_atom(Fn&& fn) const {
    std::vector<int> word;
    walk(root(), word, fn);
  }

 private:
  template <class Fn>
  void walk(const Node& n, std::vector<int>& word, Fn& fn) const {
    if (n.level == depth_) {
      fn(atom(n), word);
      return;
    }
    for (int j : kept(n.level + 1)) {
      word.push_back(j);
      walk(child(n, j), word, fn);
      word.pop_back();
    }
  }

  double ball_mass(const Node& n, const Point& x, double r, double stop) const {
    const double c = sys_->quasi_constant();
    if (n.level == depth_) return quasi_dist(spec(), x, atom(n)) < r ? mass_[static_cast<std::size_t>(n.level)] : 0.0;
    const double d = quasi_dist(spec(), x, center(n));
    const double R = radius(n);
    if (c * (d + R) < r) return mass_[static_cast<std::size_t>(n.level)];
    if (d > c * (r + R)) return 0.0;
    if (R <= stop) return d < r ? mass_[static_cast<std::size_t>(n.level)] : 0.0;
    double m = 0.0;
    for (int j : kept(n.level + 1)) m += ball_mass(child(n, j), x, r, stop);
    return m;
  }

  // Beam search over the kept sub-tree below a level-l node for the farthest
  // atom from its barycenter; 2% margin plus the truncation slack.
  double subtree_radius(int level) const {
    const Point& from = bary_[static_cast<std::size_t>(level)];
    const int span = std::min(depth_ - level, 24);
    struct Cand {
      Point offset;
      double d4;
    };
    std::vector<Cand> beam{{spec().identity(), 0.0}};
    double best = 0.0;
    double scale = 1.0;
    for (int l = 1; l <= span; ++l) {
      std::vector<Cand> next;
      for (const auto& c : beam)
        for (int j : kept(level + l)) {
          Point off = detail::mul(spec(), c.offset, sys_->dilate_raw(scale, sys_->maps()[static_cast<std::size_t>(j)].translation));
          const Point rep = detail::mul(spec(), off, sys_->dilate_raw(scale * 0.5, bary_[static_cast<std::size_t>(level + l)]));
          const double d4 = detail::dist4(spec(), from, rep);
          best = std::max(best, d4);
          next.push_back({off, d4});
        }
      const std::size_t keep = std::min<std::size_t>(next.size(), 256);
      std::partial_sort(next.begin(), next.begin() + static_cast<long>(keep), next.end(),
                        [](const Cand& a, const Cand& b) { return a.d4 > b.d4; });
      next.resize(keep);
      beam = std::move(next);
      scale *= 0.5;
    }
    const double slack = depth_ - level > span ? std::ldexp(sys_->hull_radius() * 2.0, -span) : 0.0;
    return detail::root4(best) * 1.02 + slack;
  }

  std::shared_ptr<const TileSystem> sys_;
  BranchSchedule schedule_;
  int depth_;
  std::vector<std::vector<int>> kept_;
  std::vector<double> mass_;
  std::vector<Point> bary_;
  std::vector<double> radius_;
};

inline CantorMeasure cantor_subsystem(const TileSystem& sys, double s, int depth) {
  if (depth < 4) throw Error("Cantor depth must be at least 4");
  return CantorMeasure(sys, s, depth);
}

// ---------------------------------------------------------------------------
// Frostman check

struct DecadeStat {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 0;
  double max = 0.0;
  double median = 0.0;
};

struct FrostmanReport {
  double s = 0.0;
  double c_hat = 0.0;
  Point worst_center;
  double worst_radius = 0.0;
  std::vector<DecadeStat> decades;
  double trend_slope = 0.0;  // d log10(decade max) / d log10 r
  std::string trend;         // "none", "grows_as_r_shrinks", "decays_as_r_shrinks"
};

namespace detail {

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<long>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

/// Decade boundaries 10^k covering [lo, hi].
inline std::vector<std::pair<double, double>> decades_between(double lo, double hi) {
  std::vector<std::pair<double, double>> out;
  const int k0 = static_cast<int>(std::floor(std::log10(lo) + 1e-12));
  const int k1 = static_cast<int>(std::ceil(std::log10(hi) - 1e-12));
  for (int k = k0; k < k1; ++k) out.emplace_back(std::max(lo, std::pow(10.0, k)), std::min(hi, std::pow(10.0, k + 1)));
  return out;
}

/// Least-squares slope of y against x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return 0.0;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace detail

/// C_hat = max over sampled balls (center in supp mu, radius log-uniform in
/// [r_min, r_max]) of mu(B(x, r)) / r^s, with per-decade summaries.
template <class Measure>
FrostmanReport frostman_check(const Measure& mu, double s, std::size_t n_balls, double r_min, double r_max,
                              std::uint64_t seed) {
  if (!(r_min > 0.0) || !(r_max > r_min)) throw Error("frostman radii range must satisfy 0 < r_min < r_max");
  FrostmanReport rep;
  rep.s = s;
  Rng rng(seed);
  const auto dec = detail::decades_between(r_min, r_max);
  std::vector<std::vector<double>> per(dec.size());
  for (std::size_t i = 0; i < n_balls; ++i) {
    const Point x = mu.sample_center(rng);
    const double r = log_uniform(rng, r_min, r_max);
    const double ratio = mu.mass_in_ball(x, r) / std::pow(r, s);
    if (ratio > rep.c_hat) {
      rep.c_hat = ratio;
      rep.worst_center = x;
      rep.worst_radius = r;
    }
    for (std::size_t d = 0; d < dec.size(); ++d)
      if (r >= dec[d].first && (r < dec[d].second || d + 1 == dec.size())) {
        per[d].push_back(ratio);
        break;
      }
  }
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t d = 0; d < dec.size(); ++d) {
    DecadeStat st;
    st.lo = dec[d].first;
    st.hi = dec[d].second;
    st.n = per[d].size();
    if (!per[d].empty()) {
      st.max = *std::max_element(per[d].begin(), per[d].end());
      st.median = detail::median_of(per[d]);
      if (st.max > 0.0) {
        lx.push_back(std::log10(std::sqrt(st.lo * st.hi)));
        ly.push_back(std::log10(st.max));
      }
    }
    rep.decades.push_back(st);
  }
  rep.trend_slope = detail::ls_slope(lx, ly);
  rep.trend = rep.trend_slope < -0.2 ? "grows_as_r_shrinks" : rep.trend_slope > 0.2 ? "decays_as_r_shrinks" : "none";
  return rep;
}

}  // namespace carnot
