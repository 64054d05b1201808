#pragma once

// Kernels of type lambda, potentials f(x) = sum_i w_i k(y_i^{-1} x), and
// BMO / Holder / L^p estimators for them.
//
// The convolution is taken in the order that matches the left-invariant
// quasi-distance d(x, y) = gauge(x^{-1} y): k(y^{-1} x) is comparable to
// d(y, x)^{lambda - Q} and commutes with left-invariant operators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "carnot/measure.hpp"
#include "carnot/random.hpp"

namespace carnot {

class KernelSpec {
 public:
  KernelSpec(const GroupSpec& g, int lambda, double c = 1.0) : lambda_(lambda), c_(c), q_(g.homogeneous_dim()) {
    if (lambda < 1 || lambda >= q_) throw Error("kernel degree must satisfy 1 <= lambda < Q");
  }
  int lambda() const { return lambda_; }
  double c() const { return c_; }
  int homogeneous_dim() const { return q_; }
  double exponent() const { return static_cast<double>(lambda_ - q_); }
  /// Kernel as a function of the gauge value.
  double of_gauge(double r) const { return c_ * std::pow(r, exponent()); }

 private:
  int lambda_;
  double c_;
  int q_;
};

inline double kernel_eval(const GroupSpec& g, const KernelSpec& ks, const Point& p) {
  const double r = gauge(g, p);
  if (r == 0.0) throw Error("kernel evaluated at the identity");
  return ks.of_gauge(r);
}

// ---------------------------------------------------------------------------
// Kernel checks

struct SmoothnessBand {
  double ratio = 0.0;  // |Y| / |X|
  std::size_t n = 0;
  double max = 0.0;
  double median = 0.0;
};

struct KernelReport {
  double bound_constant = 0.0;  // max |k(p)| |p|^{Q - lambda}
  double homogeneity_defect = 0.0;  // max relative |k(delta_t p) - t^{lambda-Q} k(p)|
  double c_smooth = 0.0;        // max over |Y| <= |X|/2
  std::vector<SmoothnessBand> bands;
  double band_spread = 0.0;     // max/min of band maxima
  double dilation_defect = 0.0; // max relative change of the ratio under delta_t
};

/// Ratios |k(Y X) - k(X)| / (|Y| |X|^{lambda-Q-1}) over random pairs, in
/// bands of fixed |Y|/|X| and overall for |Y|/|X| in (0, 1/2].
inline KernelReport kernel_smoothness_check(const GroupSpec& g, const KernelSpec& ks, std::size_t n_pairs,
                                            std::uint64_t seed, const std::vector<double>& band_ratios = {0.5, 0.05, 0.005}) {
  KernelReport rep;
  Rng rng(seed);
  auto ratio = [&](const Point& x, const Point& y) {
    const double nx = gauge(g, x);
    const double ny = gauge(g, y);
    return std::abs(kernel_eval(g, ks, detail::mul(g, y, x)) - kernel_eval(g, ks, x)) / (ny * std::pow(nx, ks.exponent() - 1.0));
  };
  for (std::size_t i = 0; i < n_pairs; ++i) {
    const Point p = dilate(g, log_uniform(rng, 1e-3, 1e3), sample_unit_sphere(g, rng));
    // powers of two keep the dilation itself exact in floating point
    const double t = std::ldexp(1.0, uniform_int(rng, 15) - 7);
    const double r = gauge(g, p);
    rep.bound_constant = std::max(rep.bound_constant, std::abs(kernel_eval(g, ks, p)) * std::pow(r, -ks.exponent()));
    const double k1 = kernel_eval(g, ks, dilate(g, t, p));
    const double k0 = std::pow(t, ks.exponent()) * kernel_eval(g, ks, p);
    rep.homogeneity_defect = std::max(rep.homogeneity_defect, std::abs(k1 - k0) / std::abs(k0));

    const double rho = uniform(rng, 1e-4, 0.5);
    const Point y = dilate(g, rho * r, sample_unit_sphere(g, rng));
    const double v = ratio(p, y);
    rep.c_smooth = std::max(rep.c_smooth, v);
    const double v2 = ratio(dilate(g, t, p), dilate(g, t, y));
    if (v > 0.0) rep.dilation_defect = std::max(rep.dilation_defect, std::abs(v2 - v) / v);
  }
  for (double b : band_ratios) {
    SmoothnessBand band;
    band.ratio = b;
    std::vector<double> vals;
    for (std::size_t i = 0; i < n_pairs; ++i) {
      const Point x = dilate(g, log_uniform(rng, 1e-2, 1e2), sample_unit_sphere(g, rng));
      const Point y = dilate(g, b * gauge(g, x), sample_unit_sphere(g, rng));
      vals.push_back(ratio(x, y));
    }
    band.n = vals.size();
    band.max = vals.empty() ? 0.0 : *std::max_element(vals.begin(), vals.end());
    band.median = detail::median_of(vals);
    rep.bands.push_back(band);
  }
  if (!rep.bands.empty()) {
    double lo = INFINITY;
    double hi = 0.0;
    for (const auto& b : rep.bands) {
      lo = std::min(lo, b.max);
      hi = std::max(hi, b.max);
    }
    rep.band_spread = lo > 0.0 ? hi / lo : INFINITY;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Potentials

/// Thrown when an evaluation point lies within the exclusion radius of an atom.
class SingularEvaluation : public Error {
 public:
  using Error::Error;
};

class PotentialField {
 public:
  using Source = std::variant<DiscreteMeasure, CantorMeasure>;

  PotentialField(KernelSpec ks, Source mu, double theta = 0.25)
      : ks_(ks), mu_(std::move(mu)), theta_(theta) {
    if (!(theta > 0.0) || theta >= 1.0) throw Error("opening parameter must lie in (0, 1)");
  }

  const KernelSpec& kernel() const { return ks_; }
  const Source& measure() const { return mu_; }
  const GroupSpec& spec() const {
    return std::visit([](const auto& m) -> const GroupSpec& { return m.spec(); }, mu_);
  }
  double total_mass() const {
    return std::visit([](const auto& m) { return m.total_mass(); }, mu_);
  }
  double exclusion() const { return exclusion_; }
  void set_exclusion(double e) { exclusion_ = e; }

  double operator()(const Point& x) const { return eval(x); }

  double eval(const Point& x) const {
    spec().require(x);
    if (const auto* d = std::get_if<DiscreteMeasure>(&mu_)) {
      double f = 0.0;
      for (std::size_t i = 0; i < d->size(); ++i) f += d->weights()[i] * at(d->atoms()[i], x);
      return f;
    }
    const auto& c = std::get<CantorMeasure>(mu_);
    return tree_eval(c, c.root(), x);
  }

  /// f(x) - f(z), sharing far-field approximations between the two points.
  double difference(const Point& x, const Point& z) const {
    if (const auto* d = std::get_if<DiscreteMeasure>(&mu_)) {
      double f = 0.0;
      for (std::size_t i = 0; i < d->size(); ++i) f += d->weights()[i] * (at(d->atoms()[i], x) - at(d->atoms()[i], z));
      return f;
    }
    const auto& c = std::get<CantorMeasure>(mu_);
    return tree_diff(c, c.root(), x, z);
  }

  Point sample_support(Rng& rng) const {
    if (const auto* d = std::get_if<DiscreteMeasure>(&mu_)) return d->sample_center(rng);
    return std::get<CantorMeasure>(mu_).sample_near_support(rng);
  }

  /// True if some atom lies within distance eps of x.
  bool atom_within(const Point& x, double eps) const {
    if (const auto* d = std::get_if<DiscreteMeasure>(&mu_)) {
      for (const auto& a : d->atoms())
        if (quasi_dist(spec(), a, x) < eps) return true;
      return false;
    }
    const auto& c = std::get<CantorMeasure>(mu_);
    return near(c, c.root(), x, eps);
  }

 private:
  // Kernel contribution of a unit atom at a, evaluated at x.
  double at(const Point& a, const Point& x) const {
    const double r = gauge(spec(), detail::mul(spec(), inverse(spec(), a), x));
    if (r < exclusion_) throw SingularEvaluation("potential evaluated at an atom");
    return ks_.of_gauge(r);
  }

  double tree_eval(const CantorMeasure& c, const CantorMeasure::Node& n, const Point& x) const {
    if (n.level == c.depth()) return c.node_mass(n.level) * at(c.atom(n), x);
    const Point ctr = c.center(n);
    const double d = quasi_dist(spec(), ctr, x);
    if (c.radius(n) <= theta_ * d) return c.node_mass(n.level) * ks_.of_gauge(d);
    double f = 0.0;
    for (int j : c.kept(n.level + 1)) f += tree_eval(c, c.child(n, j), x);
    return f;
  }

  double tree_diff(const CantorMeasure& c, const CantorMeasure::Node& n, const Point& x, const Point& z) const {
    if (n.level == c.depth()) {
      const Point a = c.atom(n);
      return c.node_mass(n.level) * (at(a, x) - at(a, z));
    }
    const Point ctr = c.center(n);
    const double dx = quasi_dist(spec(), ctr, x);
    const double dz = quasi_dist(spec(), ctr, z);
    if (c.radius(n) <= theta_ * std::min(dx, dz)) return c.node_mass(n.level) * (ks_.of_gauge(dx) - ks_.of_gauge(dz));
    double f = 0.0;
    for (int j : c.kept(n.level + 1)) f += tree_diff(c, c.child(n, j), x, z);
    return f;
  }

  bool near(const CantorMeasure& c, const CantorMeasure::Node& n, const Point& x, double eps) const {
    if (n.level == c.depth()) return quasi_dist(spec(), c.atom(n), x) < eps;
    const double q = c.system().quasi_constant();
    if (quasi_dist(spec(), c.center(n), x) > q * (c.radius(n) + eps)) return false;
    for (int j : c.kept(n.level + 1))
      if (near(c, c.child(n, j), x, eps)) return true;
    return false;
  }

  KernelSpec ks_;
  Source mu_;
  double theta_;
  double exclusion_ = 1e-9;
};

inline double potential_eval(const PotentialField& pf, const Point& x) { return pf.eval(x); }

// ---------------------------------------------------------------------------
// Annular bookkeeping

struct Annulus {
  int j = 0;              // 2^{-j} <= d < 2^{-j+1}
  double mass = 0.0;
  double kernel_sum = 0.0;
  double bound_term = 0.0;  // mass * (2^{-j})^{lambda - Q}
};

struct AnnularDecomposition {
  std::vector<Annulus> annuli;
  double annular_total = 0.0;
  double direct_total = 0.0;
};

/// Splits sum_i w_i k(y_i^{-1} x) over dyadic annuli about x.
inline AnnularDecomposition annular_decomposition(const GroupSpec& g, const KernelSpec& ks, const DiscreteMeasure& mu,
                                                  const Point& x) {
  AnnularDecomposition out;
  std::vector<std::pair<int, double>> terms;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double d = quasi_dist(g, mu.atoms()[i], x);
    if (d == 0.0) throw SingularEvaluation("annular decomposition centered at an atom");
    const double v = mu.weights()[i] * ks.of_gauge(d);
    out.direct_total += v;
    const int j = static_cast<int>(std::floor(-std::log2(d))) + 1;
    terms.emplace_back(j, v);
    auto it = std::find_if(out.annuli.begin(), out.annuli.end(), [&](const Annulus& a) { return a.j == j; });
    if (it == out.annuli.end()) {
      out.annuli.push_back({j, 0.0, 0.0, 0.0});
      it = out.annuli.end() - 1;
    }
    it->mass += mu.weights()[i];
  }
  for (const auto& [j, v] : terms) {
    auto it = std::find_if(out.annuli.begin(), out.annuli.end(), [&](const Annulus& a) { return a.j == j; });
    it->kernel_sum += v;
  }
  std::sort(out.annuli.begin(), out.annuli.end(), [](const Annulus& a, const Annulus& b) { return a.j < b.j; });
  for (auto& a : out.annuli) {
    a.bound_term = a.mass * ks.of_gauge(std::ldexp(1.0, -a.j));
    out.annular_total += a.kernel_sum;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Seminorm estimators

struct DecadeSummary {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 0;
  double median = 0.0;
  double max = 0.0;
  double median_alt = 0.0;  // BMO: median-constant estimator
  double max_alt = 0.0;
};

struct SeminormReport {
  std::string kind;
  std::vector<DecadeSummary> decades;
  double max = 0.0;
  double spread = 0.0;           // max / min of decade medians
  bool monotone_growth = false;  // medians increase as the scale shrinks
  std::size_t excluded = 0;
  std::size_t evaluated = 0;
};

inline std::vector<std::pair<double, double>> default_decades() { return {{1e-3, 1e-2}, {1e-2, 1e-1}, {1e-1, 1.0}}; }

namespace detail {

inline void summarize(SeminormReport& rep) {
  double lo = INFINITY;
  double hi = 0.0;
  for (const auto& d : rep.decades) {
    rep.max = std::max(rep.max, d.max);
    if (d.n == 0) continue;
    lo = std::min(lo, d.median);
    hi = std::max(hi, d.median);
  }
  rep.spread = lo > 0.0 ? hi / lo : INFINITY;
  // decades are listed from small to large scales
  bool mono = rep.decades.size() >= 2;
  for (std::size_t i = 1; i < rep.decades.size(); ++i)
    if (!(rep.decades[i - 1].median > rep.decades[i].median)) mono = false;
  rep.monotone_growth = mono;
}

}  // namespace detail

struct BmoOptions {
  std::size_t balls_per_decade = 24;
  std::size_t n_quad = 256;
  double exclusion = 1e-6;
  std::vector<std::pair<double, double>> decades = default_decades();
};

/// Mean oscillation over balls centered near supp mu: (1/|B|) int_B |f - f_B|
/// and (1/|B|) int_B |f - median_B f|, by uniform quadrature in each ball.
inline SeminormReport bmo_seminorm_estimate(const PotentialField& pf, std::uint64_t seed, const BmoOptions& opt = {}) {
  const GroupSpec& g = pf.spec();
  SeminormReport rep;
  rep.kind = "bmo";
  Rng rng(derive_seed(seed, "bmo"));
  for (const auto& [lo, hi] : opt.decades) {
    DecadeSummary ds;
    ds.lo = lo;
    ds.hi = hi;
    std::vector<double> mean_dev;
    std::vector<double> med_dev;
    for (std::size_t b = 0; b < opt.balls_per_decade; ++b) {
      const Point x0 = pf.sample_support(rng);
      const double r = log_uniform(rng, lo, hi);
      std::vector<double> vals;
      vals.reserve(opt.n_quad);
      for (std::size_t q = 0; q < opt.n_quad; ++q) {
        const Point x = sample_ball(g, x0, r, rng);
        try {
          if (pf.atom_within(x, opt.exclusion)) {
            ++rep.excluded;
            continue;
          }
          vals.push_back(pf.eval(x));
        } catch (const SingularEvaluation&) {
          ++rep.excluded;
        }
      }
      rep.evaluated += vals.size();
      if (vals.size() < 2) continue;
      double mean = 0.0;
      for (double v : vals) mean += v / static_cast<double>(vals.size());
      const double med = detail::median_of(vals);
      double d1 = 0.0;
      double d2 = 0.0;
      for (double v : vals) {
        d1 += std::abs(v - mean) / static_cast<double>(vals.size());
        d2 += std::abs(v - med) / static_cast<double>(vals.size());
      }
      mean_dev.push_back(d1);
      med_dev.push_back(d2);
    }
    ds.n = mean_dev.size();
    if (!mean_dev.empty()) {
      ds.median = detail::median_of(mean_dev);
      ds.max = *std::max_element(mean_dev.begin(), mean_dev.end());
      ds.median_alt = detail::median_of(med_dev);
      ds.max_alt = *std::max_element(med_dev.begin(), med_dev.end());
    }
    rep.decades.push_back(ds);
  }
  detail::summarize(rep);
  return rep;
}

struct HolderOptions {
  std::size_t pairs_per_decade = 200;
  std::vector<std::pair<double, double>> decades = default_decades();
};

/// |f(x) - f(z)| / d(x, z)^delta with x near supp mu and z at a log-uniform
/// distance within each decade.
inline SeminormReport holder_seminorm_estimate(const PotentialField& pf, double delta, std::uint64_t seed,
                                               const HolderOptions& opt = {}) {
  if (!(delta > 0.0) || !(delta < 1.0)) throw Error("Holder exponent must lie in (0, 1)");
  const GroupSpec& g = pf.spec();
  SeminormReport rep;
  rep.kind = "holder";
  Rng rng(derive_seed(seed, "holder"));
  for (const auto& [lo, hi] : opt.decades) {
    DecadeSummary ds;
    ds.lo = lo;
    ds.hi = hi;
    std::vector<double> vals;
    for (std::size_t i = 0; i < opt.pairs_per_decade; ++i) {
      const Point x = pf.sample_support(rng);
      const double t = log_uniform(rng, lo, hi);
      const Point z = detail::mul(g, x, dilate(g, t, sample_unit_sphere(g, rng)));
      try {
        vals.push_back(std::abs(pf.difference(x, z)) / std::pow(quasi_dist(g, x, z), delta));
      } catch (const SingularEvaluation&) {
        ++rep.excluded;
      }
    }
    rep.evaluated += vals.size();
    ds.n = vals.size();
    if (!vals.empty()) {
      ds.median = detail::median_of(vals);
      ds.max = *std::max_element(vals.begin(), vals.end());
    }
    rep.decades.push_back(ds);
  }
  detail::summarize(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// L^p norms

struct Box {
  Point lo;
  Point hi;
  double volume() const {
    double v = 1.0;
    for (int i = 0; i < lo.dim(); ++i) v *= hi[i] - lo[i];
    return v;
  }
  bool contains(const Point& x) const {
    for (int i = 0; i < lo.dim(); ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }
};

/// Plain Monte Carlo (int_K |f|^p)^{1/p} for a bounded integrand.
template <class F>
double lp_norm_box(const F& f, const Box& k, double p, std::size_t n, std::uint64_t seed) {
  if (!(p >= 1.0)) throw Error("p must be at least 1");
  Rng rng(seed);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Point x(k.lo.dim());
    for (int d = 0; d < x.dim(); ++d) x[d] = uniform(rng, k.lo[d], k.hi[d]);
    acc += std::pow(std::abs(f(x)), p);
  }
  return std::pow(acc / static_cast<double>(n) * k.volume(), 1.0 / p);
}

struct LpShell {
  int layer = 0;
  double radius = 0.0;
  double contribution = 0.0;
  std::size_t n = 0;
};

struct LpReport {
  double p = 0.0;
  double integral = 0.0;  // int_K |f|^p including the extrapolated tail
  double norm = 0.0;
  double outer = 0.0;     // part of K outside the first layer
  std::vector<LpShell> shells;
  double tail = 0.0;
  double tail_slope = 0.0;  // log2 ratio of successive shell contributions
  bool divergent = false;
};

struct LpOptions {
  int layers = 16;
  int fit_layers = 5;
};

namespace detail {

// Layer j is the union of balls of radius r_j = 2^{-j} r_0 about the cells
// of level j: atoms for a discrete measure, level-j nodes for a Cantor
// measure. Returns the number of cells whose ball contains x.
inline int layer_multiplicity(const PotentialField& pf, int j, double r0, const Point& x) {
  const GroupSpec& g = pf.spec();
  const double r = std::ldexp(r0, -j);
  if (const auto* d = std::get_if<DiscreteMeasure>(&pf.measure())) {
    int n = 0;
    for (const auto& a : d->atoms())
      if (quasi_dist(g, a, x) < r) ++n;
    return n;
  }
  const auto& c = std::get<CantorMeasure>(pf.measure());
  const double q = c.system().quasi_constant();
  int n = 0;
  auto rec = [&](auto&& self, const CantorMeasure::Node& node) -> void {
    const double dist = quasi_dist(g, c.center(node), x);
    if (node.level == j) {
      if (dist < r) ++n;
      return;
    }
    if (dist > q * (c.radius(node) + r0 * 2.0 * std::ldexp(1.0, -node.level))) return;
    for (int k : c.kept(node.level + 1)) self(self, c.child(node, k));
  };
  rec(rec, c.root());
  return n;
}

}  // namespace detail

/// (int_K |f|^p)^{1/p} with layered sampling toward supp mu: the part of K
/// outside the first layer is sampled uniformly; shell j = L_j \ L_{j+1} is
/// sampled uniformly in L_j (random cell, uniform in its ball, weight
/// 1 / multiplicity). Beyond the last layer the shell series is extrapolated
/// geometrically; a non-decaying series raises the divergence flag.
inline LpReport lp_norm_estimate(const PotentialField& pf, double p, const Box& k, std::size_t n_quad,
                                 std::uint64_t seed, const LpOptions& opt = {}) {
  if (!(p >= 1.0)) throw Error("p must be at least 1");
  const GroupSpec& g = pf.spec();
  LpReport rep;
  rep.p = p;
  Rng rng(derive_seed(seed, "lp"));

  const auto* disc = std::get_if<DiscreteMeasure>(&pf.measure());
  const auto* cant = std::get_if<CantorMeasure>(&pf.measure());
  if (disc && disc->size() == 0) throw Error("L^p estimate needs a non-empty measure");
  double r0 = 0.0;
  double cells0 = 0.0;
  if (disc) {
    r0 = 0.25;
    cells0 = static_cast<double>(disc->size());
  } else {
    double rmax = 0.0;
    for (int l = 0; l < cant->depth(); ++l) rmax = std::max(rmax, cant->node_radius(l));
    r0 = 3.0 * rmax;
    cells0 = 1.0;
  }
  const int layers = std::min(opt.layers, cant ? cant->depth() : opt.layers);
  const std::size_t per = std::max<std::size_t>(64, n_quad / static_cast<std::size_t>(layers + 1));

  auto value = [&](const Point& x) -> double {
    try {
      return std::pow(std::abs(pf.eval(x)), p);
    } catch (const SingularEvaluation&) {
      return 0.0;
    }
  };

  // K outside the first layer.
  {
    double acc = 0.0;
    for (std::size_t i = 0; i < per; ++i) {
      Point x(g.dim());
      for (int d = 0; d < x.dim(); ++d) x[d] = uniform(rng, k.lo[d], k.hi[d]);
      if (detail::layer_multiplicity(pf, 0, r0, x) > 0) continue;
      acc += value(x);
    }
    rep.outer = acc / static_cast<double>(per) * k.volume();
  }

  auto sample_cell = [&](int j) -> Point {
    if (disc) return disc->atoms()[static_cast<std::size_t>(uniform_int(rng, static_cast<int>(disc->size())))];
    auto n = cant->root();
    for (int l = 1; l <= j; ++l) {
      const auto& kids = cant->kept(l);
      n = cant->child(n, kids[static_cast<std::size_t>(uniform_int(rng, static_cast<int>(kids.size())))]);
    }
    return cant->center(n);
  };

  const double vol1 = unit_ball_volume(g);
  for (int j = 0; j < layers; ++j) {
    const double r = std::ldexp(r0, -j);
    const double cells = disc ? cells0 : 1.0 / cant->node_mass(j);
    const double weight = cells * vol1 * std::pow(r, g.homogeneous_dim());
    double acc = 0.0;
    for (std::size_t i = 0; i < per; ++i) {
      const Point x = sample_ball(g, sample_cell(j), r, rng);
      if (!k.contains(x)) continue;
      if (detail::layer_multiplicity(pf, j + 1, r0, x) > 0) continue;
      const int mult = std::max(1, detail::layer_multiplicity(pf, j, r0, x));
      acc += value(x) / mult;
    }
    rep.shells.push_back({j, r, acc / static_cast<double>(per) * weight, per});
  }

  double total = rep.outer;
  for (const auto& s : rep.shells) total += s.contribution;

  // Geometric tail from the last fit_layers shells.
  std::vector<double> xs;
  std::vector<double> ys;
  const int start = std::max(0, layers - opt.fit_layers);
  for (int j = start; j < layers; ++j) {
    const double c = rep.shells[static_cast<std::size_t>(j)].contribution;
    if (c > 0.0) {
      xs.push_back(j);
      ys.push_back(std::log2(c));
    }
  }
  rep.tail_slope = detail::ls_slope(xs, ys);
  if (xs.size() >= 2 && rep.tail_slope < -0.05) {
    const double q = std::exp2(rep.tail_slope);
    rep.tail = std::exp2(ys.back()) * q / (1.0 - q);
  } else if (xs.size() >= 2) {
    rep.divergent = true;
    rep.tail = INFINITY;
  }
  rep.integral = total + rep.tail;
  rep.norm = std::pow(rep.integral, 1.0 / p);
  return rep;
}

}  // namespace carnot
