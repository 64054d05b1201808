#pragma once

// Group invariant suite: associativity, identity and inverse laws, dilation
// automorphism, gauge homogeneity, left invariance of the quasi-distance,
// the quasi-triangle constant and the Haar scaling exponent.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "carnot/group.hpp"
#include "carnot/random.hpp"

namespace carnot {

struct GroupCheckOptions {
  std::size_t n_triples = 10000;
  double coord_range = 10.0;
  std::size_t haar_samples = 1000000;
  std::vector<double> haar_scales = {0.5, 1.0, 2.0, 3.0};
  std::size_t quasi_samples = 100000;
  double assoc_tol = 1e-9;
  double exact_tol = 1e-12;
  double invariance_tol = 1e-9;
  double haar_tol = 0.02;
};

struct GroupCheckReport {
  double associativity = 0.0;
  double identity = 0.0;
  double inverse = 0.0;
  double automorphism = 0.0;   // relative
  double homogeneity = 0.0;    // relative
  double gauge_symmetry = 0.0; // relative |gauge(p^{-1}) - gauge(p)|
  double left_invariance = 0.0;  // relative
  double quasi_constant = 0.0;
  double haar_exponent = 0.0;
  int homogeneous_dim = 0;
  std::vector<std::pair<double, double>> haar_ratios;  // (t, vol(p . delta_t U) / vol(U))
  bool pass = false;
  std::vector<std::string> failures;
};

namespace detail {

inline Point uniform_point(const GroupSpec& g, Rng& rng, double a) {
  Point p(g.dim());
  for (int i = 0; i < g.dim(); ++i) p[i] = uniform(rng, -a, a);
  return p;
}

inline double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

// Monte Carlo volume of p . delta_t([0,1]^D). The map is affine, so the
// bounding box comes from the images of the corners.
inline double translated_box_volume(const GroupSpec& g, const Point& p, double t, std::size_t n, Rng& rng) {
  const int d = g.dim();
  Point lo(d);
  Point hi(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = INFINITY;
    hi[i] = -INFINITY;
  }
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    Point c(d);
    for (int i = 0; i < d; ++i) c[i] = (mask >> i) & 1u ? 1.0 : 0.0;
    const Point y = mul(g, p, dilate(g, t, c));
    for (int i = 0; i < d; ++i) {
      lo[i] = std::min(lo[i], y[i]);
      hi[i] = std::max(hi[i], y[i]);
    }
  }
  double box = 1.0;
  for (int i = 0; i < d; ++i) box *= hi[i] - lo[i];
  const Point pinv = inverse(g, p);
  std::size_t hit = 0;
  for (std::size_t s = 0; s < n; ++s) {
    Point y(d);
    for (int i = 0; i < d; ++i) y[i] = uniform(rng, lo[i], hi[i]);
    const Point u = dilate(g, 1.0 / t, mul(g, pinv, y));
    bool in = true;
    for (int i = 0; i < d && in; ++i) in = u[i] >= 0.0 && u[i] <= 1.0;
    hit += in ? 1 : 0;
  }
  return box * static_cast<double>(hit) / static_cast<double>(n);
}

}  // namespace detail

inline GroupCheckReport group_invariant_suite(const GroupSpec& g, std::uint64_t seed, const GroupCheckOptions& opt = {}) {
  GroupCheckReport rep;
  rep.homogeneous_dim = g.homogeneous_dim();
  Rng rng(derive_seed(seed, "triples"));
  const Point e = g.identity();
  for (std::size_t i = 0; i < opt.n_triples; ++i) {
    const Point p = detail::uniform_point(g, rng, opt.coord_range);
    const Point q = detail::uniform_point(g, rng, opt.coord_range);
    const Point r = detail::uniform_point(g, rng, opt.coord_range);
    rep.associativity = std::max(rep.associativity,
                                 max_abs_diff(multiply(g, multiply(g, p, q), r), multiply(g, p, multiply(g, q, r))));
    rep.identity = std::max({rep.identity, max_abs_diff(multiply(g, p, e), p), max_abs_diff(multiply(g, e, p), p)});
    rep.inverse = std::max({rep.inverse, max_abs_diff(multiply(g, p, inverse(g, p)), e),
                            max_abs_diff(multiply(g, inverse(g, p), p), e)});
    const double t = log_uniform(rng, 1e-2, 1e2);
    const Point a = dilate(g, t, multiply(g, p, q));
    const Point b = multiply(g, dilate(g, t, p), dilate(g, t, q));
    double scale = 0.0;
    for (int k = 0; k < g.dim(); ++k) scale = std::max(scale, std::abs(a[k]));
    rep.automorphism = std::max(rep.automorphism, max_abs_diff(a, b) / std::max(scale, 1e-300));
    rep.homogeneity = std::max(rep.homogeneity, detail::rel(gauge(g, dilate(g, t, p)), t * gauge(g, p)));
    rep.gauge_symmetry = std::max(rep.gauge_symmetry, detail::rel(gauge(g, inverse(g, p)), gauge(g, p)));
    rep.left_invariance = std::max(
        rep.left_invariance, detail::rel(quasi_dist(g, multiply(g, r, p), multiply(g, r, q)), quasi_dist(g, p, q)));
  }

  Rng qr(derive_seed(seed, "quasi"));
  for (std::size_t i = 0; i < opt.quasi_samples; ++i) {
    const Point p = dilate(g, log_uniform(qr, 1e-2, 1e2), sample_unit_sphere(g, qr));
    const Point q = dilate(g, log_uniform(qr, 1e-2, 1e2), sample_unit_sphere(g, qr));
    rep.quasi_constant = std::max(rep.quasi_constant, gauge(g, multiply(g, p, q)) / (gauge(g, p) + gauge(g, q)));
  }

  Rng hr(derive_seed(seed, "haar"));
  const std::size_t per = std::max<std::size_t>(1, opt.haar_samples / std::max<std::size_t>(1, opt.haar_scales.size()));
  const Point shift = detail::uniform_point(g, hr, 2.0);
  std::vector<double> lx;
  std::vector<double> ly;
  for (double t : opt.haar_scales) {
    const double v = detail::translated_box_volume(g, shift, t, per, hr);
    rep.haar_ratios.emplace_back(t, v);
    if (v > 0.0) {
      lx.push_back(std::log(t));
      ly.push_back(std::log(v));
    }
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  rep.haar_exponent = sxx > 0.0 ? sxy / sxx : 0.0;

  auto check = [&](bool ok, const std::string& what) {
    if (!ok) rep.failures.push_back(what);
  };
  check(rep.associativity < opt.assoc_tol, "associativity");
  check(rep.identity < opt.exact_tol, "identity law");
  check(rep.inverse < opt.exact_tol, "inverse law");
  check(rep.automorphism < opt.exact_tol, "dilation automorphism");
  check(rep.homogeneity < opt.exact_tol, "gauge homogeneity");
  check(rep.gauge_symmetry < opt.exact_tol, "gauge symmetry");
  check(rep.left_invariance < opt.invariance_tol, "left invariance");
  check(std::isfinite(rep.quasi_constant) && rep.quasi_constant > 0.0, "quasi-triangle constant");
  check(std::abs(rep.haar_exponent - rep.homogeneous_dim) <= opt.haar_tol * rep.homogeneous_dim, "Haar scaling exponent");
  rep.pass = rep.failures.empty();
  return rep;
}

}  // namespace carnot
