// Type-lambda kernels, potentials of Cantor measures and the seminorm
// estimators.
//
// Oracles: exact homogeneity of the power-gauge kernel; direct summation over
// materialized atoms for the tree code; radial integrability of
// gauge^{(lambda-Q)p} near a single atom; a zero-mass measure for the constant
// potential.

#include <gtest/gtest.h>

#include <cmath>

#include "carnot/potential.hpp"

using namespace carnot;

namespace {

const TileSystem& heis() {
  static const TileSystem sys = build_default_system(GroupSpec::heisenberg(1));
  return sys;
}

Point pt(std::initializer_list<double> v) { return Point(std::vector<double>(v)); }

double direct_sum(const GroupSpec& g, const KernelSpec& ks, const DiscreteMeasure& mu, const Point& x) {
  double f = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) f += mu.weights()[i] * kernel_eval(g, ks, multiply(g, inverse(g, mu.atoms()[i]), x));
  return f;
}

}  // namespace

TEST(Kernel, ValuesAndHomogeneity) {
  const auto g = GroupSpec::heisenberg(1);
  const KernelSpec ks(g, 2, 3.0);
  EXPECT_EQ(ks.exponent(), -2.0);
  EXPECT_DOUBLE_EQ(kernel_eval(g, ks, pt({1, 0, 0})), 3.0);
  EXPECT_DOUBLE_EQ(kernel_eval(g, ks, pt({0, 0, 1})), 3.0);
  EXPECT_DOUBLE_EQ(kernel_eval(g, ks, pt({0.5, 0, 0})), 12.0);
  Rng rng(1);
  for (int s = 0; s < 10000; ++s) {
    Point p(3);
    for (int i = 0; i < 3; ++i) p[i] = uniform(rng, -2, 2);
    const double k = kernel_eval(g, ks, p);
    EXPECT_LE(std::abs(kernel_eval(g, ks, dilate(g, 2.0, p)) - 0.25 * k), 1e-12 * k);
  }
  EXPECT_THROW(kernel_eval(g, ks, g.identity()), Error);
  EXPECT_THROW(KernelSpec(g, 4), Error);
  EXPECT_THROW(KernelSpec(g, 0), Error);
  EXPECT_NO_THROW(KernelSpec(g, 3));
}

TEST(Kernel, SmoothnessCheckBoundsAndStability) {
  const auto g = GroupSpec::heisenberg(1);
  for (double c : {1.0, -2.0}) {
    const auto rep = kernel_smoothness_check(g, KernelSpec(g, 2, c), 10000, 3);
    EXPECT_NEAR(rep.bound_constant, std::abs(c), 1e-12);
    EXPECT_LT(rep.homogeneity_defect, 1e-12);
    EXPECT_LT(rep.dilation_defect, 1e-10);
    EXPECT_TRUE(std::isfinite(rep.c_smooth));
    EXPECT_GT(rep.c_smooth, 0.0);
    EXPECT_EQ(rep.bands.size(), 3u);
    EXPECT_LE(rep.band_spread, 3.0);
  }
  const KernelSpec ks(g, 2);
  const Point x = pt({0.3, 0.7, -0.2});
  EXPECT_EQ(kernel_eval(g, ks, multiply(g, g.identity(), x)) - kernel_eval(g, ks, x), 0.0);
}

TEST(Potential, SingleAtomAndLinearity) {
  const auto g = GroupSpec::heisenberg(1);
  const KernelSpec ks(g, 2);
  const PotentialField one(ks, DiscreteMeasure(g, {g.identity()}, {1.0}));
  Rng rng(2);
  for (int s = 0; s < 100; ++s) {
    const Point x = sample_ball(g, g.identity(), 3.0, rng);
    EXPECT_DOUBLE_EQ(one.eval(x), kernel_eval(g, ks, x));
  }
  const DiscreteMeasure a(g, {pt({0.1, 0, 0}), pt({0, 0.2, 0.1})}, {0.5, 1.5});
  const DiscreteMeasure b(g, {pt({-0.3, 0.1, 0.4})}, {2.0});
  const PotentialField fa(ks, a), fb(ks, b), fab(ks, a + b);
  for (int s = 0; s < 100; ++s) {
    const Point x = sample_ball(g, g.identity(), 2.0, rng);
    const double sum = fa.eval(x) + fb.eval(x);
    EXPECT_LE(std::abs(fab.eval(x) - sum), 1e-12 * std::abs(sum));
  }
  EXPECT_THROW(one.eval(g.identity()), SingularEvaluation);
  EXPECT_THROW(one.eval(pt({1e-12, 0, 0})), SingularEvaluation);
  EXPECT_THROW(PotentialField(ks, a, 1.0), Error);
}

TEST(Potential, LeftTranslationConvention) {
  // f(x) = sum w k(y^{-1} x): translating measure and point together on the
  // left leaves f unchanged.
  const auto g = GroupSpec::heisenberg(1);
  const KernelSpec ks(g, 2);
  const Point y = pt({0.4, -0.3, 0.2});
  const Point a = pt({1.1, 0.5, -0.7});
  const PotentialField f(ks, DiscreteMeasure(g, {y}, {1.0}));
  const PotentialField fa(ks, DiscreteMeasure(g, {multiply(g, a, y)}, {1.0}));
  Rng rng(3);
  for (int s = 0; s < 100; ++s) {
    const Point x = sample_ball(g, y, 2.0, rng);
    EXPECT_NEAR(fa.eval(multiply(g, a, x)), f.eval(x), 1e-9 * f.eval(x));
  }
}

TEST(Potential, TreeCodeMatchesDirectSummation) {
  const auto& sys = heis();
  const auto& g = sys.spec();
  const KernelSpec ks(g, 2);
  for (double s : {2.0, 2.5}) {
    const CantorMeasure cm(sys, s, 7);
    const auto mu = cm.atoms();
    const PotentialField tree(ks, cm);
    Rng rng(4);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const Point x = i % 2 == 0 ? cm.sample_near_support(rng, 4) : sample_ball(g, sys.center(), 1.5, rng);
      const double d = direct_sum(g, ks, mu, x);
      worst = std::max(worst, std::abs(tree.eval(x) - d) / d);
      const Point z = sample_ball(g, x, 0.05, rng);
      const double dd = d - direct_sum(g, ks, mu, z);
      EXPECT_NEAR(tree.difference(x, z), dd, 1e-2 * (std::abs(d) + 1e-9));
    }
    EXPECT_LT(worst, 1e-2) << "s=" << s;
  }
}

TEST(Potential, AnnularDecompositionMatchesDirectSum) {
  const auto& sys = heis();
  const auto& g = sys.spec();
  const KernelSpec ks(g, 2);
  const auto mu = CantorMeasure(sys, 2.0, 6).atoms();
  Rng rng(5);
  for (int s = 0; s < 20; ++s) {
    const Point x = sample_ball(g, sys.center(), 1.0, rng);
    const auto dec = annular_decomposition(g, ks, mu, x);
    EXPECT_LE(std::abs(dec.annular_total - dec.direct_total), 1e-10 * dec.direct_total);
    EXPECT_LE(std::abs(dec.direct_total - direct_sum(g, ks, mu, x)), 1e-10 * dec.direct_total);
    // on the annulus 2^{-j} <= d < 2^{-j+1} the kernel lies between
    // 2^{lambda-Q} (2^{-j})^{lambda-Q} and (2^{-j})^{lambda-Q}
    for (const auto& a : dec.annuli) {
      EXPECT_LE(a.kernel_sum, a.bound_term * (1.0 + 1e-12));
      EXPECT_GE(a.kernel_sum, 0.25 * a.bound_term * (1.0 - 1e-12));
    }
  }
  EXPECT_THROW(annular_decomposition(g, ks, mu, mu.atoms()[3]), SingularEvaluation);
}

TEST(Potential, FarFieldDecaySlope) {
  const auto& sys = heis();
  const auto& g = sys.spec();
  const KernelSpec ks(g, 2);
  const PotentialField pf(ks, CantorMeasure(sys, 2.0, 16));
  const Point dir = pt({0.6, -0.3, 0.5});
  const double n0 = gauge(g, dir);
  std::vector<double> lx, ly;
  for (double r : {10.0, 31.6, 100.0, 316.0, 1000.0}) {
    const Point x = dilate(g, r / n0, dir);
    lx.push_back(std::log(r));
    ly.push_back(std::log(std::abs(pf.eval(x))));
  }
  EXPECT_NEAR(detail::ls_slope(lx, ly), ks.exponent(), 0.05);
}

TEST(Seminorm, ConstantPotentialHasZeroSeminorms) {
  const auto g = GroupSpec::heisenberg(1);
  const PotentialField zero(KernelSpec(g, 2), DiscreteMeasure(g, {pt({0.5, 0.5, 0.5})}, {0.0}));
  BmoOptions bo;
  bo.balls_per_decade = 6;
  bo.n_quad = 64;
  const auto bmo = bmo_seminorm_estimate(zero, 1, bo);
  EXPECT_EQ(bmo.max, 0.0);
  HolderOptions ho;
  ho.pairs_per_decade = 50;
  const auto hol = holder_seminorm_estimate(zero, 0.5, 1, ho);
  EXPECT_EQ(hol.max, 0.0);
}

TEST(Seminorm, BmoBoundedAtCriticalExponentAndGrowsBelow) {
  const auto& sys = heis();
  const KernelSpec ks(sys.spec(), 2);
  const auto crit = bmo_seminorm_estimate(PotentialField(ks, CantorMeasure(sys, 2.0, 24)), 11);
  ASSERT_EQ(crit.decades.size(), 3u);
  EXPECT_LE(crit.spread, 4.0);
  const auto sub = bmo_seminorm_estimate(PotentialField(ks, CantorMeasure(sys, 1.5, 24)), 11);
  EXPECT_TRUE(sub.monotone_growth);
  EXPECT_GT(sub.spread, 4.0);
}

TEST(Seminorm, HolderBoundedWithMarginAndGrowsWithout) {
  const auto& sys = heis();
  const KernelSpec ks(sys.spec(), 2);
  const auto margin = holder_seminorm_estimate(PotentialField(ks, CantorMeasure(sys, 2.5, 24)), 0.5, 12);
  ASSERT_EQ(margin.decades.size(), 3u);
  EXPECT_LE(margin.spread, 4.0);
  const auto none = holder_seminorm_estimate(PotentialField(ks, CantorMeasure(sys, 2.0, 24)), 0.5, 12);
  EXPECT_TRUE(none.monotone_growth);
  EXPECT_GT(none.spread, 4.0);
  EXPECT_THROW(holder_seminorm_estimate(PotentialField(ks, CantorMeasure(sys, 2.5, 8)), 1.5, 1), Error);
}

TEST(Lp, UnitBoxOfOnes) {
  const Box k{pt({0, 0, 0}), pt({1, 1, 1})};
  for (double p : {1.0, 2.0, 3.5}) EXPECT_NEAR(lp_norm_box([](const Point&) { return 1.0; }, k, p, 1000, 1), 1.0, 1e-12);
  EXPECT_THROW(lp_norm_box([](const Point&) { return 1.0; }, k, 0.5, 10, 1), Error);
}

TEST(Lp, SingleAtomIntegrabilityThreshold) {
  // gauge^{-2p} is integrable near the atom iff 2p < Q = 4.
  const auto g = GroupSpec::heisenberg(1);
  const PotentialField pf(KernelSpec(g, 2), DiscreteMeasure(g, {pt({0.5, 0.5, 0.5})}, {1.0}));
  const Box k{pt({-1, -1, -1}), pt({2, 2, 2})};
  for (double p : {1.0, 1.5}) {
    const auto rep = lp_norm_estimate(pf, p, k, 20000, 3);
    EXPECT_FALSE(rep.divergent) << "p=" << p;
    EXPECT_TRUE(std::isfinite(rep.norm));
    // shell contributions decay like 2^{(2p-4) j}
    EXPECT_NEAR(rep.tail_slope, 2.0 * p - 4.0, 0.15) << "p=" << p;
  }
  for (double p : {2.0, 3.0}) EXPECT_TRUE(lp_norm_estimate(pf, p, k, 20000, 3).divergent) << "p=" << p;
}

TEST(Lp, CantorPotentialSquareIntegrable) {
  const auto& sys = heis();
  const auto& g = sys.spec();
  const PotentialField pf(KernelSpec(g, 2), CantorMeasure(sys, 2.0, 24));
  const Box k{pt({-1, -1, -1}), pt({2, 2, 2})};
  const auto rep = lp_norm_estimate(pf, 2.0, k, 20000, 4);
  EXPECT_FALSE(rep.divergent);
  EXPECT_TRUE(std::isfinite(rep.norm));
  EXPECT_GT(rep.norm, 0.0);
}
