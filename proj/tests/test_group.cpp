// Group law, dilations, gauge and horizontal derivatives.
//
// Oracles: the Heisenberg group H^n as (n+2)x(n+2) unipotent matrices, with
// the product computed as log(exp(X) exp(Y)) by matrix series; left-invariant
// vector fields written out by hand for H^1.

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <vector>

#include "carnot/checks.hpp"
#include "carnot/derivative.hpp"
#include "carnot/group.hpp"
#include "carnot/group_io.hpp"
#include "carnot/random.hpp"

using namespace carnot;

namespace {

using Mat = std::vector<std::vector<double>>;

Mat matmul(const Mat& a, const Mat& b) {
  const std::size_t n = a.size();
  Mat c(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

// Lie algebra element of H^n: x in row 0, y in the last column, t in the corner.
Mat algebra(int n, const Point& p) {
  Mat m(n + 2, std::vector<double>(n + 2, 0.0));
  for (int i = 0; i < n; ++i) {
    m[0][1 + i] = p[i];
    m[1 + i][n + 1] = p[n + i];
  }
  m[0][n + 1] = p[2 * n];
  return m;
}

Mat identity(std::size_t n) {
  Mat m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

// exp X = I + X + X^2/2 (X^3 = 0), log(I + N) = N - N^2/2.
Mat expm(const Mat& x) {
  Mat r = identity(x.size());
  const Mat x2 = matmul(x, x);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) r[i][j] += x[i][j] + 0.5 * x2[i][j];
  return r;
}

Point logm_point(int n, const Mat& g) {
  Mat nmat = g;
  for (std::size_t i = 0; i < g.size(); ++i) nmat[i][i] -= 1.0;
  const Mat n2 = matmul(nmat, nmat);
  Point p(2 * n + 1);
  for (int i = 0; i < n; ++i) {
    p[i] = nmat[0][1 + i];
    p[n + i] = nmat[1 + i][n + 1];
  }
  p[2 * n] = nmat[0][n + 1] - 0.5 * n2[0][n + 1];
  return p;
}

Point matrix_product(int n, const Point& p, const Point& q) {
  return logm_point(n, matmul(expm(algebra(n, p)), expm(algebra(n, q))));
}

Point random_point(const GroupSpec& g, Rng& rng, double a) {
  Point p(g.dim());
  for (int i = 0; i < g.dim(); ++i) p[i] = uniform(rng, -a, a);
  return p;
}

Point pt(std::initializer_list<double> v) { return Point(std::vector<double>(v)); }

}  // namespace

TEST(GroupLaw, HeisenbergProductExamples) {
  const auto g = GroupSpec::heisenberg(1);
  const Point a = multiply(g, pt({1, 0, 0}), pt({0, 1, 0}));
  const Point b = multiply(g, pt({0, 1, 0}), pt({1, 0, 0}));
  EXPECT_LT(max_abs_diff(a, pt({1, 1, 0.5})), 1e-15);
  EXPECT_LT(max_abs_diff(b, pt({1, 1, -0.5})), 1e-15);
}

TEST(GroupLaw, MatchesMatrixExponentialOracle) {
  Rng rng(11);
  for (int n : {1, 2, 3}) {
    const auto g = GroupSpec::heisenberg(n);
    for (int s = 0; s < 2000; ++s) {
      const Point p = random_point(g, rng, 5.0);
      const Point q = random_point(g, rng, 5.0);
      EXPECT_LT(max_abs_diff(multiply(g, p, q), matrix_product(n, p, q)), 1e-12) << "n=" << n;
    }
  }
}

TEST(GroupLaw, IdentityAndInverse) {
  const auto g = GroupSpec::heisenberg(1);
  EXPECT_EQ(max_abs_diff(inverse(g, g.identity()), g.identity()), 0.0);
  EXPECT_EQ(max_abs_diff(inverse(g, pt({1, 2, 3})), pt({-1, -2, -3})), 0.0);
  Rng rng(3);
  for (const auto& spec : {g, random_rational_step2(3, 2, 7)}) {
    for (int s = 0; s < 10000; ++s) {
      const Point p = random_point(spec, rng, 10.0);
      EXPECT_LT(max_abs_diff(multiply(spec, p, inverse(spec, p)), spec.identity()), 1e-12);
      EXPECT_EQ(max_abs_diff(multiply(spec, p, spec.identity()), p), 0.0);
    }
  }
}

TEST(GroupLaw, AssociativityProperty) {
  Rng rng(5);
  for (const auto& g : {GroupSpec::heisenberg(1), random_rational_step2(3, 2, 7)}) {
    double worst = 0.0;
    for (int s = 0; s < 10000; ++s) {
      const Point p = random_point(g, rng, 10.0);
      const Point q = random_point(g, rng, 10.0);
      const Point r = random_point(g, rng, 10.0);
      worst = std::max(worst, max_abs_diff(multiply(g, multiply(g, p, q), r), multiply(g, p, multiply(g, q, r))));
    }
    EXPECT_LT(worst, 1e-9);
  }
}

TEST(GroupLaw, DimensionMismatchThrows) {
  const auto g = GroupSpec::heisenberg(1);
  EXPECT_THROW(multiply(g, Point(3), Point(4)), Error);
  EXPECT_THROW(inverse(g, Point(2)), Error);
}

TEST(Dilation, ExamplesAndAutomorphism) {
  const auto g = GroupSpec::heisenberg(1);
  EXPECT_EQ(max_abs_diff(dilate(g, 2.0, pt({1, 1, 1})), pt({2, 2, 4})), 0.0);
  EXPECT_EQ(max_abs_diff(dilate(g, 1.0, pt({0.3, -2, 7})), pt({0.3, -2, 7})), 0.0);
  EXPECT_THROW(dilate(g, 0.0, pt({1, 1, 1})), Error);
  EXPECT_THROW(dilate(g, -1.0, pt({1, 1, 1})), Error);
  Rng rng(8);
  for (int s = 0; s < 5000; ++s) {
    const Point p = random_point(g, rng, 3.0);
    const Point q = random_point(g, rng, 3.0);
    const double t = log_uniform(rng, 0.01, 100.0);
    const Point a = dilate(g, t, multiply(g, p, q));
    const Point b = multiply(g, dilate(g, t, p), dilate(g, t, q));
    double scale = 1.0;
    for (int i = 0; i < 3; ++i) scale = std::max(scale, std::abs(a[i]));
    EXPECT_LT(max_abs_diff(a, b) / scale, 1e-12);
  }
}

TEST(Gauge, ExamplesAndHomogeneity) {
  const auto g = GroupSpec::heisenberg(1);
  EXPECT_EQ(gauge(g, g.identity()), 0.0);
  EXPECT_DOUBLE_EQ(gauge(g, pt({1, 0, 0})), 1.0);
  EXPECT_DOUBLE_EQ(quasi_dist(g, g.identity(), pt({0, 0, 1})), 1.0);
  Rng rng(9);
  for (int s = 0; s < 10000; ++s) {
    const Point p = random_point(g, rng, 4.0);
    const double t = log_uniform(rng, 1e-3, 1e3);
    const double n = gauge(g, p);
    EXPECT_LE(std::abs(gauge(g, dilate(g, t, p)) - t * n), 1e-12 * t * n);
    EXPECT_LE(std::abs(gauge(g, inverse(g, p)) - n), 1e-15 * n);
    EXPECT_EQ(quasi_dist(g, p, p), 0.0);
  }
}

TEST(Gauge, QuasiDistanceIsLeftInvariant) {
  Rng rng(10);
  for (const auto& g : {GroupSpec::heisenberg(2), random_rational_step2(3, 2, 1)}) {
    for (int s = 0; s < 5000; ++s) {
      const Point p = random_point(g, rng, 5.0);
      const Point q = random_point(g, rng, 5.0);
      const Point r = random_point(g, rng, 5.0);
      const double d = quasi_dist(g, p, q);
      EXPECT_LE(std::abs(quasi_dist(g, multiply(g, r, p), multiply(g, r, q)) - d), 1e-9 * d);
    }
  }
}

TEST(Gauge, KappaWeightsVerticalPart) {
  const auto g = GroupSpec::heisenberg(1, 16.0);
  EXPECT_DOUBLE_EQ(gauge(g, pt({0, 0, 1})), 2.0);
}

TEST(Spec, HomogeneousDimensionAndValidation) {
  EXPECT_EQ(GroupSpec::heisenberg(1).homogeneous_dim(), 4);
  EXPECT_EQ(GroupSpec::heisenberg(2).homogeneous_dim(), 6);
  EXPECT_EQ(GroupSpec::euclidean(3).homogeneous_dim(), 3);
  EXPECT_EQ(random_rational_step2(3, 2, 1).homogeneous_dim(), 7);
  EXPECT_THROW(GroupSpec::euclidean(2), Error);
  EXPECT_THROW(GroupSpec({2, 1}, {{{0, 1}, {1, 0}}}), Error);
  EXPECT_THROW(GroupSpec({2, 2}, {{{0, 1}, {-1, 0}}, {{0, 2}, {-2, 0}}}), Error);
}

TEST(Spec, JsonRoundTripAndOneBasedIndices) {
  const nlohmann::json j = {{"layer_dims", {2, 1}}, {"structure_constants", {{{1, 1, 2, 1.0}}}}};
  const auto g = group_from_json(j);
  EXPECT_LT(max_abs_diff(multiply(g, pt({1, 0, 0}), pt({0, 1, 0})), pt({1, 1, 0.5})), 1e-15);
  const auto h = random_rational_step2(4, 2, 3);
  const auto back = group_from_json(group_to_json(h));
  Rng rng(1);
  for (int s = 0; s < 100; ++s) {
    const Point p = random_point(h, rng, 2.0);
    const Point q = random_point(h, rng, 2.0);
    EXPECT_EQ(max_abs_diff(multiply(h, p, q), multiply(back, p, q)), 0.0);
  }
}

TEST(Spec, JsonRejectsNonAntisymmetric) {
  const nlohmann::json j = {{"layer_dims", {2, 1}}, {"structure_constants", {{{1, 1, 2, 1.0}, {1, 2, 1, 1.0}}}}};
  EXPECT_THROW(group_from_json(j), Error);
  const nlohmann::json out_of_range = {{"layer_dims", {2, 1}}, {"structure_constants", {{{1, 1, 3, 1.0}}}}};
  EXPECT_THROW(group_from_json(out_of_range), Error);
  EXPECT_THROW(load_group("heisenberg:x"), Error);
  EXPECT_THROW(load_group("/nonexistent/spec.json"), Error);
}

TEST(Derivative, ConstantFieldHasZeroDerivatives) {
  const auto g = GroupSpec::heisenberg(1);
  auto one = [](const Point&) { return 1.0; };
  for (int order = 1; order <= 4; ++order)
    for (const auto& a : multi_indices(g, order))
      EXPECT_LT(std::abs(horizontal_derivative(g, one, a, pt({0.3, -0.2, 0.1}))), 1e-10);
}

TEST(Derivative, VerticalCoordinateUnderX1) {
  // X_1 = d/dx - (y/2) d/dt for the product (x,t)(x',t') = (x+x', t+t'+(xy'-yx')/2).
  const auto g = GroupSpec::heisenberg(1);
  auto t = [](const Point& p) { return p[2]; };
  for (double y : {-2.0, -0.5, 0.0, 0.7, 3.0})
    EXPECT_NEAR(horizontal_derivative(g, t, MultiIndex{1}, pt({0, y, 0})), -y / 2.0, 1e-9);
}

TEST(Derivative, MatchesHandDerivedVectorFields) {
  // f = t^2 + x y; X_1 = d_x - (y/2) d_t, X_2 = d_y + (x/2) d_t.
  const auto g = GroupSpec::heisenberg(1);
  auto f = [](const Point& p) { return p[2] * p[2] + p[0] * p[1]; };
  auto x1f = [](double x, double y, double t) { (void)x; return y - t * y; };
  auto x2f = [](double x, double y, double t) { (void)y; return x + t * x; };
  // X_2 X_1 f = X_2 (y - t y) = 1 - t - (x/2) y ; X_1 X_1 f = X_1(y - t y) = y^2 / 2
  auto x21f = [](double x, double y, double t) { return 1.0 - t - 0.5 * x * y; };
  auto x11f = [](double, double y, double) { return 0.5 * y * y; };
  Rng rng(12);
  for (int s = 0; s < 200; ++s) {
    const double x = uniform(rng, -1, 1), y = uniform(rng, -1, 1), t = uniform(rng, -1, 1);
    const Point p = pt({x, y, t});
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
    EXPECT_LT(rel(horizontal_derivative(g, f, MultiIndex{1}, p), x1f(x, y, t)), 1e-6);
    EXPECT_LT(rel(horizontal_derivative(g, f, MultiIndex{2}, p), x2f(x, y, t)), 1e-6);
    EXPECT_LT(rel(horizontal_derivative(g, f, MultiIndex{2, 1}, p), x21f(x, y, t)), 1e-6);
    EXPECT_LT(rel(horizontal_derivative(g, f, MultiIndex{1, 1}, p), x11f(x, y, t)), 1e-6);
  }
}

TEST(Derivative, HigherOrderAgainstPolynomialOracle) {
  // f = t^2: X_1 f = -y t, X_1 X_1 f = y^2/2, X_2 X_1 X_1 f = y, X_2 X_2 X_1 X_1 f = 1.
  const auto g = GroupSpec::heisenberg(1);
  auto f = [](const Point& p) { return p[2] * p[2]; };
  const Point p = pt({0.4, -0.3, 0.2});
  EXPECT_NEAR(horizontal_derivative(g, f, MultiIndex{2, 1, 1}, p), -0.3, 1e-3);
  EXPECT_NEAR(horizontal_derivative(g, f, MultiIndex{2, 2, 1, 1}, p), 1.0, 1e-3);
}

TEST(Derivative, DilationScalingLaw) {
  const auto g = GroupSpec::heisenberg(1);
  auto f = [](const Point& p) { return std::sin(p[0]) * std::cos(p[1]) + p[2] * p[0]; };
  Rng rng(4);
  for (double r : {0.5, 2.0, 3.0}) {
    auto fr = [&](const Point& q) { return f(dilate(g, r, q)); };
    for (int order = 1; order <= 2; ++order) {
      for (const auto& a : multi_indices(g, order)) {
        const Point p = random_point(g, rng, 0.5);
        // matched steps make the identity exact for the difference quotients
        const double h = default_step(order);
        const double lhs = horizontal_derivative(g, fr, a, p, h);
        const double rhs = std::pow(r, order) * horizontal_derivative(g, f, a, dilate(g, r, p), r * h);
        EXPECT_LT(std::abs(lhs - rhs), 1e-6 * std::max(1.0, std::abs(rhs))) << a.str() << " r=" << r;
      }
    }
  }
}

TEST(Derivative, RejectsUnsupportedRequests) {
  const auto g = GroupSpec::heisenberg(1);
  auto f = [](const Point& p) { return p[0]; };
  EXPECT_THROW(horizontal_derivative(g, f, MultiIndex{1, 1, 1, 1, 1}, g.identity()), Error);
  EXPECT_THROW(horizontal_derivative(g, f, MultiIndex{3}, g.identity()), Error);
  EXPECT_THROW(horizontal_derivative(g, f, MultiIndex{1}, g.identity(), 0.0), Error);
  auto bad = [](const Point&) { return NAN; };
  EXPECT_THROW(horizontal_derivative(g, bad, MultiIndex{1}, g.identity()), Error);
}

TEST(Suite, InvariantSuitePassesAndRecoversQ) {
  for (const auto& g : {GroupSpec::heisenberg(1), random_rational_step2(3, 2, 7), GroupSpec::euclidean(3)}) {
    GroupCheckOptions opt;
    opt.haar_samples = 400000;
    const auto rep = group_invariant_suite(g, 1, opt);
    EXPECT_TRUE(rep.pass) << g.name();
    EXPECT_NEAR(rep.haar_exponent, g.homogeneous_dim(), 0.02 * g.homogeneous_dim());
    EXPECT_GE(rep.quasi_constant, 0.99);
    EXPECT_TRUE(std::isfinite(rep.quasi_constant));
  }
}

TEST(Random, ChunkedSeedingIsWorkerIndependent) {
  std::vector<double> a(16), b(16);
  for_each_chunk(42, 16, 1, [&](std::size_t c, Rng& rng) { a[c] = uniform01(rng); });
  for_each_chunk(42, 16, 4, [&](std::size_t c, Rng& rng) { b[c] = uniform01(rng); });
  EXPECT_EQ(a, b);
  EXPECT_NE(derive_seed(1, "a"), derive_seed(1, "b"));
}

TEST(Random, BallSamplesRespectRadius) {
  const auto g = GroupSpec::heisenberg(1);
  Rng rng(2);
  const Point c = pt({0.3, 0.1, -0.2});
  for (int s = 0; s < 2000; ++s) {
    EXPECT_LT(quasi_dist(g, c, sample_ball(g, c, 0.25, rng)), 0.25 + 1e-12);
    EXPECT_NEAR(gauge(g, sample_unit_sphere(g, rng)), 1.0, 1e-12);
  }
}
