#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fracsob/field.hpp"

using namespace fracsob;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST(Grid, NodesAndFrequencies) {
  Grid2D g(16, 8, 2.0, 1.0);
  EXPECT_DOUBLE_EQ(g.h1(), 0.125);
  EXPECT_DOUBLE_EQ(g.h2(), 0.125);
  EXPECT_EQ(g.size(), 128u);
  EXPECT_EQ(g.index(3, 2), 35u);
  EXPECT_EQ(g.wrap1(-1), 15);
  EXPECT_EQ(g.wrap2(9), 1);
  EXPECT_DOUBLE_EQ(g.xi1(15), -kTwoPi / 2.0);
  EXPECT_TRUE(g.nyquist1(8));
}

TEST(Grid, RejectsNonPowerOfTwoAndTinyGrids) {
  EXPECT_THROW(Grid2D(12), std::invalid_argument);
  EXPECT_THROW(Grid2D(8, 4, 1.0, 1.0), std::invalid_argument);
}

TEST(ScalarField, DriftSplitsIntoPeriodicPart) {
  Grid2D g(16);
  ScalarField f = sample([](double x, double y) { return 2.0 * x - y + std::sin(kTwoPi * y); }, g, Affine{2.0, -1.0});
  auto p = f.periodic_part();
  for (int j = 0; j < g.n2; ++j) EXPECT_NEAR(p[g.index(5, j)], std::sin(kTwoPi * g.x2(j)), 1e-14);
  ScalarField back = ScalarField::from_periodic(g, p, f.drift());
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(back[k], f[k], 1e-14);
}

TEST(ScalarField, RejectsNonFiniteSamples) {
  Grid2D g(8);
  EXPECT_THROW(sample([](double x, double) { return 1.0 / x; }, g), std::domain_error);
}

TEST(ScalarField, ArithmeticAddsDrifts) {
  Grid2D g(8);
  ScalarField a = sample([](double x, double) { return x; }, g, Affine{1.0, 0.0});
  ScalarField b = sample([](double, double y) { return y; }, g, Affine{0.0, 1.0});
  ScalarField c = a + 2.0 * b;
  EXPECT_DOUBLE_EQ(c.drift().a1, 1.0);
  EXPECT_DOUBLE_EQ(c.drift().a2, 2.0);
  EXPECT_DOUBLE_EQ(c(3, 5), g.x1(3) + 2.0 * g.x2(5));
}

TEST(Norms, ConstantFieldOnUnitTorus) {
  Grid2D g(32);
  ScalarField f(g, 3.0);
  EXPECT_NEAR(lp_norm(f, 1.0), 3.0, 1e-14);
  EXPECT_NEAR(lp_norm(f, 2.0), 3.0, 1e-14);
  EXPECT_NEAR(lp_norm(f, 1.5), 3.0, 1e-14);
  EXPECT_DOUBLE_EQ(sup_norm(f), 3.0);
}

TEST(Norms, SineL2NormIsRootHalf) {
  Grid2D g(64);
  ScalarField f = sample([](double x, double) { return std::sin(kTwoPi * x); }, g);
  EXPECT_NEAR(lp_norm(f, 2.0), std::sqrt(0.5), 1e-14);
}

TEST(Norms, EmptyRegionThrows) {
  Grid2D g(8);
  Mask none(g, false);
  EXPECT_THROW(lp_norm(ScalarField(g, 1.0), 2.0, none), std::invalid_argument);
}

TEST(Mask, DiskAreaApproachesPiR2) {
  Grid2D g(256);
  Mask d = Mask::disk(g, 0.5, 0.5, 0.3);
  EXPECT_NEAR(static_cast<double>(d.count()) * g.cell_area(), std::numbers::pi * 0.09, 2e-3);
}

TEST(Mask, ErosionShrinksDisk) {
  Grid2D g(64);
  Mask d = Mask::disk(g, 0.5, 0.5, 0.25);
  EXPECT_LT(d.eroded(2).count(), d.count());
  EXPECT_EQ((d && !d).count(), 0u);
}

TEST(Gradient, SpectralIsExactOnTrigonometricPolynomials) {
  Grid2D g(32);
  ScalarField f = sample([](double x, double y) { return std::sin(kTwoPi * x) * std::cos(2 * kTwoPi * y) + 0.5 * x; }, g,
                         Affine{0.5, 0.0});
  VectorField d = gradient(f);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      double x = g.x1(i), y = g.x2(j);
      EXPECT_NEAR(d[0](i, j), kTwoPi * std::cos(kTwoPi * x) * std::cos(2 * kTwoPi * y) + 0.5, 1e-11);
      EXPECT_NEAR(d[1](i, j), -2 * kTwoPi * std::sin(kTwoPi * x) * std::sin(2 * kTwoPi * y), 1e-11);
    }
}

TEST(Gradient, CenteredDifferenceIsSecondOrder) {
  auto err = [](int n) {
    Grid2D g(n);
    ScalarField f = sample([](double x, double) { return std::sin(kTwoPi * x); }, g);
    ScalarField exact = sample([](double x, double) { return kTwoPi * std::cos(kTwoPi * x); }, g);
    return sup_norm(gradient(f, Scheme::centered_difference)[0] - exact);
  };
  EXPECT_NEAR(std::log2(err(32) / err(64)), 2.0, 0.05);
}

TEST(Gradient, AnalyticNeedsAttachedExpression) {
  Grid2D g(8);
  EXPECT_THROW(gradient(ScalarField(g), Scheme::analytic), std::invalid_argument);
  ScalarField f = sample([](double x, double) { return x * x; }, g,
                         GradientExpr([](double x, double) { return std::array<double, 2>{2 * x, 0.0}; }));
  EXPECT_DOUBLE_EQ(gradient(f, Scheme::analytic)[0](3, 0), 2 * g.x1(3));
}

TEST(Interpolate, ReproducesBilinearAndDrift) {
  Grid2D g(16);
  ScalarField f = sample([](double x, double y) { return 3.0 * x + y; }, g, Affine{3.0, 1.0});
  EXPECT_NEAR(interpolate(f, 0.3712, 0.9015), 3.0 * 0.3712 + 0.9015, 1e-13);
  EXPECT_NEAR(interpolate(f, 1.25, -0.5), 3.75 - 0.5, 1e-13);
}

TEST(FracIndex, RejectsOutOfRange) {
  EXPECT_THROW(FracIndex(1.5, 2.0), std::invalid_argument);
  EXPECT_THROW(FracIndex(0.5, 0.5), std::invalid_argument);
  FracIndex idx(2.0 / 3.0, 3.0);
  EXPECT_TRUE(idx.critical());
  EXPECT_DOUBLE_EQ(idx.conjugate(), 1.5);
}
