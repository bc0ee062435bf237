#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fracsob/mollify.hpp"
#include "fracsob/scenarios.hpp"

using namespace fracsob;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST(Kernel, UnitMassAndSymbolAtZero) {
  Grid2D g(64);
  MollifierKernel k(g, 0.1);
  EXPECT_NEAR(k.mass(), 1.0, 1e-14);
  EXPECT_NEAR(k.symbol(0, 0), 1.0, 1e-14);
  EXPECT_EQ(k.weight(7, 0), 0.0);  // 7h > ε
  EXPECT_GT(k.weight(6, 0), 0.0);
  EXPECT_EQ(k.radius_nodes(), 7);
}

TEST(Kernel, RejectsUnderResolvedAndWideRadii) {
  Grid2D g(64);
  EXPECT_THROW(MollifierKernel(g, 1.5 / 64), std::invalid_argument);
  EXPECT_THROW(MollifierKernel(g, 0.3), std::invalid_argument);
  EXPECT_NO_THROW(MollifierKernel(g, 2.0 / 64));
}

TEST(Mollify, PreservesConstantsAndAffineParts) {
  Grid2D g(32);
  EXPECT_LT(sup_norm(mollify(ScalarField(g, 2.5), 0.1) + (-2.5)), 1e-14);
  ScalarField a = sample([](double x, double y) { return 0.7 * x - 0.2 * y; }, g, Affine{0.7, -0.2});
  EXPECT_LT(sup_norm(mollify(a, 0.1) - a), 1e-14);
}

TEST(Mollify, SmoothErrorIsSecondOrder) {
  Grid2D g(256);
  ScalarField f = sample([](double x, double y) { return std::sin(kTwoPi * x) * std::cos(kTwoPi * y); }, g);
  RateFit fit = mollify_rates(f, FracIndex(2.0 / 3.0, 3.0), 0, dyadic_ladder(1.0, 3, 5));
  EXPECT_NEAR(fit.slope, 2.0, 0.05);
}

TEST(Mollify, SymbolMatchesRadialTransformOfSine) {
  // The multiplier on sin(kx) is ∫φ_ε(z)cos(kz₁)dz; compare against direct
  // convolution sums.
  Grid2D g(128);
  const double eps = 0.05;
  MollifierKernel ker(g, eps);
  ScalarField f = sample([](double x, double) { return std::sin(kTwoPi * x); }, g);
  ScalarField fe = mollify(f, ker);
  double direct = 0.0;
  const int r = ker.radius_nodes();
  for (int dj = -r; dj <= r; ++dj)
    for (int di = -r; di <= r; ++di) direct += ker.weight(di, dj) * f(g.wrap1(10 - di), g.wrap2(-dj)) * g.cell_area();
  EXPECT_NEAR(fe(10, 0), direct, 1e-14);
}

TEST(MollifyRates, FrozenConeGradientSlopes) {
  Grid2D g(256);
  Cone cone;
  Mask win = Mask::disk(g, 0.5, 0.5, 0.2);
  ScalarField d = cone.gradient_component(g, 2, 0);
  FracIndex idx(2.0 / 3.0, 3.0);
  auto ladder = dyadic_ladder(1.0, 3, 5);
  EXPECT_NEAR(mollify_rates(d, idx, 0, ladder, &win).slope, 0.56071, 1e-4);
  EXPECT_NEAR(mollify_rates(d, idx, 1, ladder, &win).slope, -0.364936, 1e-4);
  EXPECT_NEAR(mollify_rates(d, idx, 2, ladder, &win).slope, -1.34585, 1e-4);
}

TEST(MollifyRates, RejectsBadOrder) {
  Grid2D g(32);
  EXPECT_THROW(mollify_rates(ScalarField(g), FracIndex(0.5, 2.0), 3, {0.1, 0.09, 0.08, 0.07}), std::invalid_argument);
}

TEST(DerivativeTensor, HessianIsSymmetric) {
  Grid2D g(32);
  ScalarField f = random_band_limited(g, 5, 12);
  VectorField h = derivative_tensor(f, 2);
  EXPECT_EQ(h.m(), 4);
  EXPECT_LT(sup_norm(h[1] - h[2]), 1e-12);
}

TEST(Commutator, VanishesWhenOneFactorIsConstant) {
  Grid2D g(64);
  ScalarField f = random_band_limited(g, 6, 3);
  EXPECT_LT(sup_norm(commutator(f, ScalarField(g, 2.0), 0.1, 0)[0]), 1e-13);
}

TEST(Commutator, DifferenceRepresentationAgrees) {
  Grid2D g(64);
  ScalarField f = random_band_limited(g, 6, 3), h = random_band_limited(g, 6, 4);
  for (double eps : {0.05, 0.1}) EXPECT_LT(sup_norm(commutator(f, h, eps, 0)[0] - commutator_by_differences(f, h, eps)), 1e-12);
}

TEST(Commutator, SmoothRateIsSecondOrder) {
  Grid2D g(256);
  ScalarField f = sample([](double x, double) { return std::sin(kTwoPi * x); }, g);
  ScalarField h = sample([](double x, double y) { return std::cos(kTwoPi * (x + y)); }, g);
  RateFit fit = commutator_rates(f, h, FracIndex(2.0 / 3.0, 3.0), 0, dyadic_ladder(1.0, 3, 5));
  EXPECT_NEAR(fit.slope, 2.0, 0.05);
}

TEST(Commutator, FrozenConeSlopes) {
  Grid2D g(256);
  Cone cone;
  Mask win = Mask::disk(g, 0.5, 0.5, 0.2);
  FracIndex idx(2.0 / 3.0, 3.0);
  RateFit fit = commutator_rates(cone.gradient_component(g, 2, 0), cone.gradient_component(g, 2, 1), idx, 0,
                                 dyadic_ladder(1.0, 3, 5), &win);
  EXPECT_NEAR(fit.slope, 1.2099, 1e-3);
  EXPECT_GE(fit.slope, 2 * idx.s - 0.15);
}

TEST(Vmo, RequiresCriticalPairAndInteriorBalls) {
  Grid2D g(128);
  ScalarField f = random_band_limited(g, 4, 2);
  auto ladder = dyadic_ladder(1.0, 3, 4);
  EXPECT_THROW(vmo_modulus(f, FracIndex(0.5, 2.0), 64, 64, ladder, Mask::full(g)), std::invalid_argument);
  EXPECT_THROW(vmo_modulus(f, FracIndex(2.0 / 3.0, 3.0), 64, 64, ladder, Mask::disk(g, 0.5, 0.5, 0.1)), std::invalid_argument);
}

TEST(Vmo, SmoothFieldOscillationDecays) {
  Grid2D g(128);
  ScalarField f = random_band_limited(g, 4, 2);
  RateFit fit = vmo_modulus(f, FracIndex(2.0 / 3.0, 3.0), 64, 64, dyadic_ladder(1.0, 3, 4), Mask::full(g));
  EXPECT_TRUE(fit.strictly_decreasing());
  EXPECT_GT(fit.slope, 2.0);
}
