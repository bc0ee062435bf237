#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fracsob/geometry.hpp"
#include "fracsob/hodge.hpp"
#include "fracsob/scenarios.hpp"

using namespace fracsob;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

ScalarField g_test(const Grid2D& g) {
  return sample([](double x, double y) { return std::sin(kTwoPi * x) * std::cos(2 * kTwoPi * y) + 0.3 * std::cos(kTwoPi * y); }, g);
}
}  // namespace

TEST(HodgeSplit, ExactFormHasNoCoexactPart) {
  Grid2D g(64);
  ScalarField f = g_test(g);
  HodgeParts p = hodge_decompose(ScalarField(g, 1.0), f);
  EXPECT_LT(sup_norm(p.beta[0]) + sup_norm(p.beta[1]), 1e-12);
  EXPECT_LT(sup_norm(p.a - f), 1e-12);
  HodgeParts three = hodge_decompose(ScalarField(g, 3.0), f);
  EXPECT_LT(sup_norm(three.a - 3.0 * f), 1e-12);
}

TEST(HodgeSplit, RotatedGradientIsPurelyCoexact) {
  Grid2D g(64);
  VectorField d = gradient(g_test(g));
  HodgeParts p = hodge_split(VectorField({-1.0 * d[1], d[0]}));
  EXPECT_LT(sup_norm(p.a), 1e-12);
  EXPECT_LT(p.reconstruction_residual, 1e-12);
}

TEST(HodgeSplit, HarmonicPartIsTheMean) {
  Grid2D g(32);
  VectorField w({ScalarField(g, 0.4) + g_test(g), ScalarField(g, -1.2)});
  HodgeParts p = hodge_split(w);
  EXPECT_NEAR(p.harmonic[0], 0.4, 1e-12);
  EXPECT_NEAR(p.harmonic[1], -1.2, 1e-12);
  EXPECT_NEAR(p.beta[1].mean(), -1.2, 1e-12);
}

TEST(HodgeSplit, BumpWeightedFormFrozen) {
  Grid2D g(128);
  ScalarField lambda = bump(g, 0.5, 0.5, 0.3) + 0.5;
  HodgeParts p = hodge_decompose(lambda, g_test(g));
  EXPECT_LT(p.reconstruction_residual, 1e-12);
  EXPECT_LT(sup_norm(divergence(p.beta)), 1e-10);
  EXPECT_LT(sup_norm(spectral_curl(gradient(p.a))), 1e-10);
  EXPECT_NEAR(lp_norm(p.beta, 2.0), 0.3209611573, 1e-9);
  EXPECT_NEAR(lp_norm(gradient(p.a), 2.0), 3.839862849, 1e-8);
}

TEST(HodgeSplit, OrthogonalPartsAddInL2) {
  Grid2D g(64);
  ScalarField lambda = random_band_limited(g, 3, 7) + 2.0;
  ScalarField f = random_band_limited(g, 5, 8);
  HodgeParts p = hodge_decompose(lambda, f);
  VectorField df = gradient(f);
  VectorField w({lambda * df[0], lambda * df[1]});
  double a2 = std::pow(lp_norm(gradient(p.a), 2.0), 2), b2 = std::pow(lp_norm(p.beta, 2.0), 2);
  EXPECT_NEAR(a2 + b2, std::pow(lp_norm(w, 2.0), 2), 1e-10 * (a2 + b2));
}

TEST(HodgeSplit, RejectsDriftAndNonPlanar) {
  Grid2D g(16);
  EXPECT_THROW(hodge_split(VectorField({sample([](double x, double) { return x; }, g, Affine{1.0, 0.0}), ScalarField(g)})),
               std::invalid_argument);
  EXPECT_THROW(hodge_split(VectorField(g, 3)), std::invalid_argument);
}

TEST(HodgeSplit, RowWiseVersion) {
  Grid2D g(32);
  VectorField rows({g_test(g), ScalarField(g)});
  auto parts = hodge_decompose(ScalarField(g, 2.0), rows);
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_LT(sup_norm(parts[1].a), 1e-14);
}

TEST(HodgeDifference, SmoothLaddersDecayQuadratically) {
  Grid2D g(128);
  ScalarField lambda = sample([](double x, double y) { return 1 + 0.3 * std::sin(kTwoPi * x) * std::sin(kTwoPi * y); }, g);
  ScalarField f = sample([](double x, double y) { return std::cos(kTwoPi * x + 0.4) * std::sin(2 * kTwoPi * y); }, g);
  HodgeLadder l = hodge_difference_ladder(lambda, f, dyadic_ladder(1.0, 3, 4));
  EXPECT_LT(l.worst_reconstruction, 1e-12);
  EXPECT_NEAR(l.exact.back().second, 0.0019399809150189033, 1e-10);  // frozen
  EXPECT_NEAR(l.coexact.back().second, 0.01416608362947888, 1e-9);   // frozen
  std::vector<std::pair<double, double>> e = l.exact;
  EXPECT_NEAR(fit_rate(e).slope, 1.9, 0.15);
}

TEST(HodgeDifference, ConstantLambdaLeavesNothing) {
  Grid2D g(64);
  HodgeParts p = hodge_difference(ScalarField(g, 2.0), g_test(g), 0.1);
  EXPECT_LT(sup_norm(p.a), 1e-12);
  EXPECT_LT(lp_norm(p.beta, 2.0), 1e-12);
}

TEST(DetEstimate, WedgeOfGradientsIsTheJacobian) {
  Grid2D g(64);
  ScalarField a = random_band_limited(g, 4, 1), b = random_band_limited(g, 4, 2);
  EXPECT_LT(sup_norm(wedge(gradient(a), gradient(b)) - pointwise_jacobian(VectorField({a, b}))), 1e-10);
  EXPECT_LT(sup_norm(wedge(gradient(a), gradient(a))), 1e-14);
}

TEST(DetEstimate, RequiresExactlyTwoForms) {
  Grid2D g(32);
  EXPECT_THROW(det_estimate_check({ScalarField(g)}, {}, bump(g, 0.5, 0.5, 0.3)), std::invalid_argument);
}

TEST(DetEstimate, RatioBoundedByFrozenConstant) {
  Grid2D g(64);
  ScalarField phi = bump(g, 0.5, 0.5, 0.35);
  for (int s = 0; s < 6; ++s) {
    ScalarField a = random_band_limited(g, 6, 300 + s, 2.0);
    VectorField beta = hodge_decompose(random_band_limited(g, 4, 400 + s, 2.0) + 3.0, random_band_limited(g, 6, 500 + s, 2.0)).beta;
    DetEstimate d = det_estimate_check({a}, {beta}, phi);
    EXPECT_GT(d.rhs, 0.0);
    EXPECT_LE(d.ratio(), 0.0423);
  }
}

TEST(JacobianIdentity, ConstantLambdaExact) {
  Grid2D g(64);
  ScalarField phi = bump(g, 0.5, 0.5, 0.3);
  VectorField base({random_band_limited(g, 3, 1), random_band_limited(g, 3, 2)});
  IdentityCheck c = jacobian_identity_check(ScalarField(g, 2.0), 2.0 * base, base, phi, dyadic_ladder(1.0, 3, 3), Mask::full(g));
  EXPECT_NEAR(c.lhs.limit, c.rhs.limit, 1e-12);
  EXPECT_TRUE(c.holds());
  EXPECT_LT(c.constraint, 1e-12);
}

TEST(JacobianIdentity, RejectsTripleViolatingConstraint) {
  Grid2D g(32);
  VectorField base({random_band_limited(g, 3, 1), random_band_limited(g, 3, 2)});
  EXPECT_THROW(jacobian_identity_check(ScalarField(g, 2.0), base, base, bump(g, 0.5, 0.5, 0.3), {0.1, 0.08, 0.07},
                                       Mask::full(g)),
               std::invalid_argument);
}

TEST(JacobianIdentity, CylinderCoherenceTripleVanishes) {
  const double L = kTwoPi;
  Grid2D g(64, 64, L, L);
  Immersion im = cylinder_immersion(g);
  GeometryJet j = geometry_jet(im, L / 16);
  RecoveredPotential r = recover_potential(j.form);
  ScalarField phi = bump(g, L / 2, L / 2, L / 4);
  for (int m = 1; m <= 3; ++m) {
    IdentityCheck c = jacobian_identity_check(j.normal[m - 1], VectorField({j.du[m - 1][0], j.du[m - 1][1]}), r.f, phi,
                                              dyadic_ladder(L, 3, 3), Mask::full(g));
    EXPECT_LT(std::abs(c.lhs.limit), 1e-10);
    EXPECT_LT(std::abs(c.rhs.limit), 1e-10);
  }
}
