#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fracsob/scenarios.hpp"
#include "fracsob/spectral.hpp"

using namespace fracsob;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double rel(const ScalarField& a, const ScalarField& b) { return sup_norm(a - b) / sup_norm(b); }
}  // namespace

TEST(Laplacian, EigenfunctionSymbol) {
  Grid2D g(32, 32, 2.0, 1.0);
  ScalarField f = sample([](double x, double y) { return std::cos(std::numbers::pi * x) * std::sin(2 * kTwoPi * y); }, g);
  const double k2 = std::numbers::pi * std::numbers::pi + 4 * kTwoPi * kTwoPi;
  EXPECT_LT(rel(laplacian(f), -k2 * f), 1e-12);
  EXPECT_LT(rel(inv_laplacian(f), (-1.0 / k2) * f), 1e-12);
}

TEST(Laplacian, InverseRemovesMean) {
  Grid2D g(64);
  ScalarField f = random_band_limited(g, 8, 3) + 0.7;
  double mean = 0.0;
  ScalarField u = inv_laplacian(f, &mean);
  EXPECT_NEAR(mean, f.mean(), 1e-14);
  EXPECT_NEAR(u.mean(), 0.0, 1e-14);
  EXPECT_LT(sup_norm(laplacian(u) - (f + (-mean))), 1e-11);
}

TEST(Laplacian, InverseRejectsDrift) {
  Grid2D g(16);
  EXPECT_THROW(inv_laplacian(sample([](double x, double) { return x; }, g, Affine{1.0, 0.0})), std::invalid_argument);
}

TEST(Riesz, SquareSumIsMinusIdentityOnZeroMean) {
  Grid2D g(128);
  ScalarField f = random_band_limited(g, 20, 11);
  VectorField r = riesz(f);
  ScalarField rr = riesz(r[0])[0] + riesz(r[1])[1];
  EXPECT_LT(rel(rr, -1.0 * f), 1e-12);
}

TEST(Riesz, PreservesL2NormOfSingleMode) {
  Grid2D g(64);
  ScalarField f = sample([](double x, double y) { return std::sin(kTwoPi * (3 * x + 4 * y)); }, g);
  VectorField r = riesz(f);
  EXPECT_NEAR(lp_norm(r, 2.0), lp_norm(f, 2.0), 1e-12);
  // R₁ sin(k·x) = (k₁/|k|)·cos(k·x)
  EXPECT_NEAR(r[0](5, 7), 0.6 * std::cos(kTwoPi * (3 * g.x1(5) + 4 * g.x2(7))), 1e-12);
}

TEST(DivGrad, InverseHodgeLaplacianRoundTrip) {
  Grid2D g(128);
  ScalarField f = random_band_limited(g, 30, 5);
  ScalarField back = -1.0 * divergence(gradient(inv_hodge_laplacian(f)));
  EXPECT_LT(rel(back, f), 1e-11);
}

TEST(Curl, GradientsAreCurlFree) {
  Grid2D g(64);
  ScalarField f = random_band_limited(g, 10, 9);
  EXPECT_LT(sup_norm(spectral_curl(gradient(f))), 1e-10);
}

TEST(PoissonExtension, SemigroupAndDecay) {
  Grid2D g(64);
  ScalarField f = random_band_limited(g, 8, 21);
  ScalarField a = poisson_extend(poisson_extend(f, 0.01), 0.02), b = poisson_extend(f, 0.03);
  EXPECT_LT(sup_norm(a - b), 1e-13);
  ScalarField s = sample([](double x, double) { return std::sin(kTwoPi * x); }, g);
  EXPECT_NEAR(poisson_extend(s, 0.1)(16, 0), std::exp(-0.1 * kTwoPi), 1e-13);
}

TEST(HeightLadder, RejectsCoarseRatio) {
  HeightLadder h{0.01, 2.5, 10};
  EXPECT_THROW(h.heights(), std::invalid_argument);
}

// For sin(kx) at s = 1/2, p = 2 the integrand is k²e^{−2tk}, so the seminorm
// is √(k/2) = √π for k = 2π.
TEST(ExtensionSeminorm, MatchesClosedFormForSine) {
  Grid2D g(128);
  ScalarField f = sample([](double x, double) { return std::sin(kTwoPi * x); }, g);
  double v = extension_seminorm(f, FracIndex(0.5, 2.0), HeightLadder::defaults(g));
  EXPECT_NEAR(v / std::sqrt(std::numbers::pi), 1.0, 1e-2);
}

// General s at p = 2: k²Γ(2−2s)/(2k)^{2−2s}.
TEST(ExtensionSeminorm, MatchesClosedFormAtTwoThirds) {
  Grid2D g(128);
  ScalarField f = sample([](double x, double) { return std::sin(kTwoPi * x); }, g);
  const double s = 2.0 / 3.0, k = kTwoPi;
  const double exact = std::sqrt(k * k * std::tgamma(2 - 2 * s) / std::pow(2 * k, 2 - 2 * s));
  EXPECT_NEAR(extension_seminorm(f, FracIndex(s, 2.0), HeightLadder::defaults(g)) / exact, 1.0, 2e-2);
}
