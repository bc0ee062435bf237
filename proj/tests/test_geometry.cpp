#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fracsob/geometry.hpp"
#include "fracsob/scenarios.hpp"

using namespace fracsob;

namespace {
constexpr double kPi = std::numbers::pi;

Grid2D torus(int n) { return Grid2D(n, n, 2 * kPi, 2 * kPi); }

// Direct kernel sum of cos z₁, the factor the mollifier applies to cos x₁.
double cosine_factor(const Grid2D& g, double eps) {
  MollifierKernel k(g, eps);
  double s = 0.0;
  const int r = k.radius_nodes();
  for (int dj = -r; dj <= r; ++dj)
    for (int di = -r; di <= r; ++di) s += k.weight(di, dj) * std::cos(di * g.h1()) * g.cell_area();
  return s;
}
}  // namespace

TEST(Isometry, AnalyticScenariosAreIsometric) {
  Grid2D g(128);
  EXPECT_LT(isometry_residual(plane_immersion(g)), 1e-14);
  EXPECT_LT(isometry_residual(cylinder_immersion(torus(128))), 1e-14);
  EXPECT_LT(isometry_residual(ruled_immersion(g)), 1e-12);
  EXPECT_LT(isometry_residual(cone_immersion(g)), 1e-12);
  EXPECT_GT(isometry_residual(graph_immersion(g)), 0.01);
}

TEST(Isometry, CylinderNeedsTwoPiPeriod) { EXPECT_THROW(cylinder_immersion(Grid2D(64)), std::invalid_argument); }

TEST(Jet, PlaneIsFlatAndUndisturbed) {
  GeometryJet j = geometry_jet(plane_immersion(Grid2D(64)), 4.0 / 64);
  EXPECT_LT(sup_norm(metric_defect(j.metric)), 1e-14);
  EXPECT_LT(sup_norm(ii_magnitude(j.form)), 1e-12);
  EXPECT_LT(sup_norm(gamma_magnitude(j.form)), 1e-12);
  EXPECT_EQ(j.form.valid.count(), j.form.valid.size());
}

TEST(Jet, CylinderMatchesMollifiedClosedForm) {
  Grid2D g = torus(128);
  const double eps = 2 * kPi / 32;
  const double m = cosine_factor(g, eps);
  GeometryJet j = geometry_jet(cylinder_immersion(g), eps);
  EXPECT_LT(sup_norm(j.metric.g11 + (-m * m)), 1e-12);
  EXPECT_LT(sup_norm(j.metric.g12), 1e-12);
  EXPECT_LT(sup_norm(j.metric.g22 + (-1.0)), 1e-12);
  EXPECT_NEAR(std::abs(j.form.ii[0](17, 40)), m, 1e-12);
  EXPECT_LT(sup_norm(j.form.ii[1]), 1e-12);
  EXPECT_LT(sup_norm(j.form.ii[2]), 1e-12);
  EXPECT_LT(sup_norm(j.det_ii), 1e-12);
  EXPECT_LT(sup_norm(gamma_magnitude(j.form)), 1e-10);
  EXPECT_NEAR(lp_norm(ii_magnitude(j.form), 3.0), m * std::cbrt(4 * kPi * kPi), 1e-10);
}

TEST(Jet, UnitNormalIsOrthogonalToFrame) {
  GeometryJet j = geometry_jet(graph_immersion(Grid2D(64)), 4.0 / 64);
  EXPECT_LT(sup_norm(magnitude(j.normal) + (-1.0)), 1e-13);
  for (int a = 0; a < 2; ++a) {
    ScalarField d = j.normal[0] * j.du[0][a] + j.normal[1] * j.du[1][a] + j.normal[2] * j.du[2][a];
    EXPECT_LT(sup_norm(d), 1e-13);
  }
}

TEST(Gauss, DeterminantOfSecondFormEqualsCurvatureOnGraph) {
  GeometryJet j = geometry_jet(graph_immersion(Grid2D(128)), 4.0 / 128);
  double scale = sup_norm(j.curvature);
  EXPECT_GT(scale, 1.0);
  EXPECT_LT(sup_norm(j.det_ii - j.curvature), 1e-12 * scale);
  GaussResidual r = gauss_residual(j, bump(Grid2D(128), 0.5, 0.5, 0.3));
  EXPECT_LT(r.residual, 1e-12 * std::abs(r.curvature_pairing) + 1e-14);
}

TEST(Codazzi, CorrectedResidualVanishesWhereRawDoesNot) {
  GeometryJet j = geometry_jet(graph_immersion(Grid2D(128)), 4.0 / 128);
  CodazziResidual c = codazzi_residual(j);
  EXPECT_GT(c.raw_total(), 1.0);
  EXPECT_LT(c.corrected_max(), 1e-12);
}

TEST(Codazzi, ConeRawResidualDecreasesOffApex) {
  Grid2D g(256);
  Cone cone;
  Immersion im = cone_immersion(g, cone);
  Mask region = Mask::annulus(g, 0.5, 0.5, 0.125, cone.cut.exact_radius() - 8 * g.h1());
  std::vector<double> raw;
  for (int k = 4; k >= 0; --k) {
    GeometryJet j = geometry_jet(im, 2 * g.h1() * std::pow(2.0, k / 2.0));
    Mask m = region && j.form.valid;
    raw.push_back(codazzi_residual(j, 1.0, &m).raw_total());
    EXPECT_LT(codazzi_residual(j, 1.0, &m).corrected_max(), 1e-10);
  }
  for (std::size_t k = 1; k < raw.size(); ++k) EXPECT_LT(raw[k], raw[k - 1]);
  EXPECT_NEAR(raw.back(), 0.008034986840013565, 1e-9);  // frozen
}

TEST(Christoffel, JetAndMetricRoutesAgree) {
  GeometryJet j = geometry_jet(graph_immersion(Grid2D(128)), 4.0 / 128);
  FormField viaMetric = christoffel(j.metric);
  for (int c = 0; c < 6; ++c) EXPECT_LT(sup_norm(viaMetric.gamma[c] - j.form.gamma[c]), 1e-10);
  FormField flat = christoffel(identity_metric(Grid2D(32)));
  EXPECT_EQ(sup_norm(gamma_magnitude(flat)), 0.0);
}

TEST(Coherence, HessianSplitsIntoTangentialAndNormalParts) {
  GeometryJet j = geometry_jet(graph_immersion(Grid2D(64)), 4.0 / 64);
  for (int m = 1; m <= 3; ++m) EXPECT_LT(coherence_residual(j, m), 1e-12);
  EXPECT_THROW(coherence_residual(j, 4), std::invalid_argument);
}

TEST(Metric, ConeDefectFrozenOnMaskedAnnulus) {
  Grid2D g(256);
  Cone cone;
  GeometryJet j = geometry_jet(cone_immersion(g, cone), 2 * g.h1());
  Mask m = Mask::annulus(g, 0.5, 0.5, 0.125, cone.cut.exact_radius() - 8 * g.h1()) && j.metric.valid;
  EXPECT_NEAR(sup_norm(metric_defect(j.metric), &m), 0.002805437094582771, 1e-9);
}

TEST(Recover, CylinderFormIsAGradient) {
  GeometryJet j = geometry_jet(cylinder_immersion(torus(128)), 2 * kPi / 32);
  RecoveredPotential r = recover_potential(j.form);
  EXPECT_FALSE(r.warning);
  EXPECT_LT(r.reconstruction, 1e-10);
  // II₁₁ = ±m(ε) everywhere, so f¹ is linear with that slope.
  EXPECT_NEAR(std::abs(r.f[0].drift().a1), cosine_factor(torus(128), 2 * kPi / 32), 1e-12);
}

TEST(Recover, NonCurlFreeFormWarns) {
  Grid2D g(64);
  FormField f;
  f.ii = {random_band_limited(g, 3, 1), random_band_limited(g, 3, 2), random_band_limited(g, 3, 3)};
  f.valid = Mask::full(g);
  EXPECT_TRUE(recover_potential(f).warning);
}

TEST(Developability, PlaneIsFlatEverywhere) {
  Grid2D g(64);
  Classification c = detect_developability(plane_immersion(g), 1e-6);
  EXPECT_EQ(c.count(Label::flat), g.size());
}

TEST(Developability, CylinderRulesAlongAxis) {
  Grid2D g = torus(64);
  Classification c = detect_developability(cylinder_immersion(g), 1e-6);
  EXPECT_EQ(c.count(Label::ruled), g.size());
  for (std::size_t k = 0; k < g.size(); k += 37) {
    EXPECT_LE(angle_gap(c.theta[k], 90.0), 0.5);
    EXPECT_TRUE(c.reaches_boundary[k]);
  }
}

TEST(Developability, RuledScenarioRulingsAtOneThirtyFive) {
  Grid2D g(64);
  Classification c = detect_developability(ruled_immersion(g), 1e-6);
  EXPECT_EQ(c.count(Label::ruled), g.size());
  EXPECT_LE(angle_gap(c.theta[g.index(10, 50)], 135.0), 0.5);
}

TEST(Developability, ConeApexIsTheOnlySingularCluster) {
  Grid2D g(128);
  Classification c = detect_developability(cone_immersion(g), 1e-6);
  EXPECT_LE(c.count(Label::singular), 9u);
  EXPECT_GE(c.count(Label::singular), 1u);
  EXPECT_EQ(c.at(64, 64), Label::singular);
  int i = 64 + 20, j = 64 + 10;
  double radial = std::atan2(10.0, 20.0) * 180.0 / kPi;
  EXPECT_EQ(c.at(i, j), Label::ruled);
  EXPECT_LE(angle_gap(c.theta[g.index(i, j)], radial), 3.0);
  EXPECT_TRUE(c.reaches_boundary[g.index(i, j)]);
}

TEST(Developability, ComponentsAgreeWithRecoveredPotential) {
  Grid2D g = torus(64);
  Immersion im = cylinder_immersion(g);
  RecoveredPotential r = recover_potential(geometry_jet(im, 2 * g.h1()).form);
  Classification ref = detect_developability(r.f, im.window, 1e-6);
  for (int m = 1; m <= 3; ++m)
    EXPECT_GE(constancy_agreement(ref, detect_developability(component_source(im, m), im.window, 1e-6)), 0.95);
  EXPECT_DOUBLE_EQ(constancy_agreement(ref, ref), 1.0);
}

TEST(Developability, AngleGapWrapsModuloHalfTurn) {
  EXPECT_DOUBLE_EQ(angle_gap(179.0, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(angle_gap(90.0, 270.0), 0.0);
  EXPECT_THROW(detect_developability(plane_immersion(Grid2D(16)), 0.0), std::invalid_argument);
}
