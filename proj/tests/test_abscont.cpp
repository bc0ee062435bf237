#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fracsob/abscont.hpp"
#include "fracsob/scenarios.hpp"

using namespace fracsob;

namespace {
Curve segment(std::size_t n) {
  return Curve::sample([](double x) { return std::vector<double>{x, 0.0}; }, 2, n);
}
}  // namespace

TEST(Modulus, ConstantCurveIsZero) {
  Curve c = Curve::sample([](double) { return std::vector<double>{0.3, -1.0}; }, 2, 257);
  EXPECT_EQ(ac_modulus(c, 0.4, 2.0, 0.1), 0.0);
}

TEST(Modulus, IdentityAtUnitExponentIsDelta) {
  Curve c = Curve::sample([](double x) { return std::vector<double>{x}; }, 1, 1025);
  for (double d : {0.5, 0.125, 1.0 / 64}) EXPECT_NEAR(ac_modulus(c, 0.0, 1.0, d), d, 1e-12);
}

TEST(Modulus, DeltaBelowTwoSpacingsRejected) {
  Curve c = segment(65);
  EXPECT_THROW(ac_modulus(c, 0.0, 1.0, 1.0 / 100), std::invalid_argument);
  EXPECT_THROW(ac_modulus(c, -0.1, 1.0, 0.5), std::invalid_argument);
}

TEST(Modulus, MonotoneInDeltaAndUnderRestriction) {
  Curve w = lacunary_curve(2049, 0.75);
  double prev = 0.0;
  for (double d : {1.0 / 256, 1.0 / 64, 1.0 / 16, 1.0 / 4}) {
    double v = ac_modulus(w, 0.4, 2.0, d);
    EXPECT_GE(v, prev);
    prev = v;
  }
  Curve half = w.restrict(0, 1025);
  EXPECT_LE(ac_modulus(half, 0.4, 2.0, 1.0 / 32), ac_modulus(w, 0.4, 2.0, 1.0 / 32));
}

TEST(Modulus, LacunaryLadderFrozen) {
  Curve w = lacunary_curve(2049, 0.75);
  auto lad = ac_modulus_ladder(w, 0.4, 2.0, {1.0 / 8, 1.0 / 32, 1.0 / 128, 1.0 / 512});
  EXPECT_TRUE(ladder_decreasing(lad));
  EXPECT_NEAR(lad[0].second, 16.1, 0.05);
  EXPECT_NEAR(lad[3].second, 0.302, 0.001);
}

TEST(Monotone, TransferToReciprocalExponent) {
  Curve w = lacunary_curve(2049, 0.75);
  MonotoneVerdict v = ac_monotone_check(w, 0.4, 2.0, 0.0, 1.0 / 0.7, {1.0 / 8, 1.0 / 32, 1.0 / 128, 1.0 / 512});
  EXPECT_TRUE(v.pass);
}

TEST(Monotone, IdenticalExponentsGiveIdenticalLadders) {
  Curve w = lacunary_curve(513, 0.75);
  MonotoneVerdict v = ac_monotone_check(w, 0.4, 2.0, 0.4, 2.0, {1.0 / 8, 1.0 / 32});
  EXPECT_EQ(v.source, v.target);
}

TEST(Monotone, ViolatedConditionNamesTheInequality) {
  Curve w = segment(65);
  try {
    ac_monotone_check(w, 0.0, 2.0, 1.0, 2.0, {0.5, 0.25});
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("(1+t~)/(1+t)"), std::string::npos);
  }
  EXPECT_THROW(ac_monotone_check(w, 0.0, 1.0, 0.0, 2.0, {0.5, 0.25}), std::invalid_argument);
}

TEST(Content, SinglePointVanishes) {
  std::vector<double> pt = {0.3, 0.4};
  auto e = hausdorff_content(pt, 2, 1.0, geometric_ladder(0.1, 0.5, 6));
  EXPECT_NEAR(e.value, 0.1 * std::pow(0.5, 5) * std::sqrt(2.0) / 2.0, 1e-15);
}

TEST(Content, SegmentIsOneDimensional) {
  Curve c = segment(4097);
  auto ladder = geometric_ladder(1.0 / 8, 0.5, 6);
  auto one = hausdorff_content(c, 1.0, ladder);
  EXPECT_GE(one.value, 0.5);
  EXPECT_LE(one.value, 2.0);
  auto two = hausdorff_content(c, 2.0, ladder);
  EXPECT_TRUE(ladder_decreasing(two.costs));
}

TEST(Content, MonotoneInThePointSet) {
  Curve c = circle_curve(1025);
  auto ladder = geometric_ladder(1.0 / 8, 0.5, 5);
  Curve part = c.restrict(0, 400);
  for (std::size_t k = 0; k < ladder.size(); ++k)
    EXPECT_LE(hausdorff_content(part, 1.2, ladder).costs[k].second, hausdorff_content(c, 1.2, ladder).costs[k].second);
}

TEST(Content, RejectsEmptyAndShortLadders) {
  EXPECT_THROW(hausdorff_content(std::vector<double>{}, 2, 1.0, geometric_ladder(0.1, 0.5, 5)), std::invalid_argument);
  EXPECT_THROW(hausdorff_content(segment(9), 1.0, {0.1, 0.05, 0.025}), std::invalid_argument);
}

// Order-k iterates have 4^k cell centres filling 4^k cells of side 2^{−k};
// at r = 2^{−j} every box is occupied, cost 4^j·r²/2 = 1/2.
TEST(Content, HilbertIteratesKeepHalfAtExponentTwo) {
  for (int order = 4; order <= 8; ++order) {
    std::vector<double> radii;
    for (int j = 1; j <= order; ++j) radii.push_back(std::ldexp(1.0, -j));
    EXPECT_GE(hausdorff_content(hilbert_curve(order), 2.0, radii).value, 0.5 * (1.0 - 1e-12));
  }
}

TEST(Content, HilbertIsAContinuousLatticePath) {
  Curve h = hilbert_curve(5);
  ASSERT_EQ(h.size(), 1024u);
  for (std::size_t k = 0; k + 1 < h.size(); ++k)
    EXPECT_NEAR(std::hypot(h.at(k + 1)[0] - h.at(k)[0], h.at(k + 1)[1] - h.at(k)[1]), 1.0 / 32, 1e-15);
}

TEST(Dimension, SmoothCurveContentDecreasesAboveReciprocal) {
  DimensionVerdict v = curve_image_dimension(circle_curve(4097), 0.9, 2.0);
  EXPECT_TRUE(v.in_scope);
  EXPECT_TRUE(v.decreasing);
}

TEST(Dimension, OutOfScopeBelowCriticalProduct) {
  DimensionVerdict v = curve_image_dimension(segment(65), 0.5, 2.0);
  EXPECT_FALSE(v.in_scope);
  EXPECT_NE(v.note.find("out of theorem scope"), std::string::npos);
}
