#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracsob/abscont.hpp"
#include "fracsob/field.hpp"
#include "fracsob/geometry.hpp"

namespace fracsob {

// Smooth radial cutoff ½·erfc((r − R)/σ): equal to one up to roundoff for
// r < R − 6σ and negligible beyond R + 6σ.
struct RadialCutoff {
  double c1 = 0.5;
  double c2 = 0.5;
  double radius = 0.38;
  double width = 0.02;

  double value(double r) const { return 0.5 * std::erfc((r - radius) / width); }
  double derivative(double r) const {
    double z = (r - radius) / width;
    return -std::exp(-z * z) / (std::sqrt(std::numbers::pi) * width);
  }
  double exact_radius() const { return radius - 6.0 * width; }
  double r(double x1, double x2) const { return std::hypot(x1 - c1, x2 - c2); }
};

// Cone u(r,θ) = (½r cos2θ, ½r sin2θ, (√3/2) r) about the cutoff centre,
// localised by the cutoff. grad returns (∂₁u^m, ∂₂u^m).
struct Cone {
  RadialCutoff cut;

  std::array<double, 3> raw(double x1, double x2) const {
    double y1 = x1 - cut.c1, y2 = x2 - cut.c2;
    double r = std::hypot(y1, y2);
    if (r == 0.0) return {0.0, 0.0, 0.0};
    return {0.5 * (y1 * y1 - y2 * y2) / r, y1 * y2 / r, 0.5 * std::sqrt(3.0) * r};
  }

  // Gradient of the unwindowed cone; at the apex the one-sided limit along
  // axis 1 is used.
  std::array<std::array<double, 2>, 3> raw_grad(double x1, double x2) const {
    double y1 = x1 - cut.c1, y2 = x2 - cut.c2;
    double r = std::hypot(y1, y2);
    if (r == 0.0) y1 = 1.0, y2 = 0.0, r = 1.0;
    double c = y1 / r, s = y2 / r;
    // u¹ = ½ r cos2θ, u² = ½ r sin2θ with cos2θ = c² − s², sin2θ = 2cs.
    double c2 = c * c - s * s, s2 = 2 * c * s;
    return {{{0.5 * c2 * c + s2 * s, 0.5 * c2 * s - s2 * c},
             {0.5 * s2 * c - c2 * s, 0.5 * s2 * s + c2 * c},
             {0.5 * std::sqrt(3.0) * c, 0.5 * std::sqrt(3.0) * s}}};
  }

  double value(int m, double x1, double x2) const { return cut.value(cut.r(x1, x2)) * raw(x1, x2)[m]; }

  std::array<double, 2> grad(int m, double x1, double x2) const {
    double r = cut.r(x1, x2);
    double chi = cut.value(r), dchi = cut.derivative(r);
    auto g = raw_grad(x1, x2)[m];
    double u = raw(x1, x2)[m];
    double e1 = r > 0 ? (x1 - cut.c1) / r : 1.0, e2 = r > 0 ? (x2 - cut.c2) / r : 0.0;
    return {chi * g[0] + u * dchi * e1, chi * g[1] + u * dchi * e2};
  }

  ScalarField component(const Grid2D& g, int m) const {
    return sample([&](double x1, double x2) { return value(m, x1, x2); }, g,
                  GradientExpr([c = *this, m](double x1, double x2) { return c.grad(m, x1, x2); }));
  }

  // ∂_k u^m of the unlocalised cone; only meaningful on windows that keep
  // mollifier supports away from the seam.
  ScalarField gradient_component(const Grid2D& g, int m, int k) const {
    return sample([&](double x1, double x2) { return raw_grad(x1, x2)[m][k]; }, g);
  }
};

// |x − c|^{1/3} localised by a radial cutoff.
inline ScalarField cube_root_bump(const Grid2D& g, RadialCutoff cut = {0.5, 0.5, 0.42, 0.02}) {
  return sample([&](double x1, double x2) {
    double r = cut.r(x1, x2);
    return std::cbrt(r) * cut.value(r);
  }, g);
}

// Random trigonometric polynomial with modes |k|∞ ≤ kmax (below Nyquist),
// amplitudes decaying like (1 + |k|²)^{−decay/2}, zero mean.
inline ScalarField random_band_limited(const Grid2D& g, int kmax, std::uint64_t seed, double decay = 1.0) {
  if (2 * kmax >= std::min(g.n1, g.n2)) throw std::invalid_argument("band limit must stay below Nyquist");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  struct Mode {
    int k1, k2;
    double a, b;
  };
  std::vector<Mode> modes;
  for (int k2 = 0; k2 <= kmax; ++k2)
    for (int k1 = -kmax; k1 <= kmax; ++k1) {
      if (k2 == 0 && k1 <= 0) continue;
      double w = std::pow(1.0 + k1 * k1 + k2 * k2, -decay / 2.0);
      modes.push_back({k1, k2, w * normal(rng), w * normal(rng)});
    }
  const double tp = 2.0 * std::numbers::pi;
  return sample(
      [&](double x1, double x2) {
        double v = 0.0;
        for (auto& m : modes) {
          double ph = tp * (m.k1 * x1 / g.length1 + m.k2 * x2 / g.length2);
          v += m.a * std::cos(ph) + m.b * std::sin(ph);
        }
        return v;
      },
      g);
}

inline Immersion plane_immersion(const Grid2D& g) {
  Immersion im;
  im.u = VectorField({sample([](double x1, double) { return x1; }, g, Affine{1.0, 0.0}),
                      sample([](double, double x2) { return x2; }, g, Affine{0.0, 1.0}), ScalarField(g)});
  im.frame = [](double, double) { return Frame{{{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}}}; };
  im.window = Mask::full(g);
  im.name = "plane";
  return im;
}

// (cos x₁, sin x₁, x₂); needs a 2π-periodic first axis.
inline Immersion cylinder_immersion(const Grid2D& g) {
  if (std::abs(g.length1 - 2.0 * std::numbers::pi) > 1e-12)
    throw std::invalid_argument("cylinder needs period 2π along axis 1");
  Immersion im;
  im.u = VectorField({sample([](double x1, double) { return std::cos(x1); }, g),
                      sample([](double x1, double) { return std::sin(x1); }, g),
                      sample([](double, double x2) { return x2; }, g, Affine{0.0, 1.0})});
  im.frame = [](double x1, double) { return Frame{{{-std::sin(x1), 0.0}, {std::cos(x1), 0.0}, {0.0, 1.0}}}; };
  im.window = Mask::full(g);
  im.name = "cylinder";
  return im;
}

// Generalised cylinder (γ(s), t) with s = (x₁+x₂)/√2, t = (x₂−x₁)/√2 and γ a
// unit-speed plane curve of turning angle α = A·sin(2π(x₁+x₂)/L). Rulings run
// along 135°.
inline Immersion ruled_immersion(const Grid2D& g, double amplitude = 0.8) {
  if (std::abs(g.length1 - g.length2) > 1e-12) throw std::invalid_argument("ruled scenario needs a square torus");
  const double L = g.length1, r2 = std::sqrt(2.0);
  const double c = L / (2.0 * std::numbers::pi * r2);
  const double j0 = std::cyl_bessel_j(0.0, amplitude);
  std::vector<double> jk(31);
  for (int k = 1; k <= 30; ++k) jk[k] = std::cyl_bessel_j(static_cast<double>(k), amplitude);
  auto phase = [L](double x1, double x2) { return 2.0 * std::numbers::pi * (x1 + x2) / L; };
  auto gamma1 = [=](double x1, double x2) {
    double ph = phase(x1, x2), v = j0 * (x1 + x2) / r2;
    for (int k = 2; k <= 30; k += 2) v += 2.0 * c * jk[k] * std::sin(k * ph) / k;
    return v;
  };
  auto gamma2 = [=](double x1, double x2) {
    double ph = phase(x1, x2), v = 0.0;
    for (int k = 1; k <= 30; k += 2) v -= 2.0 * c * jk[k] * std::cos(k * ph) / k;
    return v;
  };
  Immersion im;
  im.u = VectorField({sample(gamma1, g, Affine{j0 / r2, j0 / r2}), sample(gamma2, g),
                      sample([=](double x1, double x2) { return (x2 - x1) / r2; }, g, Affine{-1.0 / r2, 1.0 / r2})});
  im.frame = [=](double x1, double x2) {
    double a = amplitude * std::sin(phase(x1, x2));
    double ca = std::cos(a) / r2, sa = std::sin(a) / r2;
    return Frame{{{ca, ca}, {sa, sa}, {-1.0 / r2, 1.0 / r2}}};
  };
  im.window = Mask::full(g);
  im.name = "ruled";
  return im;
}

// Graph (x₁, x₂, a·sin2πx₁·cos2πx₂ + b·cos2πx₁) on a unit torus; not isometric.
inline Immersion graph_immersion(const Grid2D& g, double a = 0.15, double b = 0.05) {
  const double tp = 2.0 * std::numbers::pi;
  Immersion im;
  im.u = VectorField({sample([](double x1, double) { return x1; }, g, Affine{1.0, 0.0}),
                      sample([](double, double x2) { return x2; }, g, Affine{0.0, 1.0}),
                      sample([=](double x1, double x2) {
                        return a * std::sin(tp * x1) * std::cos(tp * x2) + b * std::cos(tp * x1);
                      }, g)});
  im.window = Mask::full(g);
  im.name = "graph";
  return im;
}

// Windowed cone as an immersion; a.e. assertions apply on the exact disk.
inline Immersion cone_immersion(const Grid2D& g, Cone cone = {}) {
  Immersion im;
  im.u = VectorField({cone.component(g, 0), cone.component(g, 1), cone.component(g, 2)});
  im.frame = [cone](double x1, double x2) {
    return Frame{{cone.grad(0, x1, x2), cone.grad(1, x1, x2), cone.grad(2, x1, x2)}};
  };
  im.window = Mask::disk(g, cone.cut.c1, cone.cut.c2, cone.cut.exact_radius());
  im.singular_points = {{cone.cut.c1, cone.cut.c2}};
  im.name = "cone";
  return im;
}

// Planar lacunary curve Σ_k 2^{−αk}(cos, sin)(2^k·2πx + φ_k), k < levels.
// Hölder of order α, hence in W^{s,2} for every s < α.
inline Curve lacunary_curve(std::size_t n, double alpha, int levels = 8, std::uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<double> ph(static_cast<std::size_t>(levels));
  for (double& v : ph) v = phase(rng);
  return Curve::sample(
      [&](double x) {
        double a = 0.0, b = 0.0;
        for (int k = 0; k < levels; ++k) {
          double amp = std::pow(2.0, -alpha * k), arg = std::ldexp(2.0 * std::numbers::pi * x, k) + ph[static_cast<std::size_t>(k)];
          a += amp * std::cos(arg);
          b += amp * std::sin(arg);
        }
        return std::vector<double>{a, b};
      },
      2, n);
}

inline Curve circle_curve(std::size_t n, double radius = 0.5) {
  return Curve::sample(
      [&](double x) {
        return std::vector<double>{radius * std::cos(2.0 * std::numbers::pi * x), radius * std::sin(2.0 * std::numbers::pi * x)};
      },
      2, n);
}

// Vertices of the order-k Hilbert iterate: the 4^k cell centres of the unit
// square in curve order.
inline Curve hilbert_curve(int order) {
  if (order < 1 || order > 12) throw std::invalid_argument("Hilbert order must be in 1..12");
  const std::int64_t side = std::int64_t{1} << order, count = side * side;
  Curve c{2, 1.0 / static_cast<double>(count - 1), {}};
  for (std::int64_t d = 0; d < count; ++d) {
    std::int64_t x = 0, y = 0, t = d;
    for (std::int64_t s = 1; s < side; s *= 2) {
      std::int64_t rx = 1 & (t / 2), ry = 1 & (t ^ rx);
      if (ry == 0) {
        if (rx == 1) x = s - 1 - x, y = s - 1 - y;
        std::swap(x, y);
      }
      x += s * rx;
      y += s * ry;
      t /= 4;
    }
    c.values.push_back((static_cast<double>(x) + 0.5) / static_cast<double>(side));
    c.values.push_back((static_cast<double>(y) + 0.5) / static_cast<double>(side));
  }
  return c;
}

}  // namespace fracsob
