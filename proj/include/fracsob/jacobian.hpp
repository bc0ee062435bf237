#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "fracsob/field.hpp"
#include "fracsob/mollify.hpp"
#include "fracsob/spectral.hpp"

namespace fracsob {

struct DistPairing {
  std::vector<std::pair<double, double>> ladder;  // (ε, value)
  double limit = 0.0;
  bool converged = false;
};

// Last-value extrapolation; converged when the last three values spread by
// less than 1e-2 relative to their magnitude (absolute below 1e-12).
inline DistPairing make_pairing(std::vector<std::pair<double, double>> ladder) {
  if (ladder.empty()) throw std::invalid_argument("pairing ladder is empty");
  DistPairing p;
  p.ladder = std::move(ladder);
  p.limit = p.ladder.back().second;
  if (p.ladder.size() >= 3) {
    double lo = 1e300, hi = -1e300, mag = 0.0;
    for (std::size_t k = p.ladder.size() - 3; k < p.ladder.size(); ++k) {
      lo = std::min(lo, p.ladder[k].second);
      hi = std::max(hi, p.ladder[k].second);
      mag = std::max(mag, std::abs(p.ladder[k].second));
    }
    p.converged = (hi - lo) <= std::max(1e-2 * mag, 1e-12);
  }
  return p;
}

inline void require_planar(const VectorField& f) {
  if (f.m() != 2) throw std::invalid_argument("expected a planar map with 2 components");
}

inline ScalarField pointwise_jacobian(const VectorField& f) {
  require_planar(f);
  ScalarField a = spectral_partial(f[0], 0), b = spectral_partial(f[0], 1);
  ScalarField c = spectral_partial(f[1], 0), d = spectral_partial(f[1], 1);
  return a * d - b * c;
}

inline ScalarField curl(const VectorField& f) {
  require_planar(f);
  return spectral_curl(f);
}

inline void require_support_inside(const ScalarField& phi, const Mask& window) {
  require_same_grid(phi.grid(), window.grid());
  Mask interior = window.eroded(1);
  for (std::size_t k = 0; k < phi.size(); ++k)
    if (phi[k] != 0.0 && !interior[k])
      throw std::invalid_argument("test function support touches the window boundary");
}

using TestSequence = std::function<ScalarField(double eps)>;

inline DistPairing dist_jacobian(const VectorField& f, const TestSequence& test, const std::vector<double>& ladder,
                                 const Mask& window) {
  require_planar(f);
  std::vector<std::pair<double, double>> pts;
  for (double eps : ladder) {
    ScalarField phi = test(eps);
    require_support_inside(phi, window);
    ScalarField det = pointwise_jacobian(mollify(f, eps));
    double s = 0.0;
    for (std::size_t k = 0; k < det.size(); ++k) s += det[k] * phi[k];
    pts.emplace_back(eps, s * f.grid().cell_area());
  }
  return make_pairing(std::move(pts));
}

inline DistPairing dist_jacobian(const VectorField& f, const ScalarField& phi, const std::vector<double>& ladder,
                                 const Mask& window) {
  return dist_jacobian(f, [&](double) { return phi; }, ladder, window);
}

// f + δ·(−(x₂ − c₂), x₁ − c₁), carried exactly as an affine drift.
inline VectorField shear_perturb(const VectorField& f, double delta, double c1, double c2) {
  require_planar(f);
  const Grid2D& g = f.grid();
  ScalarField r1 = sample([&](double, double x2) { return -delta * (x2 - c2); }, g, Affine{0.0, -delta});
  ScalarField r2 = sample([&](double x1, double) { return delta * (x1 - c1); }, g, Affine{delta, 0.0});
  return VectorField({f[0] + r1, f[1] + r2});
}

inline VectorField shear_perturb(const VectorField& f, double delta) {
  return shear_perturb(f, delta, f.grid().length1 / 2.0, f.grid().length2 / 2.0);
}

// Closed chain of grid nodes, traversed counter-clockwise for circles.
struct Contour {
  std::vector<std::array<int, 2>> nodes;

  static Contour circle(const Grid2D& g, double c1, double c2, double radius) {
    Contour c;
    const int samples = std::max(16, static_cast<int>(std::ceil(8.0 * std::numbers::pi * radius / std::min(g.h1(), g.h2()))));
    for (int k = 0; k < samples; ++k) {
      double a = 2.0 * std::numbers::pi * k / samples;
      int i = static_cast<int>(std::lround((c1 + radius * std::cos(a)) / g.h1()));
      int j = static_cast<int>(std::lround((c2 + radius * std::sin(a)) / g.h2()));
      if (i < 0 || j < 0 || i >= g.n1 || j >= g.n2)
        throw std::invalid_argument("contour leaves the fundamental domain");
      if (c.nodes.empty() || c.nodes.back() != std::array{i, j}) c.nodes.push_back({i, j});
    }
    if (c.nodes.size() > 1 && c.nodes.front() == c.nodes.back()) c.nodes.pop_back();
    return c;
  }
};

inline int degree(const VectorField& f, const Contour& contour, double y1, double y2) {
  require_planar(f);
  const Grid2D& g = f.grid();
  const std::size_t n = contour.nodes.size();
  if (n < 3) throw std::invalid_argument("contour needs at least 3 nodes");
  std::vector<std::array<double, 2>> img(n), pos(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto [i, j] = contour.nodes[k];
    img[k] = {f[0](i, j) - y1, f[1](i, j) - y2};
    pos[k] = {g.x1(i), g.x2(j)};
  }
  double spacing = 0.0, lip = 0.0, dmin = 1e300, turn = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& a = img[k];
    const auto& b = img[(k + 1) % n];
    double dx = std::hypot(pos[(k + 1) % n][0] - pos[k][0], pos[(k + 1) % n][1] - pos[k][1]);
    spacing = std::max(spacing, dx);
    if (dx > 0) lip = std::max(lip, std::hypot(b[0] - a[0], b[1] - a[1]) / dx);
    dmin = std::min(dmin, std::hypot(a[0], a[1]));
    turn += std::atan2(a[0] * b[1] - a[1] * b[0], a[0] * b[0] + a[1] * b[1]);
  }
  if (!(dmin > 10.0 * spacing * lip))
    throw std::domain_error("degree ill-defined: target too close to the image of the contour");
  double w = turn / (2.0 * std::numbers::pi);
  double r = std::round(w);
  if (std::abs(w - r) >= 0.1) throw std::domain_error("degree ill-defined: winding residue too large");
  return static_cast<int>(r);
}

// Target-side test function sampled at cell centres of a square lattice.
struct TargetFunction {
  std::function<double(double, double)> g;
  double lo1 = 0.0;
  double lo2 = 0.0;
  double size = 1.0;
  int n = 256;

  double cell() const { return size / n; }
  std::array<double, 2> point(int a, int b) const { return {lo1 + (a + 0.5) * cell(), lo2 + (b + 0.5) * cell()}; }
};

struct DegreeFormula {
  double lhs = 0.0;  // ∫ g·deg over the target
  DistPairing rhs;   // Jac(f)[g∘f] on the region
  double residual = 0.0;
};

// Both sides of ∫ g(y) deg(f, D; y) dy = Jac(f)[g∘f] on the disk D(c, R),
// with g∘f_ε as the approximating test sequence.
inline DegreeFormula degree_formula_residual(const VectorField& f, double c1, double c2, double radius,
                                             const TargetFunction& target, const std::vector<double>& ladder) {
  require_planar(f);
  const Grid2D& grid = f.grid();
  Contour contour = Contour::circle(grid, c1, c2, radius);
  DegreeFormula out;
  for (int b = 0; b < target.n; ++b)
    for (int a = 0; a < target.n; ++a) {
      auto y = target.point(a, b);
      double gv = target.g(y[0], y[1]);
      if (gv == 0.0) continue;
      int d;
      try {
        d = degree(f, contour, y[0], y[1]);
      } catch (const std::domain_error&) {
        throw std::invalid_argument("support condition violated: g does not vanish near the image of the boundary");
      }
      out.lhs += gv * d;
    }
  out.lhs *= target.cell() * target.cell();

  Mask region = Mask::disk(grid, c1, c2, radius);
  std::vector<std::pair<double, double>> pts;
  for (double eps : ladder) {
    VectorField fe = mollify(f, eps);
    ScalarField det = pointwise_jacobian(fe);
    double s = 0.0;
    for (int j = 0; j < grid.n2; ++j)
      for (int i = 0; i < grid.n1; ++i) {
        if (!region(i, j)) continue;
        double gv = target.g(fe[0](i, j), fe[1](i, j));
        if (gv != 0.0) s += gv * det(i, j);
      }
    pts.emplace_back(eps, s * grid.cell_area());
  }
  out.rhs = make_pairing(std::move(pts));
  out.residual = std::abs(out.lhs - out.rhs.limit);
  return out;
}

// Area of the union of lattice cells (spacing = grid spacing) met by the
// bounding boxes of the images of all grid cells inside the region.
inline double image_measure(const VectorField& f, const Mask& region) {
  require_planar(f);
  const Grid2D& g = f.grid();
  const double h = std::min(g.h1(), g.h2());
  const double tol = 1e-9;
  std::unordered_set<long long> covered;
  auto key = [](long long a, long long b) { return (a << 32) ^ (b & 0xffffffffLL); };
  for (int j = 0; j + 1 < g.n2; ++j)
    for (int i = 0; i + 1 < g.n1; ++i) {
      if (!region(i, j) || !region(i + 1, j) || !region(i, j + 1) || !region(i + 1, j + 1)) continue;
      double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
      for (int c = 0; c < 2; ++c)
        for (auto [di, dj] : {std::pair{0, 0}, {1, 0}, {0, 1}, {1, 1}}) {
          double v = f[c](i + di, j + dj);
          lo[c] = std::min(lo[c], v);
          hi[c] = std::max(hi[c], v);
        }
      long long a0 = static_cast<long long>(std::floor(lo[0] / h + tol));
      long long a1 = std::max(a0, static_cast<long long>(std::ceil(hi[0] / h - tol)) - 1);
      long long b0 = static_cast<long long>(std::floor(lo[1] / h + tol));
      long long b1 = std::max(b0, static_cast<long long>(std::ceil(hi[1] / h - tol)) - 1);
      for (long long a = a0; a <= a1; ++a)
        for (long long b = b0; b <= b1; ++b) covered.insert(key(a, b));
    }
  return static_cast<double>(covered.size()) * h * h;
}

struct ImageSample {
  VectorField map;
  Mask region;
};

inline std::vector<std::pair<double, double>> image_measure(const std::vector<ImageSample>& ladder) {
  std::vector<std::pair<double, double>> out;
  for (const auto& s : ladder) out.emplace_back(std::min(s.map.grid().h1(), s.map.grid().h2()), image_measure(s.map, s.region));
  return out;
}

}  // namespace fracsob
