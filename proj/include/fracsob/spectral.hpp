#pragma once

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fracsob/field.hpp"

namespace fracsob {

inline double wavenumber_norm(const Grid2D& g, int i, int j) { return std::hypot(g.xi1(i), g.xi2(j)); }

// Standard Laplacian, symbol −|ξ|².
inline ScalarField laplacian(const ScalarField& f) {
  const Grid2D& g = f.grid();
  return ScalarField(g, apply_multiplier(f.periodic_part(), g, [&](int i, int j) -> cplx {
                       double k = wavenumber_norm(g, i, j);
                       return -k * k;
                     }));
}

// Inverse of the standard Laplacian on zero-mean fields, so that
// laplacian(inv_laplacian(f)) = f − mean(f). The removed mean is reported.
inline ScalarField inv_laplacian(const ScalarField& f, double* removed_mean = nullptr) {
  if (f.has_drift()) throw std::invalid_argument("inv_laplacian needs a periodic field");
  const Grid2D& g = f.grid();
  if (removed_mean) *removed_mean = f.mean();
  return ScalarField(g, apply_multiplier(f.values(), g, [&](int i, int j) -> cplx {
                       if (i == 0 && j == 0) return 0.0;
                       double k = wavenumber_norm(g, i, j);
                       return -1.0 / (k * k);
                     }));
}

// Inverse of the positive (Hodge) Laplacian dd* + d*d, symbol |ξ|⁻².
inline ScalarField inv_hodge_laplacian(const ScalarField& f, double* removed_mean = nullptr) {
  return -1.0 * inv_laplacian(f, removed_mean);
}

inline VectorField riesz(const ScalarField& f) {
  if (f.has_drift()) throw std::invalid_argument("riesz needs a periodic field");
  const Grid2D& g = f.grid();
  std::vector<ScalarField> comps;
  for (int axis = 0; axis < 2; ++axis) {
    comps.emplace_back(g, apply_multiplier(f.values(), g, [&](int i, int j) -> cplx {
                         if (i == 0 && j == 0) return 0.0;
                         if (axis == 0 ? g.nyquist1(i) : g.nyquist2(j)) return 0.0;
                         double k = wavenumber_norm(g, i, j);
                         return cplx(0.0, (axis == 0 ? g.xi1(i) : g.xi2(j)) / k);
                       }));
  }
  return VectorField(std::move(comps));
}

inline ScalarField divergence(const VectorField& f) {
  if (f.m() != 2) throw std::invalid_argument("divergence needs a planar vector field");
  return spectral_partial(f[0], 0) + spectral_partial(f[1], 1);
}

// Scalar curl ∂₁f² − ∂₂f¹.
inline ScalarField spectral_curl(const VectorField& f) {
  if (f.m() != 2) throw std::invalid_argument("curl needs a planar vector field");
  return spectral_partial(f[1], 0) - spectral_partial(f[0], 1);
}

struct HeightLadder {
  double t_min = 0.0;
  double ratio = 1.3;
  int count = 32;

  static HeightLadder defaults(const Grid2D& g) { return {std::min(g.h1(), g.h2()) / 4.0, 1.3, 32}; }

  void validate() const {
    if (count <= 0) throw std::invalid_argument("height ladder is empty");
    if (!(t_min > 0.0)) throw std::invalid_argument("height ladder needs positive heights");
    if (!(ratio > 1.0)) throw std::invalid_argument("height ladder ratio must exceed 1");
    if (ratio > 2.0) throw std::invalid_argument("height ladder too coarse: ratio exceeds 2");
  }

  std::vector<double> heights() const {
    validate();
    std::vector<double> t(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) t[static_cast<std::size_t>(k)] = t_min * std::pow(ratio, k);
    return t;
  }
};

inline ScalarField poisson_extend(const ScalarField& f, double t) {
  const Grid2D& g = f.grid();
  auto v = apply_multiplier(f.periodic_part(), g, [&](int i, int j) -> cplx {
    return std::exp(-t * wavenumber_norm(g, i, j));
  });
  return ScalarField::from_periodic(g, std::move(v), f.drift());
}

inline std::vector<ScalarField> poisson_extension(const ScalarField& f, const HeightLadder& ladder) {
  std::vector<ScalarField> out;
  for (double t : ladder.heights()) out.push_back(poisson_extend(f, t));
  return out;
}

// (∫∫ |t^{1−1/p−s} D f^h|^p dt dx)^{1/p} with D the full space-height gradient.
inline double extension_seminorm(const ScalarField& f, const FracIndex& idx, const HeightLadder& ladder) {
  if (f.has_drift()) throw std::invalid_argument("extension_seminorm needs a periodic field");
  const Grid2D& g = f.grid();
  const auto heights = ladder.heights();
  const double p = idx.p;
  const double a = p - 1.0 - idx.s * p;

  std::vector<cplx> base(f.values().begin(), f.values().end());
  fft2(base, g.n1, g.n2, false);
  const double scale = 1.0 / static_cast<double>(g.size());

  auto layer = [&](double t) {
    std::vector<cplx> d1(base.size()), d2(base.size()), dt(base.size());
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i) {
        std::size_t k = g.index(i, j);
        double kn = wavenumber_norm(g, i, j);
        cplx c = base[k] * std::exp(-t * kn);
        d1[k] = g.nyquist1(i) ? 0.0 : c * cplx(0.0, g.xi1(i));
        d2[k] = g.nyquist2(j) ? 0.0 : c * cplx(0.0, g.xi2(j));
        dt[k] = -kn * c;
      }
    fft2(d1, g.n1, g.n2, true);
    fft2(d2, g.n1, g.n2, true);
    fft2(dt, g.n1, g.n2, true);
    double acc = 0.0;
    for (std::size_t k = 0; k < base.size(); ++k) {
      double x = d1[k].real() * scale, y = d2[k].real() * scale, z = dt[k].real() * scale;
      double m = std::sqrt(x * x + y * y + z * z);
      acc += p == 2.0 ? m * m : std::pow(m, p);
    }
    return acc * g.cell_area();
  };

  const double log_r = std::log(ladder.ratio);
  double total = 0.0;
  double first = 0.0, last = 0.0;
  for (std::size_t k = 0; k < heights.size(); ++k) {
    double layer_k = layer(heights[k]);
    if (k == 0) first = layer_k;
    last = layer_k;
    total += std::pow(heights[k], a + 1.0) * layer_k * log_r;
  }
  // Below the ladder the layer integral is frozen at its first value.
  const double t_lo = heights.front() / std::sqrt(ladder.ratio);
  total += first * std::pow(t_lo, a + 1.0) / (a + 1.0);
  // Above the ladder only the slowest mode survives; its decay is exact.
  const double t_hi = heights.back() * std::sqrt(ladder.ratio);
  const double xi_min = 2.0 * std::numbers::pi / std::max(g.length1, g.length2);
  const double c = p * xi_min;
  if (last > 0.0) {
    double tail = std::exp(c * heights.back()) * std::pow(c, -(a + 1.0)) * boost::math::tgamma(a + 1.0, c * t_hi);
    total += last * tail;
  }
  return std::pow(total, 1.0 / p);
}

}  // namespace fracsob
