#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fracsob/field.hpp"
#include "fracsob/sobolev.hpp"

namespace fracsob {

// Standard bump exp(−1/(1−|x|²)) scaled to radius ε and renormalised so the
// sampled kernel has discrete mass exactly one.
class MollifierKernel {
 public:
  MollifierKernel(const Grid2D& g, double epsilon) : grid_(g), epsilon_(epsilon) {
    const double h = std::max(g.h1(), g.h2());
    if (!(epsilon >= 2.0 * h - 1e-12 * h))
      throw std::invalid_argument("kernel under-resolved: epsilon " + std::to_string(epsilon) +
                                  " is below two grid spacings");
    if (!(epsilon < std::min(g.length1, g.length2) / 4.0))
      throw std::invalid_argument("mollifier radius must stay below a quarter period");
    weights_.assign(g.size(), 0.0);
    double mass = 0.0;
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i) {
        double z1 = signed_freq(i, g.n1) * g.h1(), z2 = signed_freq(j, g.n2) * g.h2();
        double q = (z1 * z1 + z2 * z2) / (epsilon * epsilon);
        if (q < 1.0) {
          double w = std::exp(-1.0 / (1.0 - q));
          weights_[g.index(i, j)] = w;
          mass += w;
        }
      }
    mass *= g.cell_area();
    for (double& w : weights_) w /= mass;
    std::vector<cplx> t(weights_.begin(), weights_.end());
    for (auto& c : t) c *= g.cell_area();
    fft2(t, g.n1, g.n2, false);
    transform_.resize(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) transform_[k] = t[k].real();
  }

  double epsilon() const { return epsilon_; }
  const Grid2D& grid() const { return grid_; }
  // Kernel value at torus offset index (i, j), density units.
  double weight(int i, int j) const { return weights_[grid_.index(grid_.wrap1(i), grid_.wrap2(j))]; }
  const std::vector<double>& weights() const { return weights_; }
  double symbol(int i, int j) const { return transform_[grid_.index(i, j)]; }
  double mass() const {
    double m = 0.0;
    for (double w : weights_) m += w;
    return m * grid_.cell_area();
  }
  int radius_nodes() const { return static_cast<int>(std::ceil(epsilon_ / std::min(grid_.h1(), grid_.h2()))); }

 private:
  Grid2D grid_;
  double epsilon_;
  std::vector<double> weights_;
  std::vector<double> transform_;
};

inline ScalarField mollify(const ScalarField& f, const MollifierKernel& k) {
  require_same_grid(f.grid(), k.grid());
  auto v = apply_multiplier(f.periodic_part(), f.grid(), [&](int i, int j) -> cplx { return k.symbol(i, j); });
  return ScalarField::from_periodic(f.grid(), std::move(v), f.drift());
}

inline ScalarField mollify(const ScalarField& f, double eps) { return mollify(f, MollifierKernel(f.grid(), eps)); }

inline VectorField mollify(const VectorField& f, double eps) {
  MollifierKernel k(f.grid(), eps);
  std::vector<ScalarField> c;
  for (int m = 0; m < f.m(); ++m) c.push_back(mollify(f[m], k));
  return VectorField(std::move(c));
}

// Geometric ladder ε_k = L·2^{−first−k}, k = 0..count−1.
inline std::vector<double> dyadic_ladder(double length, int first = 3, int count = 5) {
  std::vector<double> eps;
  for (int k = 0; k < count; ++k) eps.push_back(length * std::pow(2.0, -(first + k)));
  return eps;
}

// Second derivatives (∂11, ∂12, ∂22) built from the first-derivative symbols.
inline std::array<ScalarField, 3> hessian(const ScalarField& f) {
  ScalarField d1 = spectral_partial(f, 0), d2 = spectral_partial(f, 1);
  return {spectral_partial(d1, 0), spectral_partial(d1, 1), spectral_partial(d2, 1)};
}

// ∇^k of a scalar field as a tensor field: k = 0 itself, 1 the gradient,
// 2 the full Hessian (∂11, ∂12, ∂21, ∂22).
inline VectorField derivative_tensor(const ScalarField& f, int k) {
  if (k == 0) return VectorField({f});
  if (k == 1) return gradient(f, Scheme::spectral);
  if (k == 2) {
    auto h = hessian(f);
    return VectorField({h[0], h[1], h[1], h[2]});
  }
  throw std::invalid_argument("derivative order must be 0, 1 or 2");
}

inline RateFit mollify_rates(const ScalarField& f, const FracIndex& idx, int k, const std::vector<double>& ladder,
                             const Mask* region = nullptr) {
  if (k < 0 || k > 2) throw std::invalid_argument("derivative order must be 0, 1 or 2");
  std::vector<std::pair<double, double>> pts;
  for (double eps : ladder) {
    ScalarField fe = mollify(f, eps);
    double v = k == 0 ? lp_norm(fe - f, idx.p, region) : lp_norm(derivative_tensor(fe, k), idx.p, region);
    pts.emplace_back(eps, v);
  }
  return fit_rate(std::move(pts));
}

inline VectorField commutator(const ScalarField& f, const ScalarField& g, double eps, int k) {
  require_same_grid(f.grid(), g.grid());
  MollifierKernel ker(f.grid(), eps);
  ScalarField c = mollify(f, ker) * mollify(g, ker) - mollify(f * g, ker);
  return derivative_tensor(c, k);
}

inline RateFit commutator_rates(const ScalarField& f, const ScalarField& g, const FracIndex& idx, int k,
                                const std::vector<double>& ladder, const Mask* region = nullptr) {
  std::vector<std::pair<double, double>> pts;
  for (double eps : ladder) pts.emplace_back(eps, lp_norm(commutator(f, g, eps, k), idx.p / 2.0, region));
  return fit_rate(std::move(pts));
}

// Direct-sum evaluation of (f_ε−f)(g_ε−g) − Σ_z δ_z f δ_z g φ_ε(z) h², with
// δ_z f(y) = f(y−z) − f(y) on the torus.
inline ScalarField commutator_by_differences(const ScalarField& f, const ScalarField& g, double eps) {
  require_same_grid(f.grid(), g.grid());
  if (f.has_drift() || g.has_drift()) throw std::invalid_argument("commutator needs periodic fields");
  const Grid2D& G = f.grid();
  MollifierKernel ker(G, eps);
  ScalarField fe = mollify(f, ker), ge = mollify(g, ker);
  const int r = ker.radius_nodes();
  ScalarField out(G);
  for (int j = 0; j < G.n2; ++j)
    for (int i = 0; i < G.n1; ++i) {
      double s = 0.0;
      const double fy = f(i, j), gy = g(i, j);
      for (int dj = -r; dj <= r; ++dj)
        for (int di = -r; di <= r; ++di) {
          double w = ker.weight(di, dj);
          if (w == 0.0) continue;
          int ii = G.wrap1(i - di), jj = G.wrap2(j - dj);
          s += (f(ii, jj) - fy) * (g(ii, jj) - gy) * w;
        }
      out(i, j) = (fe(i, j) - fy) * (ge(i, j) - gy) - s * G.cell_area();
    }
  return out;
}

// Mean oscillation ⨍_{B_ε(x)} |f − f_ε(x)|^{2/s} along the ladder at node x.
inline RateFit vmo_modulus(const ScalarField& f, const FracIndex& idx, int i0, int j0,
                           const std::vector<double>& ladder, const Mask& window) {
  if (!idx.critical(2)) throw std::invalid_argument("vmo_modulus needs the critical pairing s*p = 2");
  const Grid2D& g = f.grid();
  require_same_grid(g, window.grid());
  const double q = 2.0 / idx.s;
  const auto periodic = f.periodic_part();
  std::vector<std::pair<double, double>> pts;
  for (double eps : ladder) {
    const double centre = mollify(f, eps)(i0, j0);
    const int r = static_cast<int>(std::ceil(eps / std::min(g.h1(), g.h2())));
    double acc = 0.0;
    int count = 0;
    for (int dj = -r; dj <= r; ++dj)
      for (int di = -r; di <= r; ++di) {
        double z1 = di * g.h1(), z2 = dj * g.h2();
        if (z1 * z1 + z2 * z2 >= eps * eps) continue;
        int ii = g.wrap1(i0 + di), jj = g.wrap2(j0 + dj);
        if (!window(ii, jj)) throw std::invalid_argument("averaging ball exits the window");
        double v = periodic[g.index(ii, jj)] + f.drift().at(g.x1(i0) + z1, g.x2(j0) + z2);
        acc += std::pow(std::abs(v - centre), q);
        ++count;
      }
    pts.emplace_back(eps, acc / count);
  }
  return fit_rate(std::move(pts));
}

}  // namespace fracsob
