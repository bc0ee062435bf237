#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fracsob/field.hpp"
#include "fracsob/jacobian.hpp"
#include "fracsob/mollify.hpp"
#include "fracsob/sobolev.hpp"
#include "fracsob/spectral.hpp"

namespace fracsob {

// w = da + β on the torus. The split uses the wavevector of the spectral
// first derivative (Nyquist entries zeroed), so it is exact to roundoff; modes
// where that wavevector vanishes (the mean and pure Nyquist modes) are
// harmonic and go to β. Hence d*β = −div β = 0.
struct HodgeParts {
  ScalarField a;
  VectorField beta;
  std::array<double, 2> harmonic{};  // mean of w
  double reconstruction_residual = 0.0;  // ‖da + β − w‖_{L²}
};

inline HodgeParts hodge_split(const VectorField& w) {
  require_planar(w);
  if (w[0].has_drift() || w[1].has_drift()) throw std::invalid_argument("one-form must be periodic");
  const Grid2D& g = w.grid();
  std::vector<cplx> w1(w[0].values().begin(), w[0].values().end()), w2(w[1].values().begin(), w[1].values().end());
  fft2(w1, g.n1, g.n2, false);
  fft2(w2, g.n1, g.n2, false);
  std::vector<cplx> a(g.size()), b1(g.size()), b2(g.size());
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      const std::size_t k = g.index(i, j);
      const double k1 = g.nyquist1(i) ? 0.0 : g.xi1(i), k2 = g.nyquist2(j) ? 0.0 : g.xi2(j);
      const double kk = k1 * k1 + k2 * k2;
      if (kk == 0.0) {
        b1[k] = w1[k], b2[k] = w2[k];
        continue;
      }
      const cplx proj = (k1 * w1[k] + k2 * w2[k]) / kk;
      a[k] = cplx(0.0, -1.0) * proj;
      b1[k] = w1[k] - k1 * proj;
      b2[k] = w2[k] - k2 * proj;
    }
  auto back = [&](std::vector<cplx>& v) {
    fft2(v, g.n1, g.n2, true);
    std::vector<double> r(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) r[k] = v[k].real() / static_cast<double>(g.size());
    return ScalarField(g, std::move(r));
  };
  HodgeParts out;
  out.harmonic = {w[0].mean(), w[1].mean()};
  out.a = back(a);
  ScalarField beta1 = back(b1), beta2 = back(b2);
  out.beta = VectorField({beta1, beta2});
  VectorField da = gradient(out.a, Scheme::spectral);
  out.reconstruction_residual = lp_norm(da + out.beta - w, 2.0);
  return out;
}

// Hodge parts of λ·dg.
inline HodgeParts hodge_decompose(const ScalarField& lambda, const ScalarField& g) {
  require_same_grid(lambda.grid(), g.grid());
  if (lambda.has_drift()) throw std::invalid_argument("lambda must be periodic");
  VectorField dg = gradient(g, Scheme::spectral);
  return hodge_split(VectorField({lambda * dg[0], lambda * dg[1]}));
}

// Row-wise version for a vector-valued g.
inline std::vector<HodgeParts> hodge_decompose(const ScalarField& lambda, const VectorField& g) {
  std::vector<HodgeParts> rows;
  for (int r = 0; r < g.m(); ++r) rows.push_back(hodge_decompose(lambda, g[r]));
  return rows;
}

// Hodge parts of the commutator one-form λ_ε df_ε − (λ df)_ε.
inline HodgeParts hodge_difference(const ScalarField& lambda, const ScalarField& f, double eps) {
  require_same_grid(lambda.grid(), f.grid());
  if (lambda.has_drift()) throw std::invalid_argument("lambda must be periodic");
  MollifierKernel ker(f.grid(), eps);
  ScalarField le = mollify(lambda, ker);
  VectorField dfe = gradient(mollify(f, ker), Scheme::spectral);
  VectorField df = gradient(f, Scheme::spectral);
  VectorField w({le * dfe[0] - mollify(lambda * df[0], ker), le * dfe[1] - mollify(lambda * df[1], ker)});
  return hodge_split(w);
}

struct HodgeLadder {
  std::vector<std::pair<double, double>> exact;     // (ε, [a^ε]_{W^{2/3,3}})
  std::vector<std::pair<double, double>> coexact;   // (ε, [β^ε]_{W^{1/3,3/2}})
  double worst_reconstruction = 0.0;
};

inline const FracIndex kExactIndex{2.0 / 3.0, 3.0};
inline const FracIndex kCoexactIndex{1.0 / 3.0, 1.5};

inline HodgeLadder hodge_difference_ladder(const ScalarField& lambda, const ScalarField& f,
                                           const std::vector<double>& ladder) {
  HodgeLadder out;
  for (double eps : ladder) {
    HodgeParts p = hodge_difference(lambda, f, eps);
    out.exact.emplace_back(eps, gagliardo_seminorm(p.a, kExactIndex));
    out.coexact.emplace_back(eps, gagliardo_seminorm(p.beta, kCoexactIndex));
    out.worst_reconstruction = std::max(out.worst_reconstruction, p.reconstruction_residual);
  }
  return out;
}

inline ScalarField wedge(const VectorField& x, const VectorField& y) {
  require_planar(x);
  require_planar(y);
  return x[0] * y[1] - x[1] * y[0];
}

struct DetEstimate {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio() const { return rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0); }
};

// lhs = |∫ da₁∧…∧da_k∧β_{k+1}∧…∧β₂ φ|, rhs = (‖φ‖_∞ + [φ]_{W^{2/3,3}})·Π[a_j]·Π[β_j]
// with the exact parts in W^{2/3,3} and the co-exact ones in W^{1/3,3/2}.
inline DetEstimate det_estimate_check(const std::vector<ScalarField>& a, const std::vector<VectorField>& beta,
                                      const ScalarField& phi) {
  if (a.size() + beta.size() != 2) throw std::invalid_argument("need exactly two forms in two dimensions");
  std::vector<VectorField> forms;
  double rhs = sup_norm(phi) + gagliardo_seminorm(phi, kExactIndex);
  for (const auto& aj : a) {
    forms.push_back(gradient(aj, Scheme::spectral));
    rhs *= gagliardo_seminorm(aj, kExactIndex);
  }
  for (const auto& bj : beta) {
    forms.push_back(bj);
    rhs *= gagliardo_seminorm(bj, kCoexactIndex);
  }
  ScalarField w = wedge(forms[0], forms[1]);
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * phi[k];
  return {std::abs(s * phi.grid().cell_area()), rhs};
}

struct IdentityCheck {
  DistPairing lhs;  // Jac(f)[φ]
  DistPairing rhs;  // Jac(g)[λ²φ]
  double constraint = 0.0;  // ‖∇f − λ∇g‖_{L²}
  bool holds() const {
    return std::abs(lhs.limit - rhs.limit) < std::max(1e-4, 1e-2 * std::abs(lhs.limit));
  }
};

// Jac(f)[φ] against Jac(g)[λ²φ] for a triple with ∇f = λ∇g; λ is mollified
// alongside f and g at each ladder step.
inline IdentityCheck jacobian_identity_check(const ScalarField& lambda, const VectorField& f, const VectorField& g,
                                             const ScalarField& phi, const std::vector<double>& ladder,
                                             const Mask& window, double tolerance = 1e-6) {
  require_planar(f);
  require_planar(g);
  double c2 = 0.0, scale = 0.0;
  for (int r = 0; r < 2; ++r) {
    VectorField df = gradient(f[r], Scheme::spectral), dg = gradient(g[r], Scheme::spectral);
    for (int k = 0; k < 2; ++k) {
      c2 += std::pow(lp_norm(df[k] - lambda * dg[k], 2.0), 2);
      scale += std::pow(lp_norm(df[k], 2.0), 2);
    }
  }
  IdentityCheck out;
  out.constraint = std::sqrt(c2);
  if (out.constraint > tolerance * std::max(1.0, std::sqrt(scale)))
    throw std::invalid_argument("triple does not satisfy grad f = lambda grad g (residual " +
                                std::to_string(out.constraint) + ")");
  out.lhs = dist_jacobian(f, phi, ladder, window);
  out.rhs = dist_jacobian(
      g,
      [&](double eps) {
        ScalarField le = mollify(lambda, eps);
        return le * le * phi;
      },
      ladder, window);
  return out;
}

}  // namespace fracsob
