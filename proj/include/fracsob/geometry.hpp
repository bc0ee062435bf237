#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fracsob/field.hpp"
#include "fracsob/mollify.hpp"
#include "fracsob/parallel.hpp"
#include "fracsob/sobolev.hpp"
#include "fracsob/spectral.hpp"

namespace fracsob {

using Frame = std::array<std::array<double, 2>, 3>;  // (∂₁u^m, ∂₂u^m) per m
using FrameExpr = std::function<Frame(double, double)>;

struct Immersion {
  VectorField u;          // 3 components, affine drift allowed
  FrameExpr frame;        // analytic derivative, optional
  Mask window;            // where a.e. assertions apply
  std::vector<std::array<double, 2>> singular_points;  // analytic frame undefined here
  std::string name;

  bool has_frame() const { return static_cast<bool>(frame); }
};

struct MetricField {
  ScalarField g11, g12, g22;
  Mask valid;
  bool flagged = false;  // det g ≤ 1/4 somewhere on the window
};

// Γ order: Γ¹₁₁, Γ¹₁₂, Γ¹₂₂, Γ²₁₁, Γ²₁₂, Γ²₂₂.
struct FormField {
  std::array<ScalarField, 3> ii;  // II11, II12, II22
  std::array<ScalarField, 6> gamma;
  Mask valid;
};

inline int sym2(int a, int b) { return a + b; }        // 11, 12, 22 → 0, 1, 2
inline int sym3(int a, int b, int c) { return a + b + c; }  // 111 … 222 → 0 … 3
inline int gamma_index(int l, int a, int b) { return 3 * l + sym2(a, b); }

// Largest entrywise deviation of (∇u)ᵀ∇u from Id over the window, using the
// analytic frame when present.
inline double isometry_residual(const Immersion& im) {
  const Grid2D& g = im.u.grid();
  std::array<VectorField, 3> grads;
  if (!im.has_frame())
    for (int m = 0; m < 3; ++m) grads[m] = gradient(im.u[m], Scheme::spectral);
  double worst = 0.0;
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      if (!im.window(i, j)) continue;
      double x1 = g.x1(i), x2 = g.x2(j);
      bool skip = false;
      for (auto& p : im.singular_points) skip = skip || (std::abs(p[0] - x1) < 1e-12 && std::abs(p[1] - x2) < 1e-12);
      if (skip) continue;
      Frame F;
      if (im.has_frame())
        F = im.frame(x1, x2);
      else
        for (int m = 0; m < 3; ++m) F[m] = {grads[m][0](i, j), grads[m][1](i, j)};
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          double s = 0.0;
          for (int m = 0; m < 3; ++m) s += F[m][a] * F[m][b];
          worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
        }
    }
  return worst;
}

// Every geometric quantity of the mollified immersion u_ε at the nodes, built
// from exact spectral derivatives of u_ε up to third order.
struct GeometryJet {
  double epsilon = 0.0;
  MetricField metric;
  VectorField normal;
  FormField form;
  std::array<ScalarField, 2> codazzi_raw;        // ∂₂II_{i1} − ∂₁II_{i2}
  std::array<ScalarField, 2> codazzi_corrected;  // raw minus II_{l1}Γ^l_{i2} − II_{l2}Γ^l_{i1}
  ScalarField det_ii;
  ScalarField curvature;  // R_2121(𝔤^ε)
  ScalarField leading;    // −½(∂₂₂g₁₁ + ∂₁₁g₂₂ − 2∂₁₂g₁₂)
  std::array<ScalarField, 3> coherence;  // |∂ᵢⱼu^m − Γ^k_ij ∂_k u^m − II_ij n^m|
  std::array<ScalarField, 3> mollified;  // u_ε components
  std::array<std::array<ScalarField, 2>, 3> du;
};

namespace detail {

// Derivative orders (a along axis 1, b along axis 2) needed by the jet.
inline constexpr std::array<std::array<int, 2>, 10> kJetOrders = {
    {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3}}};

inline std::array<std::vector<double>, 10> jet_component(const ScalarField& f, const MollifierKernel& ker) {
  const Grid2D& g = f.grid();
  auto p = f.periodic_part();
  std::vector<cplx> base(p.begin(), p.end());
  fft2(base, g.n1, g.n2, false);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) base[g.index(i, j)] *= ker.symbol(i, j);
  std::array<std::vector<double>, 10> out;
  const double scale = 1.0 / static_cast<double>(g.size());
  for (std::size_t o = 0; o < kJetOrders.size(); ++o) {
    auto [a, b] = kJetOrders[o];
    std::vector<cplx> d(base);
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i) {
        cplx& c = d[g.index(i, j)];
        if ((a > 0 && g.nyquist1(i)) || (b > 0 && g.nyquist2(j))) {
          c = 0.0;
          continue;
        }
        c *= std::pow(cplx(0.0, g.xi1(i)), a) * std::pow(cplx(0.0, g.xi2(j)), b);
      }
    fft2(d, g.n1, g.n2, true);
    out[o].resize(d.size());
    for (std::size_t k = 0; k < d.size(); ++k) out[o][k] = d[k].real() * scale;
  }
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      std::size_t k = g.index(i, j);
      out[0][k] += f.drift().at(g.x1(i), g.x2(j));
      out[1][k] += f.drift().a1;
      out[2][k] += f.drift().a2;
    }
  return out;
}

using V3 = std::array<double, 3>;
inline double dot(const V3& a, const V3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline V3 cross(const V3& a, const V3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace detail

inline GeometryJet geometry_jet(const Immersion& im, double eps) {
  using detail::V3;
  using detail::cross;
  using detail::dot;
  if (im.u.m() != 3) throw std::invalid_argument("immersion needs 3 components");
  const Grid2D& g = im.u.grid();
  MollifierKernel ker(g, eps);
  std::array<std::array<std::vector<double>, 10>, 3> jet;
  for (int m = 0; m < 3; ++m) jet[m] = detail::jet_component(im.u[m], ker);

  GeometryJet out;
  out.epsilon = eps;
  auto blank = [&] { return ScalarField(g); };
  out.metric = {blank(), blank(), blank(), Mask(g, false), false};
  out.normal = VectorField(g, 3);
  out.form.valid = Mask(g, false);
  for (auto& f : out.form.ii) f = blank();
  for (auto& f : out.form.gamma) f = blank();
  for (auto& f : out.codazzi_raw) f = blank();
  for (auto& f : out.codazzi_corrected) f = blank();
  out.det_ii = blank();
  out.curvature = blank();
  out.leading = blank();
  for (auto& f : out.coherence) f = blank();
  for (int m = 0; m < 3; ++m) {
    out.mollified[m] = ScalarField(g, jet[m][0]);
    out.du[m] = {ScalarField(g, jet[m][1]), ScalarField(g, jet[m][2])};
  }

  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      const std::size_t k = g.index(i, j);
      std::array<V3, 2> D;
      std::array<V3, 3> DD;
      std::array<V3, 4> DDD;
      for (int m = 0; m < 3; ++m) {
        D[0][m] = jet[m][1][k], D[1][m] = jet[m][2][k];
        DD[0][m] = jet[m][3][k], DD[1][m] = jet[m][4][k], DD[2][m] = jet[m][5][k];
        for (int t = 0; t < 4; ++t) DDD[t][m] = jet[m][6 + t][k];
      }
      double G[2][2], dG[2][2][2], ddG[2][2][2][2];
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          G[a][b] = dot(D[a], D[b]);
          for (int c = 0; c < 2; ++c) dG[c][a][b] = dot(DD[sym2(c, a)], D[b]) + dot(D[a], DD[sym2(c, b)]);
          for (int c = 0; c < 2; ++c)
            for (int e = 0; e < 2; ++e)
              ddG[c][e][a][b] = dot(DDD[sym3(c, e, a)], D[b]) + dot(DD[sym2(e, a)], DD[sym2(c, b)]) +
                                dot(DD[sym2(c, a)], DD[sym2(e, b)]) + dot(D[a], DDD[sym3(c, e, b)]);
        }
      out.metric.g11[k] = G[0][0], out.metric.g12[k] = G[0][1], out.metric.g22[k] = G[1][1];
      const double det = G[0][0] * G[1][1] - G[0][1] * G[0][1];
      const V3 N = cross(D[0], D[1]);
      const double nn = std::sqrt(dot(N, N));
      const bool in_window = im.window[k];
      if (in_window && !(det > 0.25)) out.metric.flagged = true;
      if (!(det > 0.25) || nn == 0.0) continue;
      out.metric.valid.set(k, in_window);
      out.form.valid.set(k, in_window);

      double Gi[2][2] = {{G[1][1] / det, -G[0][1] / det}, {-G[0][1] / det, G[0][0] / det}};
      double Gam[2][2][2];  // Γ^l_ab
      for (int l = 0; l < 2; ++l)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            double s = 0.0;
            for (int mm = 0; mm < 2; ++mm) s += Gi[l][mm] * (dG[a][mm][b] + dG[b][a][mm] - dG[mm][a][b]);
            Gam[l][a][b] = 0.5 * s;
          }
      V3 n = {N[0] / nn, N[1] / nn, N[2] / nn};
      double II[2][2];
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) II[a][b] = dot(DD[sym2(a, b)], n);
      std::array<V3, 2> dn;
      for (int c = 0; c < 2; ++c) {
        V3 dN = cross(DD[sym2(c, 0)], D[1]);
        V3 t = cross(D[0], DD[sym2(c, 1)]);
        for (int m = 0; m < 3; ++m) dN[m] += t[m];
        double pr = dot(n, dN);
        for (int m = 0; m < 3; ++m) dn[c][m] = (dN[m] - n[m] * pr) / nn;
      }
      double dII[2][2][2];
      for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) dII[c][a][b] = dot(DDD[sym3(c, a, b)], n) + dot(DD[sym2(a, b)], dn[c]);

      // ∂_c Γ^l_ab via Γ^l_ab = g^{lm}(∂_ab u · ∂_m u).
      double dGi[2][2][2];
      for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            double s = 0.0;
            for (int p = 0; p < 2; ++p)
              for (int q = 0; q < 2; ++q) s -= Gi[a][p] * dG[c][p][q] * Gi[q][b];
            dGi[c][a][b] = s;
          }
      double dGam[2][2][2][2];  // [c][l][a][b]
      for (int c = 0; c < 2; ++c)
        for (int l = 0; l < 2; ++l)
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
              double s = 0.0;
              for (int mm = 0; mm < 2; ++mm) {
                double first = dot(DD[sym2(a, b)], D[mm]);
                double dfirst = dot(DDD[sym3(c, a, b)], D[mm]) + dot(DD[sym2(a, b)], DD[sym2(c, mm)]);
                s += dGi[c][l][mm] * first + Gi[l][mm] * dfirst;
              }
              dGam[c][l][a][b] = s;
            }

      for (int a = 0; a < 2; ++a)
        for (int b = a; b < 2; ++b) out.form.ii[sym2(a, b)][k] = II[a][b];
      for (int l = 0; l < 2; ++l)
        for (int a = 0; a < 2; ++a)
          for (int b = a; b < 2; ++b) out.form.gamma[gamma_index(l, a, b)][k] = Gam[l][a][b];
      for (int m = 0; m < 3; ++m) out.normal[m][k] = n[m];

      for (int r = 0; r < 2; ++r) {
        double raw = dII[1][r][0] - dII[0][r][1];
        double corr = 0.0;
        for (int l = 0; l < 2; ++l) corr += II[l][0] * Gam[l][r][1] - II[l][1] * Gam[l][r][0];
        out.codazzi_raw[r][k] = raw;
        out.codazzi_corrected[r][k] = raw - corr;
      }
      out.det_ii[k] = II[0][0] * II[1][1] - II[0][1] * II[1][0];
      double R = 0.0;
      for (int mm = 0; mm < 2; ++mm) {
        double t = dGam[0][mm][1][1] - dGam[1][mm][1][0];
        for (int s = 0; s < 2; ++s) t += Gam[mm][0][s] * Gam[s][1][1] - Gam[mm][1][s] * Gam[s][1][0];
        R += G[0][mm] * t;
      }
      out.curvature[k] = R;
      out.leading[k] = -0.5 * (ddG[1][1][0][0] + ddG[0][0][1][1] - 2.0 * ddG[0][1][0][1]);
      for (int m = 0; m < 3; ++m) {
        double s = 0.0;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            double v = DD[sym2(a, b)][m] - Gam[0][a][b] * D[0][m] - Gam[1][a][b] * D[1][m] - II[a][b] * n[m];
            s += v * v;
          }
        out.coherence[m][k] = std::sqrt(s);
      }
    }
  return out;
}

inline MetricField pullback_metric(const Immersion& im, double eps) { return geometry_jet(im, eps).metric; }

inline std::pair<VectorField, FormField> normal_and_II(const Immersion& im, double eps) {
  GeometryJet jet = geometry_jet(im, eps);
  return {jet.normal, jet.form};
}

// Christoffel symbols of a metric from spectral derivatives of its entries.
inline FormField christoffel(const MetricField& gm) {
  const Grid2D& g = gm.g11.grid();
  const ScalarField* e[2][2] = {{&gm.g11, &gm.g12}, {&gm.g12, &gm.g22}};
  std::array<std::array<std::array<ScalarField, 2>, 2>, 2> d;  // d[c][a][b] = ∂_c g_ab
  for (int a = 0; a < 2; ++a)
    for (int b = a; b < 2; ++b)
      for (int c = 0; c < 2; ++c) d[c][a][b] = d[c][b][a] = spectral_partial(*e[a][b], c);
  FormField out;
  for (auto& f : out.ii) f = ScalarField(g);
  for (auto& f : out.gamma) f = ScalarField(g);
  out.valid = gm.valid;
  for (std::size_t k = 0; k < g.size(); ++k) {
    double G[2][2] = {{gm.g11[k], gm.g12[k]}, {gm.g12[k], gm.g22[k]}};
    double det = G[0][0] * G[1][1] - G[0][1] * G[0][1];
    if (!(det > 0.0)) continue;
    double Gi[2][2] = {{G[1][1] / det, -G[0][1] / det}, {-G[0][1] / det, G[0][0] / det}};
    for (int l = 0; l < 2; ++l)
      for (int a = 0; a < 2; ++a)
        for (int b = a; b < 2; ++b) {
          double s = 0.0;
          for (int m = 0; m < 2; ++m) s += Gi[l][m] * (d[a][m][b][k] + d[b][a][m][k] - d[m][a][b][k]);
          out.gamma[gamma_index(l, a, b)][k] = 0.5 * s;
        }
  }
  return out;
}

inline MetricField identity_metric(const Grid2D& g) { return {ScalarField(g, 1.0), ScalarField(g), ScalarField(g, 1.0), Mask::full(g), false}; }

// Pointwise Frobenius magnitudes used by the rate checks.
inline ScalarField metric_defect(const MetricField& m) {
  std::vector<double> v(m.g11.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    double a = m.g11[k] - 1.0, b = m.g12[k], c = m.g22[k] - 1.0;
    v[k] = std::sqrt(a * a + 2 * b * b + c * c);
  }
  return ScalarField(m.g11.grid(), std::move(v));
}

inline ScalarField gamma_magnitude(const FormField& f) {
  std::vector<double> v(f.gamma[0].size(), 0.0);
  for (int l = 0; l < 2; ++l)
    for (int s = 0; s < 3; ++s) {
      double w = s == 1 ? 2.0 : 1.0;
      const auto& c = f.gamma[3 * l + s];
      for (std::size_t k = 0; k < v.size(); ++k) v[k] += w * c[k] * c[k];
    }
  for (double& x : v) x = std::sqrt(x);
  return ScalarField(f.gamma[0].grid(), std::move(v));
}

inline ScalarField ii_magnitude(const FormField& f) {
  std::vector<double> v(f.ii[0].size());
  for (std::size_t k = 0; k < v.size(); ++k)
    v[k] = std::sqrt(f.ii[0][k] * f.ii[0][k] + 2 * f.ii[1][k] * f.ii[1][k] + f.ii[2][k] * f.ii[2][k]);
  return ScalarField(f.ii[0].grid(), std::move(v));
}

struct GaussResidual {
  double det_pairing = 0.0;        // ∫ det II^ε φ
  double curvature_pairing = 0.0;  // ∫ R_2121(𝔤^ε) φ
  double leading_pairing = 0.0;    // ∫ −½ curlᵀcurl 𝔤^ε φ
  double residual = 0.0;           // |det − curvature|
};

inline double pairing(const ScalarField& a, const ScalarField& phi, const Mask& valid) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (valid[k]) s += a[k] * phi[k];
  return s * a.grid().cell_area();
}

inline GaussResidual gauss_residual(const GeometryJet& jet, const ScalarField& phi) {
  GaussResidual r;
  r.det_pairing = pairing(jet.det_ii, phi, jet.form.valid);
  r.curvature_pairing = pairing(jet.curvature, phi, jet.form.valid);
  r.leading_pairing = pairing(jet.leading, phi, jet.form.valid);
  r.residual = std::abs(r.det_pairing - r.curvature_pairing);
  return r;
}

inline GaussResidual gauss_residual(const Immersion& im, double eps, const ScalarField& phi) {
  return gauss_residual(geometry_jet(im, eps), phi);
}

struct CodazziResidual {
  std::array<double, 2> raw{};
  std::array<double, 2> corrected{};
  double raw_total() const { return raw[0] + raw[1]; }
  double corrected_max() const { return std::max(corrected[0], corrected[1]); }
};

inline CodazziResidual codazzi_residual(const GeometryJet& jet, double r = 1.0, const Mask* region = nullptr) {
  Mask m = region ? (*region && jet.form.valid) : jet.form.valid;
  CodazziResidual c;
  for (int i = 0; i < 2; ++i) {
    c.raw[i] = lp_norm(jet.codazzi_raw[i], r, m);
    c.corrected[i] = lp_norm(jet.codazzi_corrected[i], r, m);
  }
  return c;
}

inline CodazziResidual codazzi_residual(const Immersion& im, double eps, double r = 1.0, const Mask* region = nullptr) {
  return codazzi_residual(geometry_jet(im, eps), r, region);
}

inline double coherence_residual(const GeometryJet& jet, int m, const Mask* region = nullptr) {
  if (m < 1 || m > 3) throw std::invalid_argument("component index must be 1, 2 or 3");
  Mask mk = region ? (*region && jet.form.valid) : jet.form.valid;
  return lp_norm(jet.coherence[m - 1], 1.0, mk);
}

inline double coherence_residual(const Immersion& im, double eps, int m, const Mask* region = nullptr) {
  return coherence_residual(geometry_jet(im, eps), m, region);
}

struct RecoveredPotential {
  VectorField f;
  double curl_norm = 0.0;          // L² norm of curl of the rows of II
  double reconstruction = 0.0;     // ‖∇f − II‖_{L²}
  bool warning = false;            // curl above threshold
};

// Rows of II are recovered as gradients: f_i = div Δ⁻¹(II_i − mean) + mean·x.
inline RecoveredPotential recover_potential(const FormField& form, double curl_threshold = 1e-6) {
  const Grid2D& g = form.ii[0].grid();
  const ScalarField* rows[2][2] = {{&form.ii[0], &form.ii[1]}, {&form.ii[1], &form.ii[2]}};
  RecoveredPotential out;
  std::vector<ScalarField> comps;
  double curl2 = 0.0, rec2 = 0.0;
  for (int i = 0; i < 2; ++i) {
    const ScalarField &w1 = *rows[i][0], &w2 = *rows[i][1];
    const double m1 = w1.mean(), m2 = w2.mean();
    VectorField omega({inv_laplacian(w1 + (-m1)), inv_laplacian(w2 + (-m2))});
    ScalarField fi = divergence(omega);
    ScalarField f = ScalarField::from_periodic(g, fi.values(), Affine{m1, m2});
    ScalarField c = spectral_curl(VectorField({w1, w2}));
    curl2 += std::pow(lp_norm(c, 2.0), 2);
    VectorField gf = gradient(f, Scheme::spectral);
    rec2 += std::pow(lp_norm(gf - VectorField({w1, w2}), 2.0), 2);
    comps.push_back(f);
  }
  out.f = VectorField(std::move(comps));
  out.curl_norm = std::sqrt(curl2);
  out.reconstruction = std::sqrt(rec2);
  out.warning = out.curl_norm > curl_threshold;
  return out;
}

// Pointwise derivative data for developability detection: eval writes dim
// values and returns false where the derivative is undefined.
struct DerivativeSource {
  Grid2D grid;
  int dim = 0;
  std::function<bool(double, double, double*)> eval;
};

inline DerivativeSource frame_source(const Immersion& im) {
  const Grid2D& g = im.u.grid();
  if (im.has_frame()) {
    return {g, 6, [im](double x1, double x2, double* out) {
              for (auto& p : im.singular_points)
                if (std::abs(p[0] - x1) < 1e-12 && std::abs(p[1] - x2) < 1e-12) return false;
              Frame F = im.frame(x1, x2);
              for (int m = 0; m < 3; ++m) out[2 * m] = F[m][0], out[2 * m + 1] = F[m][1];
              return true;
            }};
  }
  std::vector<ScalarField> comps;
  for (int m = 0; m < 3; ++m) {
    VectorField d = gradient(im.u[m], Scheme::spectral);
    comps.push_back(d[0]);
    comps.push_back(d[1]);
  }
  std::vector<std::vector<double>> periodic;
  for (auto& c : comps) periodic.push_back(c.periodic_part());
  return {g, 6, [comps, periodic](double x1, double x2, double* out) {
            for (std::size_t c = 0; c < comps.size(); ++c) out[c] = interpolate(comps[c], x1, x2, &periodic[c]);
            return true;
          }};
}

// ∇u^m alone (m = 1..3).
inline DerivativeSource component_source(const Immersion& im, int m) {
  if (m < 1 || m > 3) throw std::invalid_argument("component index must be 1, 2 or 3");
  DerivativeSource full = frame_source(im);
  return {full.grid, 2, [full, m](double x1, double x2, double* out) {
            double buf[6];
            if (!full.eval(x1, x2, buf)) return false;
            out[0] = buf[2 * (m - 1)], out[1] = buf[2 * (m - 1) + 1];
            return true;
          }};
}

// The field itself (a recovered potential f, or any continuous map).
inline DerivativeSource field_source(const VectorField& f) {
  std::vector<std::vector<double>> periodic;
  for (int c = 0; c < f.m(); ++c) periodic.push_back(f[c].periodic_part());
  return {f.grid(), f.m(), [f, periodic](double x1, double x2, double* out) {
            for (int c = 0; c < f.m(); ++c) out[c] = interpolate(f[c], x1, x2, &periodic[static_cast<std::size_t>(c)]);
            return true;
          }};
}

enum class Label : std::uint8_t { flat, ruled, singular, outside };

struct Classification {
  Grid2D grid;
  std::vector<Label> labels;
  std::vector<double> theta;            // ruling direction in degrees, [0, 180)
  std::vector<char> reaches_boundary;   // ruling line traced to the window edge
  Mask window;
  std::vector<double> slack;            // extra angle tolerance near singular nodes, degrees

  Label at(int i, int j) const { return labels[grid.index(i, j)]; }
  std::size_t count(Label l) const { return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), l)); }
};

inline double angle_gap(double a, double b) {
  double d = std::fmod(std::abs(a - b), 180.0);
  return std::min(d, 180.0 - d);
}

namespace detail {

inline bool compatible(const Classification& c, std::size_t k, double theta, double tol_deg) {
  const double extra = c.slack.empty() ? 0.0 : c.slack[k];
  return c.labels[k] == Label::flat || (c.labels[k] == Label::ruled && angle_gap(c.theta[k], theta) <= tol_deg + extra);
}

// March from node k along ±θ in steps of h/2; the line must stay inside
// compatible nodes (bilinear indicator ≥ ½) until it leaves the window or
// meets a singular node. Periodic windows are traced for one period.
inline bool trace_ruling(const Classification& c, std::size_t k, double theta_deg, double tol_deg, bool periodic) {
  const Grid2D& g = c.grid;
  const int i0 = static_cast<int>(k % static_cast<std::size_t>(g.n1)), j0 = static_cast<int>(k / static_cast<std::size_t>(g.n1));
  const double t = theta_deg * std::numbers::pi / 180.0;
  const double step = 0.5 * std::min(g.h1(), g.h2());
  const int max_steps = periodic ? static_cast<int>(std::ceil(std::max(g.length1, g.length2) / step))
                                 : 4 * (g.n1 + g.n2);
  for (double dir : {1.0, -1.0}) {
    bool left = false;
    for (int s = 1; s <= max_steps && !left; ++s) {
      double y1 = g.x1(i0) + dir * s * step * std::cos(t), y2 = g.x2(j0) + dir * s * step * std::sin(t);
      double f1 = y1 / g.h1(), f2 = y2 / g.h2();
      int a = static_cast<int>(std::floor(f1)), b = static_cast<int>(std::floor(f2));
      double w1 = f1 - a, w2 = f2 - b, ind = 0.0;
      for (int di = 0; di < 2 && !left; ++di)
        for (int dj = 0; dj < 2; ++dj) {
          int ii = a + di, jj = b + dj;
          bool inside = ii >= 0 && jj >= 0 && ii < g.n1 && jj < g.n2;
          if (!inside && !periodic) {
            left = true;
            break;
          }
          ii = g.wrap1(ii), jj = g.wrap2(jj);
          std::size_t q = g.index(ii, jj);
          if (!c.window[q]) { left = true; break; }
          ind += (di ? w1 : 1 - w1) * (dj ? w2 : 1 - w2) * (compatible(c, q, theta_deg, tol_deg) ? 1.0 : 0.0);
        }
      if (!left && ind < 0.5) {
        // A ruling may terminate at a singular point such as a cone apex.
        int ni = g.wrap1(static_cast<int>(std::lround(f1))), nj = g.wrap2(static_cast<int>(std::lround(f2)));
        if (c.labels[g.index(ni, nj)] != Label::singular) return false;
        break;
      }
    }
  }
  return true;
}

}  // namespace detail

// Per-node flat / ruled(θ) / singular labels of the derivative data on the
// window. Ruling directions are traced to the window boundary afterwards;
// trace_tol_deg bounds the angle drift allowed along a traced line.
inline Classification detect_developability(const DerivativeSource& src, const Mask& window, double tol,
                                            double trace_tol_deg = 3.0) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const Grid2D& g = src.grid;
  require_same_grid(g, window.grid());
  Classification out{g, std::vector<Label>(g.size(), Label::outside), std::vector<double>(g.size(), 0.0),
                     std::vector<char>(g.size(), 0), window};
  const int dim = src.dim;
  const double h = std::min(g.h1(), g.h2());
  for_each_chunk(g.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<double> c0(dim), buf(dim);
    for (std::size_t k = begin; k < end; ++k) {
      if (!window[k]) continue;
      const int i = static_cast<int>(k % static_cast<std::size_t>(g.n1)), j = static_cast<int>(k / static_cast<std::size_t>(g.n1));
      const double x1 = g.x1(i), x2 = g.x2(j);
      if (!src.eval(x1, x2, c0.data())) {
        out.labels[k] = Label::singular;
        continue;
      }
      auto dist = [&](double y1, double y2, double& acc) {
        if (!src.eval(y1, y2, buf.data())) return false;
        double d = 0.0;
        for (int c = 0; c < dim; ++c) d += (buf[c] - c0[c]) * (buf[c] - c0[c]);
        acc = d;
        return true;
      };
      double var = 0.0, d;
      for (int dj = -2; dj <= 2; ++dj)
        for (int di = -2; di <= 2; ++di)
          if (dist(x1 + di * g.h1(), x2 + dj * g.h2(), d)) var = std::max(var, std::sqrt(d));
      if (var < tol) {
        out.labels[k] = Label::flat;
        continue;
      }
      auto directional = [&](double deg) {
        const double t = deg * std::numbers::pi / 180.0;
        double acc = 0.0;
        int used = 0;
        for (double st : {-2.0, -1.0, 1.0, 2.0})
          if (dist(x1 + st * h * std::cos(t), x2 + st * h * std::sin(t), d)) acc += d, ++used;
        return used ? std::sqrt(acc / used) : 0.0;
      };
      double vmin = std::numeric_limits<double>::infinity(), vmax = 0.0, best = 0.0;
      for (int c = 0; c < 16; ++c) {
        double v = directional(22.5 * c);
        if (v < vmin) vmin = v, best = 22.5 * c;
        vmax = std::max(vmax, v);
      }
      double lo = best - 22.5, hi = best + 22.5;
      const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
      double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
      double fa = directional(a), fb = directional(b);
      while (hi - lo > 0.5) {
        if (fa <= fb) hi = b, b = a, fb = fa, a = hi - phi * (hi - lo), fa = directional(a);
        else lo = a, a = b, fa = fb, b = lo + phi * (hi - lo), fb = directional(b);
      }
      double refined = 0.5 * (lo + hi), vr = directional(refined);
      if (vr < vmin) vmin = vr, best = refined;
      if (vmax > 0.0 && vmin / vmax < 0.1) {
        out.labels[k] = Label::ruled;
        double th = std::fmod(best, 180.0);
        out.theta[k] = th < 0.0 ? th + 180.0 : th;
      } else {
        out.labels[k] = Label::singular;
      }
    }
  });
  // Rulings converging at a singular point disagree by about h/ρ radians
  // between neighbouring nodes at distance ρ from it.
  std::vector<std::size_t> singular;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (out.labels[k] == Label::singular) singular.push_back(k);
  if (!singular.empty() && singular.size() <= 256) {
    out.slack.assign(g.size(), 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
      double rho = std::numeric_limits<double>::infinity();
      for (std::size_t q : singular) {
        double d1 = std::remainder(g.x1(static_cast<int>(k % g.n1)) - g.x1(static_cast<int>(q % g.n1)), g.length1);
        double d2 = std::remainder(g.x2(static_cast<int>(k / g.n1)) - g.x2(static_cast<int>(q / g.n1)), g.length2);
        rho = std::min(rho, std::hypot(d1, d2));
      }
      out.slack[k] = std::atan2(h, rho) * 180.0 / std::numbers::pi;
    }
  }
  const bool periodic = window.count() == g.size();
  for_each_chunk(g.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k)
      if (out.labels[k] == Label::ruled)
        out.reaches_boundary[k] = detail::trace_ruling(out, k, out.theta[k], trace_tol_deg, periodic);
  });
  return out;
}

inline Classification detect_developability(const Immersion& im, double tol) {
  return detect_developability(frame_source(im), im.window, tol);
}

inline Classification detect_developability(const VectorField& f, const Mask& window, double tol) {
  return detect_developability(field_source(f), window, tol);
}

// Fraction of window nodes where a component's labels are consistent with the
// labels of the reference map: flat reference forces flat, a ruling at θ
// allows flat or a ruling within tol_deg, singular forces singular.
inline double constancy_agreement(const Classification& ref, const Classification& comp, double tol_deg = 3.0) {
  std::size_t total = 0, agree = 0;
  for (std::size_t k = 0; k < ref.labels.size(); ++k) {
    if (ref.labels[k] == Label::outside || comp.labels[k] == Label::outside) continue;
    ++total;
    bool ok = false;
    switch (ref.labels[k]) {
      case Label::flat: ok = comp.labels[k] == Label::flat; break;
      case Label::ruled: ok = detail::compatible(comp, k, ref.theta[k], tol_deg); break;
      case Label::singular: ok = comp.labels[k] == Label::singular; break;
      default: break;
    }
    agree += ok ? 1 : 0;
  }
  return total ? static_cast<double>(agree) / static_cast<double>(total) : 1.0;
}

}  // namespace fracsob
