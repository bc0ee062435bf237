#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fracsob/fft.hpp"

namespace fracsob {

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

struct Grid2D {
  int n1 = 0;
  int n2 = 0;
  double length1 = 1.0;
  double length2 = 1.0;

  Grid2D() = default;
  explicit Grid2D(int n, double length = 1.0) : Grid2D(n, n, length, length) {}
  Grid2D(int n1_, int n2_, double l1, double l2) : n1(n1_), n2(n2_), length1(l1), length2(l2) {
    if (n1 < 8 || n2 < 8 || !is_power_of_two(n1) || !is_power_of_two(n2))
      throw std::invalid_argument("grid sizes must be powers of two and at least 8, got " +
                                  std::to_string(n1) + "x" + std::to_string(n2));
    if (!(l1 > 0.0) || !(l2 > 0.0) || !std::isfinite(l1) || !std::isfinite(l2))
      throw std::invalid_argument("grid length must be positive and finite");
  }

  double h1() const { return length1 / n1; }
  double h2() const { return length2 / n2; }
  double cell_area() const { return h1() * h2(); }
  double area() const { return length1 * length2; }
  std::size_t size() const { return static_cast<std::size_t>(n1) * n2; }
  double x1(int i) const { return i * h1(); }
  double x2(int j) const { return j * h2(); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * n1 + i; }
  int wrap1(int i) const { return ((i % n1) + n1) % n1; }
  int wrap2(int j) const { return ((j % n2) + n2) % n2; }
  bool valid() const { return n1 > 0 && n2 > 0; }

  // Wavenumbers of spectral index (i, j).
  double xi1(int i) const { return 2.0 * std::numbers::pi * signed_freq(i, n1) / length1; }
  double xi2(int j) const { return 2.0 * std::numbers::pi * signed_freq(j, n2) / length2; }
  bool nyquist1(int i) const { return i == n1 / 2; }
  bool nyquist2(int j) const { return j == n2 / 2; }

  bool operator==(const Grid2D&) const = default;
};

// Exact affine part a·x of a field whose remainder is periodic. Samples store
// the full value on the fundamental domain [0, L)².
struct Affine {
  double a1 = 0.0;
  double a2 = 0.0;
  bool zero() const { return a1 == 0.0 && a2 == 0.0; }
  double at(double x1, double x2) const { return a1 * x1 + a2 * x2; }
  Affine operator+(const Affine& o) const { return {a1 + o.a1, a2 + o.a2}; }
  Affine operator*(double c) const { return {c * a1, c * a2}; }
  bool operator==(const Affine&) const = default;
};

using ScalarExpr = std::function<double(double, double)>;
using GradientExpr = std::function<std::array<double, 2>(double, double)>;

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid2D& grid, double fill = 0.0)
      : grid_(grid), values_(grid.size(), fill) {}
  ScalarField(const Grid2D& grid, std::vector<double> values, Affine drift = {})
      : grid_(grid), values_(std::move(values)), drift_(drift) {
    if (values_.size() != grid_.size())
      throw std::invalid_argument("sample count " + std::to_string(values_.size()) +
                                  " does not match grid size " + std::to_string(grid_.size()));
  }

  const Grid2D& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }

  const Affine& drift() const { return drift_; }
  bool has_drift() const { return !drift_.zero(); }

  std::vector<double> periodic_part() const {
    std::vector<double> p(values_);
    if (drift_.zero()) return p;
    for (int j = 0; j < grid_.n2; ++j)
      for (int i = 0; i < grid_.n1; ++i)
        p[grid_.index(i, j)] -= drift_.at(grid_.x1(i), grid_.x2(j));
    return p;
  }

  static ScalarField from_periodic(const Grid2D& grid, std::vector<double> periodic, Affine drift) {
    if (!drift.zero())
      for (int j = 0; j < grid.n2; ++j)
        for (int i = 0; i < grid.n1; ++i) periodic[grid.index(i, j)] += drift.at(grid.x1(i), grid.x2(j));
    return ScalarField(grid, std::move(periodic), drift);
  }

  ScalarField with_gradient(GradientExpr g) const {
    ScalarField out(*this);
    out.gradient_ = std::make_shared<const GradientExpr>(std::move(g));
    return out;
  }
  const GradientExpr* analytic_gradient() const { return gradient_.get(); }

  double mean() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return values_.empty() ? 0.0 : s / static_cast<double>(values_.size());
  }

  void check_finite() const {
    for (int j = 0; j < grid_.n2; ++j)
      for (int i = 0; i < grid_.n1; ++i)
        if (!std::isfinite((*this)(i, j)))
          throw std::domain_error("non-finite sample at node (" + std::to_string(i) + ", " +
                                  std::to_string(j) + ")");
  }

 private:
  Grid2D grid_;
  std::vector<double> values_;
  Affine drift_;
  std::shared_ptr<const GradientExpr> gradient_;
};

inline void require_same_grid(const Grid2D& a, const Grid2D& b) {
  if (!(a == b)) throw std::invalid_argument("fields live on different grids");
}

inline ScalarField operator+(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f.grid(), g.grid());
  std::vector<double> v(f.values());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] += g[k];
  return ScalarField(f.grid(), std::move(v), f.drift() + g.drift());
}

inline ScalarField operator*(double c, const ScalarField& f) {
  std::vector<double> v(f.values());
  for (double& x : v) x *= c;
  return ScalarField(f.grid(), std::move(v), f.drift() * c);
}

inline ScalarField operator-(const ScalarField& f, const ScalarField& g) { return f + (-1.0) * g; }

inline ScalarField operator+(const ScalarField& f, double c) {
  std::vector<double> v(f.values());
  for (double& x : v) x += c;
  return ScalarField(f.grid(), std::move(v), f.drift());
}

// Pointwise product; only defined for periodic (drift-free) factors.
inline ScalarField operator*(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f.grid(), g.grid());
  if (f.has_drift() || g.has_drift())
    throw std::invalid_argument("pointwise product of fields with affine drift is not periodic");
  std::vector<double> v(f.values());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] *= g[k];
  return ScalarField(f.grid(), std::move(v));
}

template <class Fn>
ScalarField map_values(const ScalarField& f, Fn&& fn) {
  if (f.has_drift()) throw std::invalid_argument("pointwise map of a field with affine drift");
  std::vector<double> v(f.values());
  for (double& x : v) x = fn(x);
  return ScalarField(f.grid(), std::move(v));
}

class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(std::vector<ScalarField> comps) : comps_(std::move(comps)) {
    if (comps_.empty()) throw std::invalid_argument("vector field needs at least one component");
    for (const auto& c : comps_) require_same_grid(c.grid(), comps_.front().grid());
  }
  VectorField(const Grid2D& grid, int m) : comps_(static_cast<std::size_t>(m), ScalarField(grid)) {}

  const Grid2D& grid() const { return comps_.front().grid(); }
  int m() const { return static_cast<int>(comps_.size()); }
  const ScalarField& operator[](int k) const { return comps_.at(static_cast<std::size_t>(k)); }
  ScalarField& operator[](int k) { return comps_.at(static_cast<std::size_t>(k)); }
  const std::vector<ScalarField>& components() const { return comps_; }
  bool empty() const { return comps_.empty(); }

 private:
  std::vector<ScalarField> comps_;
};

inline VectorField operator+(const VectorField& f, const VectorField& g) {
  if (f.m() != g.m()) throw std::invalid_argument("component count mismatch");
  std::vector<ScalarField> c;
  for (int k = 0; k < f.m(); ++k) c.push_back(f[k] + g[k]);
  return VectorField(std::move(c));
}

inline VectorField operator*(double a, const VectorField& f) {
  std::vector<ScalarField> c;
  for (int k = 0; k < f.m(); ++k) c.push_back(a * f[k]);
  return VectorField(std::move(c));
}

inline VectorField operator-(const VectorField& f, const VectorField& g) { return f + (-1.0) * g; }

struct FracIndex {
  double s = 0.5;
  double p = 2.0;

  FracIndex() = default;
  FracIndex(double s_, double p_) : s(s_), p(p_) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("smoothness s must lie in (0,1)");
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("integrability p must lie in (1,inf)");
  }
  double sp() const { return s * p; }
  double conjugate() const { return p / (p - 1.0); }
  bool critical(int dim = 2) const { return std::abs(sp() - dim) < 1e-12; }
};

class Mask {
 public:
  Mask() = default;
  explicit Mask(const Grid2D& grid, bool on = true) : grid_(grid), on_(grid.size(), on ? 1 : 0) {}

  template <class Pred>
  static Mask where(const Grid2D& grid, Pred&& pred) {
    Mask m(grid, false);
    for (int j = 0; j < grid.n2; ++j)
      for (int i = 0; i < grid.n1; ++i)
        if (pred(grid.x1(i), grid.x2(j))) m.on_[grid.index(i, j)] = 1;
    return m;
  }
  static Mask full(const Grid2D& grid) { return Mask(grid, true); }
  static Mask disk(const Grid2D& grid, double c1, double c2, double radius) {
    return where(grid, [=](double x1, double x2) { return std::hypot(x1 - c1, x2 - c2) < radius; });
  }
  static Mask annulus(const Grid2D& grid, double c1, double c2, double r_in, double r_out) {
    return where(grid, [=](double x1, double x2) {
      double r = std::hypot(x1 - c1, x2 - c2);
      return r > r_in && r < r_out;
    });
  }
  static Mask rect(const Grid2D& grid, double lo1, double hi1, double lo2, double hi2) {
    return where(grid, [=](double x1, double x2) { return x1 >= lo1 && x1 <= hi1 && x2 >= lo2 && x2 <= hi2; });
  }

  const Grid2D& grid() const { return grid_; }
  bool operator[](std::size_t k) const { return on_[k] != 0; }
  bool operator()(int i, int j) const { return on_[grid_.index(i, j)] != 0; }
  void set(std::size_t k, bool v) { on_[k] = v ? 1 : 0; }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto v : on_) c += v;
    return c;
  }
  std::size_t size() const { return on_.size(); }

  Mask operator&&(const Mask& o) const {
    require_same_grid(grid_, o.grid_);
    Mask m(*this);
    for (std::size_t k = 0; k < on_.size(); ++k) m.on_[k] = on_[k] && o.on_[k];
    return m;
  }
  Mask operator!() const {
    Mask m(*this);
    for (auto& v : m.on_) v = !v;
    return m;
  }

  // Nodes whose whole (2r+1)² neighbourhood lies in the mask.
  Mask eroded(int r) const {
    Mask m(grid_, false);
    for (int j = 0; j < grid_.n2; ++j)
      for (int i = 0; i < grid_.n1; ++i) {
        bool ok = (*this)(i, j);
        for (int dj = -r; ok && dj <= r; ++dj)
          for (int di = -r; ok && di <= r; ++di) ok = (*this)(grid_.wrap1(i + di), grid_.wrap2(j + dj));
        m.on_[grid_.index(i, j)] = ok;
      }
    return m;
  }

 private:
  Grid2D grid_;
  std::vector<std::uint8_t> on_;
};

template <class Fn>
ScalarField sample(Fn&& expr, const Grid2D& grid, Affine drift = {}) {
  std::vector<double> v(grid.size());
  for (int j = 0; j < grid.n2; ++j)
    for (int i = 0; i < grid.n1; ++i) {
      double x = expr(grid.x1(i), grid.x2(j));
      if (!std::isfinite(x))
        throw std::domain_error("expression is not finite at node (" + std::to_string(i) + ", " +
                                std::to_string(j) + ")");
      v[grid.index(i, j)] = x;
    }
  return ScalarField(grid, std::move(v), drift);
}

template <class Fn>
ScalarField sample(Fn&& expr, const Grid2D& grid, GradientExpr gradient, Affine drift = {}) {
  return sample(std::forward<Fn>(expr), grid, drift).with_gradient(std::move(gradient));
}

inline double lp_norm(const ScalarField& f, double p, const Mask* region = nullptr) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm requires p >= 1");
  if (region) require_same_grid(f.grid(), region->grid());
  std::size_t used = 0;
  double acc = 0.0;
  const bool inf = std::isinf(p);
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (region && !(*region)[k]) continue;
    ++used;
    double a = std::abs(f[k]);
    acc = inf ? std::max(acc, a) : acc + (p == 1.0 ? a : p == 2.0 ? a * a : std::pow(a, p));
  }
  if (used == 0) throw std::invalid_argument("lp_norm over an empty region");
  if (inf) return acc;
  return std::pow(acc * f.grid().cell_area(), 1.0 / p);
}

inline double lp_norm(const ScalarField& f, double p, const Mask& region) { return lp_norm(f, p, &region); }

inline double sup_norm(const ScalarField& f, const Mask* region = nullptr) {
  return lp_norm(f, std::numeric_limits<double>::infinity(), region);
}

// Pointwise Euclidean (Frobenius) magnitude of a vector or tensor field.
inline ScalarField magnitude(const VectorField& f) {
  std::vector<double> v(f.grid().size(), 0.0);
  for (int c = 0; c < f.m(); ++c)
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += f[c][k] * f[c][k];
  for (double& x : v) x = std::sqrt(x);
  return ScalarField(f.grid(), std::move(v));
}

inline double lp_norm(const VectorField& f, double p, const Mask* region = nullptr) {
  return lp_norm(magnitude(f), p, region);
}

// Applies a Fourier multiplier symbol(i, j) to real samples and returns the
// real part of the result.
template <class Symbol>
std::vector<double> apply_multiplier(const std::vector<double>& values, const Grid2D& grid, Symbol&& symbol) {
  std::vector<cplx> data(values.begin(), values.end());
  fft2(data, grid.n1, grid.n2, false);
  for (int j = 0; j < grid.n2; ++j)
    for (int i = 0; i < grid.n1; ++i) data[grid.index(i, j)] *= symbol(i, j);
  fft2(data, grid.n1, grid.n2, true);
  std::vector<double> out(values.size());
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = data[k].real() * scale;
  return out;
}

// Spectral partial derivative along axis (0 or 1); the Nyquist mode of that
// axis is dropped so the result stays real.
inline ScalarField spectral_partial(const ScalarField& f, int axis) {
  const Grid2D& g = f.grid();
  auto d = apply_multiplier(f.periodic_part(), g, [&](int i, int j) -> cplx {
    if (axis == 0) return g.nyquist1(i) ? 0.0 : cplx(0.0, g.xi1(i));
    return g.nyquist2(j) ? 0.0 : cplx(0.0, g.xi2(j));
  });
  const double a = axis == 0 ? f.drift().a1 : f.drift().a2;
  if (a != 0.0)
    for (double& x : d) x += a;
  return ScalarField(g, std::move(d));
}

enum class Scheme { spectral, centered_difference, analytic };

inline VectorField gradient(const ScalarField& f, Scheme scheme = Scheme::spectral) {
  const Grid2D& g = f.grid();
  switch (scheme) {
    case Scheme::spectral:
      return VectorField({spectral_partial(f, 0), spectral_partial(f, 1)});
    case Scheme::centered_difference: {
      auto p = f.periodic_part();
      ScalarField d1(g), d2(g);
      for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) {
          d1(i, j) = (p[g.index(g.wrap1(i + 1), j)] - p[g.index(g.wrap1(i - 1), j)]) / (2 * g.h1()) + f.drift().a1;
          d2(i, j) = (p[g.index(i, g.wrap2(j + 1))] - p[g.index(i, g.wrap2(j - 1))]) / (2 * g.h2()) + f.drift().a2;
        }
      return VectorField({d1, d2});
    }
    case Scheme::analytic: {
      const GradientExpr* expr = f.analytic_gradient();
      if (!expr) throw std::invalid_argument("analytic gradient requested but no expression is attached");
      ScalarField d1(g), d2(g);
      for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) {
          auto v = (*expr)(g.x1(i), g.x2(j));
          d1(i, j) = v[0];
          d2(i, j) = v[1];
        }
      return VectorField({d1, d2});
    }
  }
  throw std::invalid_argument("unknown gradient scheme");
}

// Bilinear interpolation at an arbitrary point; the periodic part wraps and
// the affine part is evaluated at the unwrapped point.
inline double interpolate(const ScalarField& f, double x1, double x2, const std::vector<double>* periodic = nullptr) {
  const Grid2D& g = f.grid();
  std::vector<double> local;
  if (!periodic) {
    local = f.periodic_part();
    periodic = &local;
  }
  double u = x1 / g.h1(), v = x2 / g.h2();
  double fu = std::floor(u), fv = std::floor(v);
  double tu = u - fu, tv = v - fv;
  int i0 = g.wrap1(static_cast<int>(fu)), j0 = g.wrap2(static_cast<int>(fv));
  int i1 = g.wrap1(i0 + 1), j1 = g.wrap2(j0 + 1);
  const auto& p = *periodic;
  double val = (1 - tu) * (1 - tv) * p[g.index(i0, j0)] + tu * (1 - tv) * p[g.index(i1, j0)] +
               (1 - tu) * tv * p[g.index(i0, j1)] + tu * tv * p[g.index(i1, j1)];
  return val + f.drift().at(x1, x2);
}

}  // namespace fracsob
