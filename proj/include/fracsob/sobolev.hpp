#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fracsob/field.hpp"
#include "fracsob/parallel.hpp"
#include "fracsob/spectral.hpp"

namespace fracsob {

struct RateFit {
  std::vector<std::pair<double, double>> ladder;  // (ε, value), ε decreasing
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  bool infinite = false;  // a zero value was hit: faster than any power

  double first() const { return ladder.front().second; }
  double last() const { return ladder.back().second; }
  bool strictly_decreasing() const {
    for (std::size_t k = 1; k < ladder.size(); ++k)
      if (!(ladder[k].second < ladder[k - 1].second)) return false;
    return true;
  }
  bool meets(double min_slope) const { return infinite || slope >= min_slope; }
};

// Least-squares fit of log(value) against log(ε). Values at or below
// zero_floor count as exact zeros.
inline RateFit fit_rate(std::vector<std::pair<double, double>> ladder, double zero_floor = 0.0) {
  if (ladder.size() < 4) throw std::invalid_argument("rate fit needs at least 4 ladder points");
  std::sort(ladder.begin(), ladder.end(), [](auto& a, auto& b) { return a.first > b.first; });
  for (std::size_t k = 1; k < ladder.size(); ++k)
    if (!(ladder[k].first < ladder[k - 1].first)) throw std::invalid_argument("ladder scales must be distinct");
  RateFit fit;
  fit.ladder = ladder;
  for (auto& [eps, v] : ladder) {
    if (!(eps > 0.0)) throw std::invalid_argument("ladder scales must be positive");
    if (v < 0.0 || !std::isfinite(v)) throw std::invalid_argument("ladder values must be finite and nonnegative");
    if (v <= zero_floor) fit.infinite = true;
  }
  if (fit.infinite) {
    fit.slope = std::numeric_limits<double>::infinity();
    fit.intercept = 0.0;
    fit.r2 = 1.0;
    return fit;
  }
  const double n = static_cast<double>(ladder.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (auto& [eps, v] : ladder) {
    double x = std::log(eps), y = std::log(v);
    sx += x, sy += y, sxx += x * x, sxy += x * y, syy += y * y;
  }
  double cxx = sxx - sx * sx / n, cxy = sxy - sx * sy / n, cyy = syy - sy * sy / n;
  fit.slope = cxy / cxx;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.r2 = cyy <= 0.0 ? 1.0 : std::clamp(cxy * cxy / (cxx * cyy), 0.0, 1.0);
  return fit;
}

inline std::uint64_t subsample_seed() {
  if (const char* env = std::getenv("FRACSOB_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("FRACSOB_SEED is not an unsigned integer: ") + env);
    }
  }
  return 20240611ULL;
}

// Grids with more nodes than this use a stratified 1/8 outer subsample.
inline constexpr std::size_t kFullSumLimit = 128 * 128;

namespace detail {

inline double pow_abs(double d, double p) {
  if (p == 2.0) return d * d;
  if (p == 3.0) return d * d * d;
  if (p == 1.5) return d * std::sqrt(d);
  if (p == 1.0) return d;
  return std::pow(d, p);
}

// Shared driver: values holds m components per node (node-major).
inline double gagliardo_core(const Grid2D& g, const std::vector<double>& values, int m, const FracIndex& idx,
                             const Mask& window) {
  require_same_grid(g, window.grid());
  std::vector<int> ni, nj;
  std::vector<char> seen_i(static_cast<std::size_t>(g.n1), 0), seen_j(static_cast<std::size_t>(g.n2), 0);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i)
      if (window(i, j)) {
        ni.push_back(i);
        nj.push_back(j);
        seen_i[static_cast<std::size_t>(i)] = seen_j[static_cast<std::size_t>(j)] = 1;
      }
  auto distinct = [](const std::vector<char>& s) { return std::count(s.begin(), s.end(), 1); };
  if (ni.size() < 16 || distinct(seen_i) < 4 || distinct(seen_j) < 4)
    throw std::invalid_argument("window smaller than 4x4 nodes");

  const double expo = 2.0 + idx.s * idx.p;
  std::vector<double> kernel(g.size(), 0.0);
  for (int dj = 0; dj < g.n2; ++dj)
    for (int di = 0; di < g.n1; ++di) {
      if (di == 0 && dj == 0) continue;
      double d1 = std::min(di, g.n1 - di) * g.h1();
      double d2 = std::min(dj, g.n2 - dj) * g.h2();
      kernel[g.index(di, dj)] = std::pow(d1 * d1 + d2 * d2, -expo / 2.0);
    }

  std::vector<std::size_t> outer;
  double weight = 1.0;
  if (g.size() <= kFullSumLimit) {
    outer.resize(ni.size());
    for (std::size_t k = 0; k < ni.size(); ++k) outer[k] = k;
  } else {
    // One random node per 4x2 tile.
    std::mt19937_64 rng(subsample_seed());
    std::vector<char> chosen(g.size(), 0);
    std::uniform_int_distribution<int> pick(0, 7);
    for (int tj = 0; tj < g.n2; tj += 2)
      for (int ti = 0; ti < g.n1; ti += 4) {
        int r = pick(rng);
        chosen[g.index(ti + r % 4, tj + r / 4)] = 1;
      }
    for (std::size_t k = 0; k < ni.size(); ++k)
      if (chosen[g.index(ni[k], nj[k])]) outer.push_back(k);
    if (outer.empty()) outer.push_back(0);
    weight = static_cast<double>(ni.size()) / static_cast<double>(outer.size());
  }

  const int mask1 = g.n1 - 1, mask2 = g.n2 - 1;
  const std::size_t count = ni.size();
  const double p = idx.p;
  double sum = chunked_sum(outer.size(), [&](std::size_t o) {
    const std::size_t a = outer[o];
    const int ia = ni[a], ja = nj[a];
    const double* va = &values[a * static_cast<std::size_t>(m)];
    double acc = 0.0;
    for (std::size_t b = 0; b < count; ++b) {
      const double* vb = &values[b * static_cast<std::size_t>(m)];
      double d2 = 0.0;
      for (int c = 0; c < m; ++c) d2 += (va[c] - vb[c]) * (va[c] - vb[c]);
      if (d2 == 0.0) continue;
      const std::size_t kidx = static_cast<std::size_t>((nj[b] - ja) & mask2) * static_cast<std::size_t>(g.n1) +
                               static_cast<std::size_t>((ni[b] - ia) & mask1);
      acc += kernel[kidx] * (p == 2.0 ? d2 : pow_abs(std::sqrt(d2), p));
    }
    return acc;
  });
  const double h4 = g.cell_area() * g.cell_area();
  return std::pow(sum * weight * h4, 1.0 / p);
}

inline std::vector<double> window_values(const std::vector<const ScalarField*>& comps, const Mask& window) {
  const Grid2D& g = comps.front()->grid();
  std::vector<double> v;
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i)
      if (window(i, j))
        for (auto* c : comps) v.push_back((*c)(i, j));
  return v;
}

}  // namespace detail

// Discrete Gagliardo seminorm over window × window with the torus metric.
inline double gagliardo_seminorm(const ScalarField& f, const FracIndex& idx, const Mask& window) {
  if (f.has_drift()) throw std::invalid_argument("gagliardo_seminorm needs a periodic field");
  return detail::gagliardo_core(f.grid(), detail::window_values({&f}, window), 1, idx, window);
}

inline double gagliardo_seminorm(const ScalarField& f, const FracIndex& idx) {
  return gagliardo_seminorm(f, idx, Mask::full(f.grid()));
}

// Vector version: pointwise differences measured in the Euclidean norm.
inline double gagliardo_seminorm(const VectorField& f, const FracIndex& idx, const Mask& window) {
  std::vector<const ScalarField*> comps;
  for (int c = 0; c < f.m(); ++c) {
    if (f[c].has_drift()) throw std::invalid_argument("gagliardo_seminorm needs a periodic field");
    comps.push_back(&f[c]);
  }
  return detail::gagliardo_core(f.grid(), detail::window_values(comps, window), f.m(), idx, window);
}

inline double gagliardo_seminorm(const VectorField& f, const FracIndex& idx) {
  return gagliardo_seminorm(f, idx, Mask::full(f.grid()));
}

// Smooth bump exp(−1/(1−ρ²)) of radius r centred at (c1, c2), torus-wrapped.
inline ScalarField bump(const Grid2D& g, double c1, double c2, double r) {
  return sample(
      [&](double x1, double x2) {
        double d1 = std::remainder(x1 - c1, g.length1), d2 = std::remainder(x2 - c2, g.length2);
        double q = (d1 * d1 + d2 * d2) / (r * r);
        return q < 1.0 ? std::exp(-1.0 / (1.0 - q)) : 0.0;
      },
      g);
}

// 32 bumps: 4 radii times 8 grid-snapped positions around the window centre,
// each normalised to unit seminorm at the dual index (1−s, p′).
inline std::vector<ScalarField> bump_dictionary(const Grid2D& g, double c1, double c2, double window_radius,
                                                const FracIndex& idx) {
  const FracIndex dual(1.0 - idx.s, idx.conjugate());
  const double radii[4] = {0.15, 0.22, 0.32, 0.45};
  std::vector<ScalarField> dict;
  for (double rf : radii) {
    const double r = rf * window_radius;
    const double orbit = 0.6 * (window_radius - r);
    double norm = 0.0;
    for (int k = 0; k < 8; ++k) {
      double ang = 2.0 * std::numbers::pi * k / 8.0;
      double p1 = std::round((c1 + orbit * std::cos(ang)) / g.h1()) * g.h1();
      double p2 = std::round((c2 + orbit * std::sin(ang)) / g.h2()) * g.h2();
      ScalarField b = bump(g, p1, p2, r);
      if (k == 0) norm = gagliardo_seminorm(b, dual);
      dict.push_back((1.0 / norm) * b);
    }
  }
  return dict;
}

struct NegativeSeminorm {
  double dual = 0.0;        // sup over the dictionary of |⟨f, φ⟩|
  double multiplier = 0.0;  // seminorm of DΔ⁻¹f at (s, p)
  std::array<double, 2> components{};
  double ratio = 0.0;  // dual / multiplier, the observed constant
};

inline NegativeSeminorm negative_seminorm(const ScalarField& f, const FracIndex& idx,
                                          const std::vector<ScalarField>& dictionary) {
  if (f.has_drift()) throw std::invalid_argument("negative_seminorm needs a periodic field");
  double scale = 0.0;
  for (double v : f.values()) scale = std::max(scale, std::abs(v));
  const double mean = f.mean();
  if (std::abs(mean) > 1e-10 * std::max(scale, 1.0))
    throw std::invalid_argument("negative_seminorm needs a zero-mean field, mean is " + std::to_string(mean));
  NegativeSeminorm out;
  const double area = f.grid().cell_area();
  for (const auto& phi : dictionary) {
    require_same_grid(f.grid(), phi.grid());
    double pair = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) pair += f[k] * phi[k];
    out.dual = std::max(out.dual, std::abs(pair * area));
  }
  VectorField w = gradient(inv_laplacian(f), Scheme::spectral);
  out.components = {gagliardo_seminorm(w[0], idx), gagliardo_seminorm(w[1], idx)};
  out.multiplier = gagliardo_seminorm(w, idx);
  out.ratio = out.multiplier > 0.0 ? out.dual / out.multiplier : 0.0;
  return out;
}

}  // namespace fracsob
