#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace fracsob {

// Curve on [0, length] sampled at x_k = k·h, values node-major (m per node).
struct Curve {
  int m = 2;
  double h = 0.0;
  std::vector<double> values;

  std::size_t size() const { return values.size() / static_cast<std::size_t>(m); }
  const double* at(std::size_t k) const { return &values[k * static_cast<std::size_t>(m)]; }

  static Curve sample(std::function<std::vector<double>(double)> f, int m, std::size_t n, double length = 1.0) {
    if (n < 2) throw std::invalid_argument("curve needs at least 2 samples");
    Curve c{m, length / static_cast<double>(n - 1), {}};
    for (std::size_t k = 0; k < n; ++k) {
      auto v = f(static_cast<double>(k) * c.h);
      if (static_cast<int>(v.size()) != m) throw std::invalid_argument("curve sample has the wrong dimension");
      c.values.insert(c.values.end(), v.begin(), v.end());
    }
    return c;
  }

  Curve restrict(std::size_t first, std::size_t count) const {
    if (first + count > size()) throw std::invalid_argument("restriction exceeds the curve");
    Curve c{m, h, {}};
    c.values.assign(values.begin() + static_cast<std::ptrdiff_t>(first * m),
                    values.begin() + static_cast<std::ptrdiff_t>((first + count) * m));
    return c;
  }
};

namespace detail {

inline double curve_dist(const Curve& c, std::size_t a, std::size_t b) {
  double d2 = 0.0;
  for (int i = 0; i < c.m; ++i) d2 += (c.at(a)[i] - c.at(b)[i]) * (c.at(a)[i] - c.at(b)[i]);
  return std::sqrt(d2);
}

// Scores of the aligned intervals of 2^level steps: sup over sample pairs of
// |f(x) − f(y)|^p / |x − y|^t, sorted in decreasing order.
inline std::vector<double> tile_scores(const Curve& c, int level, double t, double p) {
  const std::size_t w = std::size_t{1} << level, n = c.size();
  std::vector<double> scores;
  for (std::size_t start = 0; start + w < n; start += w) {
    double best = 0.0;
    for (std::size_t a = start; a <= start + w; ++a)
      for (std::size_t b = a + 1; b <= start + w; ++b) {
        double d = curve_dist(c, a, b);
        if (d == 0.0) continue;
        best = std::max(best, std::pow(d, p) / std::pow(static_cast<double>(b - a) * c.h, t));
      }
    scores.push_back(best);
  }
  std::sort(scores.begin(), scores.end(), std::greater<>());
  return scores;
}

}  // namespace detail

// Greedy (t,p) modulus: at each dyadic tile length ℓ ≤ δ the ⌊δ/ℓ⌋ best
// aligned tiles are packed; the largest packed sum over lengths is returned.
// A lower bound on the supremum over all disjoint families.
inline double ac_modulus(const Curve& c, double t, double p, double delta) {
  if (t < 0.0 || !(p > 0.0) || !(delta > 0.0)) throw std::invalid_argument("need t >= 0, p > 0, delta > 0");
  if (delta < 2.0 * c.h) throw std::invalid_argument("delta below two sample spacings");
  double best = 0.0;
  for (int level = 0; (std::size_t{1} << level) < c.size(); ++level) {
    const double len = static_cast<double>(std::size_t{1} << level) * c.h;
    if (len > delta * (1.0 + 1e-12)) break;
    auto scores = detail::tile_scores(c, level, t, p);
    const auto k = std::min(scores.size(), static_cast<std::size_t>(std::floor(delta / len * (1.0 + 1e-12))));
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += scores[i];
    best = std::max(best, sum);
  }
  return best;
}

inline std::vector<std::pair<double, double>> ac_modulus_ladder(const Curve& c, double t, double p,
                                                                const std::vector<double>& deltas) {
  std::vector<std::pair<double, double>> out;
  for (double d : deltas) out.emplace_back(d, ac_modulus(c, t, p, d));
  return out;
}

// Values along a δ ladder ordered from large to small δ decrease, ending
// strictly below the first.
inline bool ladder_decreasing(std::vector<std::pair<double, double>> ladder) {
  std::sort(ladder.begin(), ladder.end(), [](auto& a, auto& b) { return a.first > b.first; });
  for (std::size_t k = 1; k < ladder.size(); ++k)
    if (ladder[k].second > ladder[k - 1].second) return false;
  return ladder.size() >= 2 && ladder.back().second < ladder.front().second;
}

struct MonotoneVerdict {
  std::vector<std::pair<double, double>> source;  // (t, p) modulus ladder
  std::vector<std::pair<double, double>> target;  // (t̃, p̃) modulus ladder
  bool pass = false;
};

inline MonotoneVerdict ac_monotone_check(const Curve& c, double t, double p, double tt, double pt,
                                         const std::vector<double>& deltas) {
  const double lhs = (1.0 + tt) / (1.0 + t), mid = pt / p;
  if (lhs > mid + 1e-12)
    throw std::invalid_argument("exponent condition violated: (1+t~)/(1+t) = " + std::to_string(lhs) +
                                " exceeds p~/p = " + std::to_string(mid));
  if (mid > 1.0 + 1e-12) throw std::invalid_argument("exponent condition violated: p~/p = " + std::to_string(mid) + " exceeds 1");
  MonotoneVerdict v;
  v.source = ac_modulus_ladder(c, t, p, deltas);
  v.target = ac_modulus_ladder(c, tt, pt, deltas);
  v.pass = ladder_decreasing(v.source) && ladder_decreasing(v.target);
  return v;
}

struct ContentEstimate {
  std::vector<std::pair<double, double>> costs;  // (r, N(r)·(r√m/2)^p)
  double value = 0.0;                            // minimum over the ladder
};

// Single-scale box-cover upper bound on H^p_∞ of a point set in ℝ^m.
inline ContentEstimate hausdorff_content(const std::vector<double>& points, int m, double p,
                                         const std::vector<double>& r_ladder) {
  if (points.empty()) throw std::invalid_argument("empty point set");
  if (r_ladder.size() < 4) throw std::invalid_argument("content needs at least 4 scales");
  ContentEstimate out;
  out.value = std::numeric_limits<double>::infinity();
  const std::size_t n = points.size() / static_cast<std::size_t>(m);
  for (double r : r_ladder) {
    if (!(r > 0.0)) throw std::invalid_argument("box sizes must be positive");
    std::map<std::vector<std::int64_t>, char> boxes;
    std::vector<std::int64_t> key(static_cast<std::size_t>(m));
    for (std::size_t k = 0; k < n; ++k) {
      for (int i = 0; i < m; ++i) key[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor(points[k * m + i] / r));
      boxes.emplace(key, 1);
    }
    double cost = static_cast<double>(boxes.size()) * std::pow(r * std::sqrt(static_cast<double>(m)) / 2.0, p);
    out.costs.emplace_back(r, cost);
    out.value = std::min(out.value, cost);
  }
  return out;
}

inline ContentEstimate hausdorff_content(const Curve& c, double p, const std::vector<double>& r_ladder) {
  return hausdorff_content(c.values, c.m, p, r_ladder);
}

inline std::vector<double> geometric_ladder(double first, double ratio, int count) {
  std::vector<double> r;
  for (int k = 0; k < count; ++k) r.push_back(first * std::pow(ratio, k));
  return r;
}

struct DimensionVerdict {
  bool in_scope = true;
  std::string note;
  ContentEstimate above;  // exponent 1/s + 0.1
  ContentEstimate below;  // exponent 1/s − 0.1, informational
  bool decreasing = false;
};

// Box scales run from 1/4 of the image diameter down to twice the largest
// sample gap, so every scale is resolved by the samples.
inline DimensionVerdict curve_image_dimension(const Curve& c, double s, double p) {
  DimensionVerdict v;
  if (!(s * p > 1.0)) {
    v.in_scope = false;
    v.note = "out of theorem scope: s*p <= 1 admits space-filling images";
    return v;
  }
  double gap = 0.0, diam = 0.0;
  for (std::size_t k = 0; k + 1 < c.size(); ++k) gap = std::max(gap, detail::curve_dist(c, k, k + 1));
  for (std::size_t k = 1; k < c.size(); ++k) diam = std::max(diam, detail::curve_dist(c, 0, k));
  std::vector<double> r;
  for (double x = diam / 4.0; x >= 2.0 * gap && r.size() < 12; x /= 2.0) r.push_back(x);
  if (r.size() < 4) throw std::invalid_argument("curve sampling too coarse for 4 resolved box scales");
  v.above = hausdorff_content(c, 1.0 / s + 0.1, r);
  v.below = hausdorff_content(c, 1.0 / s - 0.1, r);
  v.decreasing = ladder_decreasing(v.above.costs);
  return v;
}

}  // namespace fracsob
