#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracsob/abscont.hpp"
#include "fracsob/field.hpp"
#include "fracsob/geometry.hpp"
#include "fracsob/jacobian.hpp"

namespace fracsob {

// A field file is raw little-endian doubles, component-major, holding the
// full sampled values; the sidecar <path>.json carries the grid and drifts.
inline void write_field(const std::string& path, const VectorField& f, const std::string& name = "") {
  const Grid2D& g = f.grid();
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw std::runtime_error("cannot write " + path);
  nlohmann::json drift = nlohmann::json::array();
  for (int c = 0; c < f.m(); ++c) {
    bin.write(reinterpret_cast<const char*>(f[c].values().data()),
              static_cast<std::streamsize>(f[c].size() * sizeof(double)));
    drift.push_back({f[c].drift().a1, f[c].drift().a2});
  }
  if (!bin) throw std::runtime_error("short write to " + path);
  nlohmann::json meta = {{"n1", g.n1}, {"n2", g.n2}, {"length1", g.length1}, {"length2", g.length2},
                         {"m", f.m()},   {"name", name}, {"drift", drift}};
  std::ofstream side(path + ".json");
  if (!side) throw std::runtime_error("cannot write " + path + ".json");
  side << meta.dump(2) << '\n';
}

inline void write_field(const std::string& path, const ScalarField& f, const std::string& name = "") {
  write_field(path, VectorField({f}), name);
}

inline VectorField read_field(const std::string& path) {
  std::ifstream side(path + ".json");
  if (!side) throw std::runtime_error("missing sidecar " + path + ".json");
  nlohmann::json meta = nlohmann::json::parse(side);
  Grid2D g(meta.at("n1").get<int>(), meta.at("n2").get<int>(), meta.value("length1", 1.0), meta.value("length2", 1.0));
  const int m = meta.value("m", 1);
  std::ifstream bin(path, std::ios::binary);
  if (!bin) throw std::runtime_error("cannot read " + path);
  std::vector<ScalarField> comps;
  for (int c = 0; c < m; ++c) {
    std::vector<double> v(g.size());
    bin.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!bin) throw std::runtime_error(path + " is shorter than its sidecar declares");
    Affine d{};
    if (meta.contains("drift") && meta["drift"].size() > static_cast<std::size_t>(c))
      d = {meta["drift"][c][0].get<double>(), meta["drift"][c][1].get<double>()};
    comps.emplace_back(g, std::move(v), d);
  }
  return VectorField(std::move(comps));
}

inline void write_csv(const std::string& path, const ScalarField& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "x1,x2,value\n";
  const Grid2D& g = f.grid();
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) out << g.x1(i) << ',' << g.x2(j) << ',' << f(i, j) << '\n';
}

inline std::vector<std::vector<double>> read_csv_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (numeric) rows.push_back(std::move(row));
  }
  return rows;
}

// One point per row, equally spaced on [0, 1].
inline Curve read_curve_csv(const std::string& path) {
  auto rows = read_csv_rows(path);
  if (rows.size() < 2) throw std::runtime_error(path + " holds fewer than 2 curve points");
  Curve c{static_cast<int>(rows.front().size()), 1.0 / static_cast<double>(rows.size() - 1), {}};
  for (auto& r : rows) {
    if (static_cast<int>(r.size()) != c.m) throw std::runtime_error(path + " has rows of unequal width");
    c.values.insert(c.values.end(), r.begin(), r.end());
  }
  return c;
}

// Node indices i,j per row.
inline Contour read_contour_csv(const std::string& path) {
  Contour c;
  for (auto& r : read_csv_rows(path)) {
    if (r.size() < 2) throw std::runtime_error(path + ": contour rows need i,j");
    c.nodes.push_back({static_cast<int>(std::lround(r[0])), static_cast<int>(std::lround(r[1]))});
  }
  return c;
}

inline const char* label_name(Label l) {
  switch (l) {
    case Label::flat: return "flat";
    case Label::ruled: return "ruled";
    case Label::singular: return "singular";
    default: return "outside";
  }
}

inline void write_classification_csv(const std::string& path, const Classification& c) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "x1,x2,label,theta\n";
  for (int j = 0; j < c.grid.n2; ++j)
    for (int i = 0; i < c.grid.n1; ++i) {
      std::size_t k = c.grid.index(i, j);
      if (c.labels[k] == Label::outside) continue;
      out << c.grid.x1(i) << ',' << c.grid.x2(j) << ',' << label_name(c.labels[k]) << ','
          << (c.labels[k] == Label::ruled ? c.theta[k] : 0.0) << '\n';
    }
}

inline nlohmann::json to_json(const std::vector<std::pair<double, double>>& ladder) {
  nlohmann::json a = nlohmann::json::array();
  for (auto& [e, v] : ladder) a.push_back({e, v});
  return a;
}

inline nlohmann::json to_json(const RateFit& r) {
  return {{"slope", std::isinf(r.slope) ? nlohmann::json("inf") : nlohmann::json(r.slope)},
          {"intercept", r.intercept},
          {"r2", r.r2},
          {"infinite", r.infinite},
          {"ladder", to_json(r.ladder)}};
}

inline nlohmann::json to_json(const DistPairing& p) {
  return {{"ladder", to_json(p.ladder)}, {"limit", p.limit}, {"converged", p.converged}};
}

}  // namespace fracsob
