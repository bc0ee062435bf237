#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracsob/fracsob.hpp"

using namespace fracsob;
using nlohmann::json;

namespace {

void emit(const json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot write " + out);
  f << j.dump(2) << '\n';
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
  return v;
}

ScalarField read_scalar(const std::string& path) {
  VectorField f = read_field(path);
  if (f.m() != 1) throw std::runtime_error(path + " holds " + std::to_string(f.m()) + " components, expected 1");
  return f[0];
}

void write_rates_csv(const std::string& path, const std::vector<std::pair<std::string, RateFit>>& fits) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(12);
  out << "series,epsilon,value,slope,r2\n";
  for (auto& [name, fit] : fits)
    for (auto& [e, v] : fit.ladder) out << name << ',' << e << ',' << v << ',' << fit.slope << ',' << fit.r2 << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fracsob: fractional Sobolev isometric immersion toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  std::string config_path;
  app.add_option("--threads", threads, "worker cap (0 = hardware)");
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);

  std::string field, out, map_path, test_path, contour_path, lambda_path, g_path, f_path, phi_path, curve_path, y_arg;
  std::string k_arg = "0,1,2", scenario, csv_out, class_out;
  std::vector<std::string> sections;
  double s = 2.0 / 3.0, p = 3.0;
  int ladder_n = 5, n = 0, eps_ladder = 0;

  auto* sem = app.add_subcommand("seminorm", "Gagliardo and extension seminorms of a field");
  sem->add_option("--field", field)->required()->check(CLI::ExistingFile);
  sem->add_option("--s", s);
  sem->add_option("--p", p);
  sem->add_option("--out", out);

  auto* mol = app.add_subcommand("mollify-rates", "mollification rate fits for k = 0, 1, 2");
  mol->add_option("--field", field)->required()->check(CLI::ExistingFile);
  mol->add_option("--s", s);
  mol->add_option("--p", p);
  mol->add_option("--k", k_arg, "comma list of derivative orders");
  mol->add_option("--out", out, "JSON, or CSV when the name ends in .csv");

  auto* jac = app.add_subcommand("jacobian", "distributional Jacobian pairing ladder");
  jac->add_option("--map", map_path)->required()->check(CLI::ExistingFile);
  jac->add_option("--test", test_path)->required()->check(CLI::ExistingFile);
  jac->add_option("--ladder", ladder_n, "number of dyadic ladder steps");
  jac->add_option("--out", out);

  auto* deg = app.add_subcommand("degree", "winding-number degree along a node contour");
  deg->add_option("--map", map_path)->required()->check(CLI::ExistingFile);
  deg->add_option("--contour", contour_path)->required()->check(CLI::ExistingFile);
  deg->add_option("--y", y_arg, "target point y1,y2")->required();

  auto* imm = app.add_subcommand("immersion-analyze", "geometry ladder and classification of a scenario");
  imm->add_option("--scenario", scenario)->required();
  imm->add_option("--n", n);
  imm->add_option("--eps-ladder", eps_ladder);
  imm->add_option("--classification", class_out, "CSV of x1,x2,label,theta");
  imm->add_option("--out", out);

  auto* hod = app.add_subcommand("hodge-check", "Jacobian identity for a triple with grad f = lambda grad g");
  hod->add_option("--lambda", lambda_path)->required()->check(CLI::ExistingFile);
  hod->add_option("--g", g_path)->required()->check(CLI::ExistingFile);
  hod->add_option("--f", f_path)->required()->check(CLI::ExistingFile);
  hod->add_option("--phi", phi_path)->required()->check(CLI::ExistingFile);
  hod->add_option("--ladder", ladder_n);
  hod->add_option("--out", out);

  auto* abs = app.add_subcommand("abscont", "absolute continuity moduli and image content of a curve");
  abs->add_option("--curve", curve_path)->required()->check(CLI::ExistingFile);
  abs->add_option("--s", s)->required();
  abs->add_option("--p", p)->required();
  abs->add_option("--out", out);

  auto* sui = app.add_subcommand("suite", "verification suite or a single scenario report");
  sui->add_option("--scenario", scenario, "run one scenario instead of the suite");
  sui->add_option("--section", sections, "restrict to these suite sections");
  sui->add_option("--n", n);
  sui->add_option("--out", out);
  sui->add_option("--csv", csv_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (threads > 0) set_threads(threads);
    Config cfg = config_path.empty() ? Config{} : Config::load(config_path);
    if (n > 0) {
      if (!is_power_of_two(n)) throw std::invalid_argument("--n must be a power of two");
      cfg.n = n;
    }
    if (eps_ladder > 0) cfg.geometry_count = eps_ladder;

    if (*sem) {
      FracIndex idx(s, p);
      VectorField f = read_field(field);
      json j = {{"s", s}, {"p", p}, {"gagliardo", gagliardo_seminorm(f, idx)}};
      if (f.m() == 1 && s < 1.0) j["extension"] = extension_seminorm(f[0], idx, HeightLadder::defaults(f.grid()));
      if (ends_with(out, ".csv")) {
        std::ofstream o(out);
        o.precision(15);
        o << "quantity,value\ngagliardo," << j["gagliardo"].get<double>() << '\n';
        if (j.contains("extension")) o << "extension," << j["extension"].get<double>() << '\n';
      } else {
        emit(j, out);
      }
    } else if (*mol) {
      ScalarField f = read_scalar(field);
      FracIndex idx(s, p);
      std::vector<std::pair<std::string, RateFit>> fits;
      json j = json::object();
      for (double k : parse_list(k_arg)) {
        RateFit fit = mollify_rates(f, idx, static_cast<int>(k), cfg.mollify_ladder(f.grid().length1));
        fits.emplace_back("k" + std::to_string(static_cast<int>(k)), fit);
        j[fits.back().first] = to_json(fit);
      }
      if (ends_with(out, ".csv")) write_rates_csv(out, fits);
      else emit(j, out);
    } else if (*jac) {
      VectorField f = read_field(map_path);
      ScalarField phi = read_scalar(test_path);
      DistPairing d = dist_jacobian(f, phi, dyadic_ladder(f.grid().length1, 3, ladder_n), Mask::full(f.grid()));
      emit(to_json(d), out);
    } else if (*deg) {
      auto y = parse_list(y_arg);
      if (y.size() != 2) throw std::invalid_argument("--y needs y1,y2");
      std::cout << degree(read_field(map_path), read_contour_csv(contour_path), y[0], y[1]) << '\n';
    } else if (*imm) {
      Report r = run_scenario(scenario, cfg);
      if (!class_out.empty()) {
        Immersion im = scenario_immersion(scenario, cfg);
        write_classification_csv(class_out, detect_developability(im, cfg.classification_tolerance));
      }
      emit(r.to_json(), out);
      return r.exit_code();
    } else if (*hod) {
      ScalarField lambda = read_scalar(lambda_path), phi = read_scalar(phi_path);
      VectorField g = read_field(g_path), f = read_field(f_path);
      IdentityCheck c = jacobian_identity_check(lambda, f, g, phi, dyadic_ladder(f.grid().length1, 3, ladder_n), Mask::full(f.grid()));
      emit({{"lhs_ladder", to_json(c.lhs.ladder)},
            {"rhs_ladder", to_json(c.rhs.ladder)},
            {"constraint", c.constraint},
            {"verdict", c.holds() ? "holds" : "differs"}},
           out);
      return c.holds() ? 0 : 1;
    } else if (*abs) {
      Curve c = read_curve_csv(curve_path);
      std::vector<double> deltas;
      for (double d = 0.125; d >= 2.0 * c.h && deltas.size() < 4; d /= 4.0) deltas.push_back(d);
      json j = {{"s", s}, {"p", p}};
      DimensionVerdict dv = curve_image_dimension(c, s, p);
      j["in_scope"] = dv.in_scope;
      if (!dv.in_scope) {
        j["note"] = dv.note;
      } else {
        if (deltas.size() < 2) throw std::invalid_argument("curve too coarse for a delta ladder");
        MonotoneVerdict mv = ac_monotone_check(c, s * p - 1.0, p, 0.0, 1.0 / s, deltas);
        j["modulus"] = to_json(mv.source);
        j["transferred_modulus"] = to_json(mv.target);
        j["modulus_decreasing"] = mv.pass;
        j["content"] = to_json(dv.above.costs);
        j["content_decreasing"] = dv.decreasing;
      }
      emit(j, out);
    } else if (*sui) {
      Report r = scenario.empty() ? run_suite(cfg, sections.empty() ? suite_sections() : sections,
                                              [](const std::string& name, double t) {
                                                std::fprintf(stderr, "section %-15s %7.2f s\n", name.c_str(), t);
                                              })
                                  : run_scenario(scenario, cfg);
      json j = r.to_json();
      j["config"] = cfg.to_json();
      emit(j, out);
      if (!csv_out.empty()) r.write_csv(csv_out);
      for (auto& f : r.failures()) std::fprintf(stderr, "FAILED %s\n", f.c_str());
      return r.exit_code();
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
