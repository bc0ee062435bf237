// Runs the default suite once and prints one verdict per acceptance criterion.
#include <cstdio>
#include <fstream>
#include <map>
#include <string>

#include "fracsob/suite.hpp"

namespace {

const std::map<int, std::string> kTitles = {
    {1, "spectral round trips"},
    {2, "mollification rates"},
    {3, "commutator rates"},
    {4, "metric convergence"},
    {5, "Christoffel and second form rates"},
    {6, "Codazzi residuals"},
    {7, "shear delta-squared identity"},
    {8, "degree formula and positivity"},
    {9, "cone Jacobian atom"},
    {10, "Jacobian identity"},
    {11, "Hodge decomposition"},
    {12, "determinant estimate"},
    {13, "developability"},
    {14, "zero-measure image"},
    {15, "absolute continuity and content"},
    {16, "full suite runtime"},
};

}  // namespace

int main() {
  const fracsob::Config cfg;
  fracsob::Report report = fracsob::run_suite(cfg, fracsob::suite_sections(), [](const std::string& s, double t) {
    std::fprintf(stderr, "section %-15s %7.2f s\n", s.c_str(), t);
  });
  report.add("suite_seconds", "runtime", 16, report.seconds, "<", 600.0);

  bool all = true;
  for (auto& [criterion, title] : kTitles) {
    int total = 0, failed = 0;
    std::string worst;
    for (auto& c : report.checks) {
      if (c.criterion != criterion) continue;
      ++total;
      if (!c.pass) {
        ++failed;
        if (worst.empty()) worst = c.name + " = " + std::to_string(c.value) + " (" + c.relation + " " + std::to_string(c.threshold) + ")";
      }
    }
    const bool pass = total > 0 && failed == 0;
    all = all && pass;
    std::printf("%s criterion %2d: %s [%d checks]%s\n", pass ? "PASS" : "FAIL", criterion, title.c_str(), total,
                worst.empty() ? "" : (", first failure " + worst).c_str());
  }
  std::printf("total checks %zu, suite %.1f s\n", report.checks.size(), report.seconds);
  std::ofstream("acceptance_report.json") << report.to_json().dump(2) << '\n';
  return all ? 0 : 1;
}
