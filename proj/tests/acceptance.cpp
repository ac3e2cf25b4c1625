// Runs the bundled suite and prints one PASS/FAIL line per acceptance
// criterion, followed by the verdicts behind it.

#include <iostream>
#include <sstream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "modcont/experiment.hpp"

using namespace modcont;

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria 1-9"};
  int only = 0;
  std::string out_dir;
  app.add_option("--criterion", only, "Run a single criterion")->check(CLI::Range(1, 9));
  app.add_option("--out", out_dir, "Write tables and verdicts here");
  CLI11_PARSE(app, argc, argv);

  std::vector<ExperimentConfig> configs;
  for (const auto& c : default_suite())
    if (only == 0 || criterion_of(c.kind) == only) configs.push_back(c);

  const SuiteReport suite = run_suite(configs);
  if (!out_dir.empty()) write_suite(suite, out_dir);

  std::map<int, std::vector<std::string>> lines;
  std::map<int, double> seconds;
  for (const auto& e : suite.experiments) {
    const int k = criterion_of(e.kind);
    seconds[k] += e.runtime_seconds;
    if (!e.error.empty()) lines[k].push_back("  [FAIL] " + e.name + ": error: " + e.error);
    for (const auto& v : e.verdicts) {
      std::ostringstream os;
      os.precision(6);
      os << "  [" << (v.pass ? "pass" : "FAIL") << "] " << e.name << ": " << v.name << " = " << v.value << " "
         << v.relation << " " << v.threshold;
      if (!v.detail.empty()) os << "  (" << v.detail << ")";
      lines[v.criterion].push_back(os.str());
    }
  }
  const auto verdict = suite.criteria();
  bool all = true;
  for (int k = 1; k <= 9; ++k) {
    if (only != 0 && k != only) continue;
    const auto it = verdict.find(k);
    const bool ok = it != verdict.end() && it->second;
    all = all && ok;
    std::cout << "criterion " << k << ": " << (ok ? "PASS" : "FAIL") << "  (" << seconds[k] << " s)\n";
    for (const auto& l : lines[k]) std::cout << l << "\n";
  }
  return all ? 0 : 1;
}
