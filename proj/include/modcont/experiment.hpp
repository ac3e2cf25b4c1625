#pragma once

// Config-driven pipelines composing the library into the headline checks.
// Every verdict carries the number of the acceptance criterion it decides.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "modcont/config.hpp"

namespace modcont {

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Verdict {
  int criterion = 0;
  std::string name;
  double value = 0.0;
  std::string relation;  // "<=", ">=", "<", "in [a, b]", ...
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

struct ExperimentReport {
  std::string name;
  ExperimentKind kind = ExperimentKind::hat_check;
  std::vector<Table> tables;
  std::vector<std::pair<std::string, double>> scalars;
  std::vector<Verdict> verdicts;
  std::map<std::string, std::string> provenance;
  double runtime_seconds = 0.0;
  std::string error;  // set when the run threw

  bool passed() const;
  /// Throws std::out_of_range for an unknown name.
  double scalar(const std::string& key) const;
};

ExperimentReport run_experiment(const ExperimentConfig& config);
/// Acceptance criterion decided by an experiment kind.
int criterion_of(ExperimentKind kind);

ExperimentReport run_hat_check(const ExperimentConfig& config);
ExperimentReport run_b_limit(const ExperimentConfig& config);
ExperimentReport run_hat_ratio(const ExperimentConfig& config);
ExperimentReport run_modulus_check(const ExperimentConfig& config);
ExperimentReport run_convergence(const ExperimentConfig& config);
ExperimentReport run_log_regularity(const ExperimentConfig& config);
ExperimentReport run_holog_regularity(const ExperimentConfig& config);
ExperimentReport run_hklg(const ExperimentConfig& config);
ExperimentReport run_sharpness(const ExperimentConfig& config);
ExperimentReport run_density(const ExperimentConfig& config);

struct SuiteReport {
  std::vector<ExperimentReport> experiments;
  bool passed() const;
  /// criterion → all of its verdicts passed (and no contributing run threw).
  std::map<int, bool> criteria() const;
};

/// Runs the experiments in order. A run that throws is recorded with its
/// error and counts as failed; the suite continues.
SuiteReport run_suite(const std::vector<ExperimentConfig>& configs,
                      const std::function<void(const ExperimentReport&)>& on_done = {});

/// `dir`/<table>.csv, `dir`/verdicts.csv and `dir`/report.json.
void write_report(const ExperimentReport& report, const std::string& dir);
/// Per-experiment subdirectories plus an aggregated verdicts.csv.
void write_suite(const SuiteReport& suite, const std::string& dir);
std::string report_json(const ExperimentReport& report);

}  // namespace modcont
