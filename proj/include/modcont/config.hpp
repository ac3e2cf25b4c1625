#pragma once

// Flat key-value experiment configuration.
//
//   # comment
//   key = value              global defaults, before the first section
//   [experiment-name]        one section per experiment
//   kind = log_regularity
//   spec = log(2)
//   grids = 257, 513
//
// Specs are written holder(λ), log(α), holog(λ, α), each with an optional
// trailing radius R, e.g. log(2, 0.9). Lists are comma separated; spec
// lists are separated by ';'.

#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "modcont/oscillation.hpp"

namespace modcont {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind {
  hat_check,
  b_limit,
  hat_ratio,
  modulus_check,
  convergence,
  log_regularity,
  holog_regularity,
  hklg,
  sharpness,
  density,
};

std::string to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);

OscillationSpec parse_spec(const std::string& text);
std::string format_spec(const OscillationSpec& spec);

struct ExperimentConfig {
  std::string name;
  ExperimentKind kind = ExperimentKind::hat_check;

  std::vector<OscillationSpec> specs;              // data / subject specs
  std::optional<OscillationSpec> measure;          // measurement modulus
  std::optional<OscillationSpec> candidate;        // sharpness candidate
  std::vector<double> alphas;                      // sweeps
  std::vector<double> lambdas;
  std::vector<double> radii;
  std::vector<int> grids;                          // ascending
  std::vector<double> op;                          // n×n row-major; empty = Laplacian
  double margin = 0.25;                            // fraction of the box dropped per side
  double window_lo = 0.0;                          // 0 = 4h
  double window_hi = 0.0;                          // 0 = half the largest admissible radius
  double cutoff = 0.36;
  double tolerance = 0.0;                          // 0 = criterion default
  std::string data = "radial";                     // radial | counterexample | zero
  int offset_cap = 256;
  int samples = 200;
  unsigned seed = 20261015;
  std::string output_dir;                          // empty = no files

  std::map<std::string, std::string> raw;          // echo for provenance
};

/// Parses one section's keys. Unknown keys and malformed values throw.
ExperimentConfig parse_experiment(const std::string& name,
                                  const std::map<std::string, std::string>& keys);

/// Parses a suite manifest; duplicate section names throw ConfigError.
std::vector<ExperimentConfig> parse_suite(std::istream& in);
std::vector<ExperimentConfig> load_suite(const std::string& path);

/// The bundled suite covering acceptance criteria 1-9.
const std::string& default_suite_text();
std::vector<ExperimentConfig> default_suite();

}  // namespace modcont
