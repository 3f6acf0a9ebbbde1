#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "degen/modal.hpp"

namespace degen {

inline constexpr const char* kLibraryVersion = "0.1.0";

/// Invalid configuration or command line; maps to exit status 2.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string scenario;  // spectral-report | biorth-report | linear-null | cost-scan | nonhomogeneous | nonlinear
  double alpha = 0.5;
  double a1 = 2.0;
  double a2 = 1.0;
  double T = 1.0;
  std::size_t N = 12;
  double dt = 1e-3;
  double p = 3.0;
  double q = 1.2;
  double delta = 0.0;
  int precision_bits = 256;
  std::uint64_t seed = 1;
  std::string output_dir;

  // Optional scenario knobs.
  double M = 0.0;                  // weight constant; 0 = fit from a cost scan
  std::vector<double> horizons;    // cost-scan, default {1/8, 1/4, 1/2, 1}
  std::size_t ensemble = 5;        // random initial states per horizon
  std::size_t steps_per_stage = 400;
  double c1 = 0.1;                 // nonlinear coefficients f_i = c_i y2^2
  double c2 = 0.1;
  std::size_t maxit = 30;
  double amplitude = 1.0;          // source profile scale (nonhomogeneous)
};

/// Parses and validates one JSON document. Throws UsageError.
RunConfig parse_config(const std::string& json_text);
/// Resolved configuration as JSON (all keys, floats as decimal strings).
std::string config_json(const RunConfig& cfg);

/// Executes the scenario and writes its artifacts into `dir` (created if needed).
/// Numerical failures propagate as degen::Error.
void run_scenario(const RunConfig& cfg, const std::filesystem::path& dir, std::size_t jobs = 1);

/// Machine-readable error document for a failed run.
std::string error_json(const std::exception& e);

struct ReportLine {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// Re-checks the certificates of a run directory. Throws UsageError without a manifest.
std::vector<ReportLine> report_run(const std::filesystem::path& dir);
void print_report(std::ostream& os, const std::vector<ReportLine>& lines);

/// Reproducible random initial state: coefficients uniform in [-1, 1] divided by n^2.
ModalState random_state(std::size_t N, std::uint64_t seed);

}  // namespace degen
