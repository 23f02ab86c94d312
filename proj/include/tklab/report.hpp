#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tklab/harness.hpp"

namespace tklab {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error("config field '" + field + "': " + what), field_name(field) {}
  std::string field_name;
};

/// One JSON document drives a batch run. Field names and defaults are
/// documented in the README; anything omitted takes the default here.
struct ExperimentConfig {
  std::string suite = "all";  // a2|stability|c2|resolvent|semigroup|decomposition|demo|all
  std::vector<std::string> functions = {"gauss1", "bump"};
  GridSchedule schedule = default_schedule();
  std::vector<double> levels = {1.0, 2.0, 4.0, 8.0};
  double lambda0 = 1.0;
  double t0 = 1.0;
  int time_points = 16;
  EvolveMethod method = EvolveMethod::pade_expm;
  double quad_rel_tol = 1e-10;
  int stability_trials = 10000;
  std::string out_dir = "out";
  std::uint64_t seed = 42;
};

/// Parses and validates a config document; throws ConfigError naming the
/// offending field.
ExperimentConfig parse_config_json(const std::string& json_text);

/// Canonical (sorted-key) JSON for hashing and the manifest.
std::string config_canonical_json(const ExperimentConfig& cfg);

struct SuiteOutcome {
  std::string name;
  bool pass = false;
  double wall_seconds = 0.0;
  std::vector<std::string> notes;
};

struct RunManifest {
  std::string version;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<SuiteOutcome> suites;
  std::vector<std::pair<std::string, std::string>> files;  // path -> fnv1a64 digest
  bool all_pass = false;
};

/// Executes the selected suites, writes one CSV per suite into out_dir plus
/// manifest.json, and returns the manifest. TKLAB_QUAD_RTOL in the
/// environment overrides the config's quadrature tolerance.
RunManifest run_experiments(const ExperimentConfig& cfg);

void write_manifest_json(const RunManifest& m, std::ostream& out);

std::string fnv1a64_hex(std::string_view data);

// CSV emitters (RFC-4180-style, header row, fixed column order, 17
// significant digits, rows ordered by grid then level then time).
void emit_convergence_csv(const std::vector<ConvergenceReport>& reports,
                          const std::string& error_column, std::ostream& out);
void emit_consistency_csv(const std::vector<ConsistencyReport>& reports, std::ostream& out);
void emit_stability_csv(const StabilityReport& report, int trials, std::ostream& out);
void emit_decomposition_csv(const std::vector<ErrorDecompositionResult>& results,
                            std::ostream& out);
void emit_translation_csv(const TranslationDemoReport& report, std::ostream& out);
void emit_chirp_csv(const ChirpDemoReport& report, std::ostream& out);

}  // namespace tklab
