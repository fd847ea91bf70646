#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pcuss/ensemble.hpp"

namespace pcuss {

using json = nlohmann::json;

struct ExperimentConfig {
  // certify-base | completeness | soundness | indistinguishability |
  // lengths | separation
  std::string experiment;
  std::vector<unsigned> levels{1};
  unsigned t = 6;
  std::size_t k = 2;
  std::vector<std::string> backends{"exhaustive"};
  std::vector<std::uint64_t> seeds{1};
  std::uint64_t trials = 100;
  // Separation: trials per far-instance family.
  std::uint64_t far_trials = 300;
  double eps = 0.05;
  double delta = 0.25;
  std::uint64_t samples = 1000000;
  std::uint64_t probes = 10000;
  unsigned q_draws = 20;
  std::vector<unsigned> q_sizes{1, 4, 8, 12};
  bool enforce_guard = true;
  bool require_ensemble_distance = false;
  unsigned threads = 0;
  std::string json_out;
  std::string csv_out;
};

ExperimentConfig config_from_json(const json& j);
json config_to_json(const ExperimentConfig& c);

struct ExperimentResult {
  json report;
  std::vector<json> records;
  bool pass = true;
  std::vector<std::string> failures;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

// Sorted keys, two-space indent, trailing newline.
std::string dump_report(const json& report);
std::string records_csv(const std::vector<json>& records);
// Writes the JSON report, its CSV mirror and a .meta.json with timing.
void write_outputs(const ExperimentConfig& config, const ExperimentResult& result, double elapsed_seconds);

// One-sided lower confidence bound (Wilson score, z = 2.326) on a rate.
double wilson_lower_99(std::uint64_t successes, std::uint64_t trials);

struct LengthRow {
  unsigned ell = 0;
  unsigned t = 0;
  std::uint64_t m = 0;
  std::uint64_t z = 0;
  double z_model = 0;
  double log_m = 0;
  double ratio = 0;
};

// z_model / (m * (log^(ell) m)^c).
LengthRow length_row(const LevelParams& params, unsigned c);

}  // namespace pcuss
