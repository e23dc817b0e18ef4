#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace smoothflood {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  /// Deterministic description of the measured values.
  std::string detail;
  /// Wall time; reported but never written to CSV.
  double seconds = 0.0;
};

struct ValidationOptions {
  std::string suite = "full";
  std::filesystem::path config_dir = SMOOTHFLOOD_CONFIG_DIR;
  /// When set, every preset's outputs and criteria.csv are written here.
  std::optional<std::filesystem::path> out_dir;
  int workers = 1;
  /// Called after each criterion finishes.
  void (*progress)(const CriterionResult&) = nullptr;
};

/// Names accepted by ValidationOptions::suite.
std::vector<std::string> validation_suites();

/// Runs the suite's criteria in id order. Throws ConfigError on an unknown
/// suite or a broken preset.
std::vector<CriterionResult> run_validation(const ValidationOptions& options);

}  // namespace smoothflood
