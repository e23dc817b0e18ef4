#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "smoothflood/config.hpp"
#include "smoothflood/engine.hpp"
#include "smoothflood/stats.hpp"

namespace smoothflood {

struct CellSummary {
  std::size_t trials = 0;
  double ft_min = 0, ft_median = 0, ft_mean = 0, ft_p90 = 0, ft_max = 0;
  double capped_fraction = 0;
  double mean_noise_per_round = 0;
  double mean_rejections = 0;
};

struct CellResult {
  Cell cell;
  std::size_t round_cap = 0;
  std::vector<TrialRecord> trials;
  CellSummary summary;

  /// Flooding times with capped trials counted as the round cap.
  std::vector<double> flooding_times() const;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<CellResult> cells;
};

struct FitRow {
  FitSpec spec;
  std::vector<double> x;
  std::vector<double> y;
  std::size_t excluded = 0;
  bool ok = false;
  std::string error;
  PowerFit fit;
};

struct CompareRow {
  std::string name;
  std::size_t n = 0;
  std::string model;
  std::string numerator;
  std::string denominator;
  double median_numerator = 0;
  double median_denominator = 0;
  RatioInterval interval;
};

std::uint64_t trial_seed(std::uint64_t base_seed, const std::string& cell_key, std::size_t trial);

/// Summary statistics; capped trials count as `round_cap`.
CellSummary summarize(const std::vector<TrialRecord>& trials, std::size_t round_cap);

/// Worker count from SMOOTHFLOOD_WORKERS, else the OpenMP default.
int default_workers();

/// Runs every (cell, trial) pair on `workers` OpenMP threads.
ExperimentResult run_experiment(const ExperimentConfig& config, int workers);
/// Single-threaded reference; must match run_experiment exactly.
ExperimentResult run_experiment_serial(const ExperimentConfig& config);

std::vector<FitRow> compute_fits(const ExperimentResult& result);
std::vector<CompareRow> compute_compares(const ExperimentResult& result);

void write_summary_csv(std::ostream& out, const ExperimentResult& result);
void write_trials_jsonl(std::ostream& out, const ExperimentResult& result);
void write_fits_csv(std::ostream& out, const std::vector<FitRow>& fits);
void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows);

/// summary.csv and (unless trace is none) trials.jsonl; with `sweep` also
/// fits.csv and compare.csv.
void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir, bool sweep);

}  // namespace smoothflood
