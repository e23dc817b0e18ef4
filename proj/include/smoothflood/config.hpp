#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "smoothflood/adversary.hpp"
#include "smoothflood/smoothing.hpp"

namespace smoothflood {

enum class TraceLevel { kNone, kSummary, kRounds };

/// One (n, model, adversary) combination of an experiment.
struct Cell {
  std::size_t n = 0;
  SmoothingModel model;
  AdversarySpec adversary;

  /// Stable identifier; also feeds the trial seeds.
  std::string key() const;
};

/// Cross product of the listed values.
struct GridBlock {
  std::vector<std::size_t> ns;
  std::vector<SmoothingModel> models;
  std::vector<AdversarySpec> adversaries;
};

/// Power-law fit of median flooding time along one axis.
struct FitSpec {
  std::string name;
  /// "n" or "param".
  std::string axis = "n";
  std::optional<std::string> adversary;
  std::optional<std::string> model;
  std::optional<std::size_t> n;
  std::optional<double> param;
  std::optional<double> min;
  std::optional<double> max;
};

/// Ratio of medians between two adversaries on otherwise matching cells.
struct CompareSpec {
  std::string name;
  std::string numerator;
  std::string denominator;
  std::size_t resamples = 2000;
  double level = 0.95;
};

struct ExperimentConfig {
  std::string name;
  std::uint64_t base_seed = 1;
  std::size_t trials = 1;
  std::optional<std::size_t> max_rounds;
  TraceLevel trace = TraceLevel::kSummary;
  std::string output_dir = "out";
  std::vector<GridBlock> grid;
  std::vector<FitSpec> fits;
  std::vector<CompareSpec> compares;

  /// Cells of every grid block in order, duplicates removed. Validates each
  /// cell's premises and throws ConfigError on the first failure.
  std::vector<Cell> cells() const;
};

/// Throws ConfigError on malformed input or unknown keys.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

SmoothingModel parse_model(const nlohmann::json& j);
AdversarySpec parse_adversary(const nlohmann::json& j);

std::string to_string(TraceLevel level);

}  // namespace smoothflood
