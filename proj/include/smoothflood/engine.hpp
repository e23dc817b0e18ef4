#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "json.hpp"

#include "smoothflood/adversary.hpp"
#include "smoothflood/graph.hpp"
#include "smoothflood/rng.hpp"
#include "smoothflood/smoothing.hpp"

namespace smoothflood {

struct RoundTrace {
  std::size_t round = 0;
  std::size_t informed = 0;
  std::size_t newly_informed = 0;
  /// |G'_{i-1} xor G_i|
  std::size_t churn = 0;
  std::size_t noise = 0;
  std::size_t rejections = 0;
  bool cap_bound = false;
  /// |G_{i-1} xor G_i|
  std::size_t proposal_delta = 0;
};

struct TrialRecord {
  std::size_t n = 0;
  /// Empty when the round cap was reached first.
  std::optional<std::size_t> flooding_time;
  std::size_t rounds_run = 0;
  std::size_t total_noise = 0;
  std::size_t total_rejections = 0;
  std::size_t total_churn = 0;
  std::size_t cap_bound_rounds = 0;
  /// Churn range over rounds 2 and later; empty when only one round ran.
  std::optional<std::size_t> churn_min;
  std::optional<std::size_t> churn_max;
  std::vector<RoundTrace> rounds;
};

/// Hooks into a running trial. Both are optional.
struct RoundObserver {
  /// After the adversary's proposal G_i is in place, before noise.
  std::function<void(std::size_t round, const Graph& proposal, const EdgeDelta& delta)> on_proposal;
  /// After the flood step on G'_i.
  std::function<void(std::size_t round, const Graph& smoothed, const VertexSet& informed)> on_round;
};

struct RunOptions {
  /// Defaults to 4n.
  std::optional<std::size_t> max_rounds;
  bool keep_rounds = false;
  /// Check every proposal that removes edges for connectivity.
  bool verify_proposals = true;
  SamplerLimits limits;
  RoundObserver observer;
};

/// One synchronous flooding round: every vertex of `informed` tells its
/// neighbours in g. Returns the number of newly informed vertices.
std::size_t flood_step(const Graph& g, VertexSet& informed);

/// Runs one flooding trial from source 0.
TrialRecord run_trial(Adversary& adversary, NoiseProcess& noise, const RngLineage& lineage,
                      const RunOptions& options = {});
TrialRecord run_trial(Adversary& adversary, const SmoothingModel& model, const RngLineage& lineage,
                      const RunOptions& options = {});

nlohmann::json to_json(const TrialRecord& record);
nlohmann::json to_json(const RoundTrace& trace);

}  // namespace smoothflood
