#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "smoothflood/graph.hpp"
#include "smoothflood/rng.hpp"

namespace smoothflood {

/// A model or adversary premise does not hold for the requested configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejection sampling exceeded its retry ceiling.
class SamplerStarvation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModelKind { kKSmooth, kProportional, kTargeted };

/// Noise model for a smoothed dynamic graph. The allowed family is always
/// "connected graphs".
struct SmoothingModel {
  ModelKind kind = ModelKind::kKSmooth;
  double k = 0.0;
  double epsilon = 0.0;
  /// Proportional only; defaults to floor(n/16).
  std::optional<std::size_t> cap;

  static SmoothingModel k_smooth(double k);
  static SmoothingModel proportional(double epsilon, std::optional<std::size_t> cap = std::nullopt);
  static SmoothingModel targeted(double epsilon);

  /// The model's scalar parameter (k or epsilon).
  double parameter() const { return kind == ModelKind::kKSmooth ? k : epsilon; }
  std::size_t effective_cap(std::size_t n) const { return cap.value_or(n / 16); }
  /// Throws ConfigError naming the violated premise.
  void validate(std::size_t n) const;
  /// Stable text label, e.g. "k_smooth(k=0.25)".
  std::string label() const;
  std::string kind_name() const;
};

struct SamplerLimits {
  std::size_t max_retries = 1'000'000;
};

/// Result of one smoothing step.
struct NoiseOutcome {
  Graph smoothed;
  std::size_t noise_magnitude = 0;
  /// Edges whose membership the noise flipped relative to the proposal.
  std::vector<Edge> toggled;
  std::size_t rejections = 0;
  bool cap_bound = false;
};

/// Randomized rounding: ceil(x) with probability x - floor(x), else floor(x).
/// Values within 1e-9 of an integer are treated as that integer.
std::size_t roundp_sample(double x, RoundRng& rng);

/// Toggles chosen by an in-place sampler, with the number of rejected draws.
struct ToggleDraw {
  std::vector<Edge> toggled;
  std::size_t rejections = 0;
};

/// Uniform t-smoothing applied in place. `g` must be connected on entry and
/// holds the smoothed graph on return.
ToggleDraw t_smoothing_in_place(Graph& g, std::size_t t, RoundRng& rng,
                                const SamplerLimits& limits = {});

/// Targeted smoothing applied in place. `g` holds the proposal on entry;
/// `changed` is the sorted symmetric difference between the previous graph and
/// the proposal. Each changed slot is reverted independently with probability
/// epsilon; disconnected results are redrawn.
ToggleDraw targeted_in_place(Graph& g, std::span<const Edge> changed, double epsilon,
                             RoundRng& rng, const SamplerLimits& limits = {});

NoiseOutcome sample_t_smoothing(const Graph& g_adv, std::size_t t, RoundRng& rng,
                                const SamplerLimits& limits = {});
NoiseOutcome sample_targeted_smoothing(const Graph& g_adv, const Graph& g_old, double epsilon,
                                       RoundRng& rng, const SamplerLimits& limits = {});

NoiseOutcome next_k_smoothed(const Graph& g_adv, double k, RoundRng& rng,
                             const SamplerLimits& limits = {});
NoiseOutcome next_proportional(const Graph& g_prev_smoothed, const Graph& g_adv, double epsilon,
                               std::size_t cap, RoundRng& rng, const SamplerLimits& limits = {});
NoiseOutcome next_targeted(const Graph& g_prev_smoothed, const Graph& g_adv, double epsilon,
                           RoundRng& rng, const SamplerLimits& limits = {});

/// Per-round noise applied by the engine.
struct RoundNoise {
  std::size_t magnitude = 0;
  std::vector<Edge> toggled;
  std::size_t rejections = 0;
  bool cap_bound = false;
};

class NoiseProcess {
 public:
  virtual ~NoiseProcess() = default;

  /// Whether apply() needs the churn edges themselves rather than only their count.
  virtual bool needs_churn_edges() const { return false; }

  /// `working` holds the proposal G_i on entry and G'_i on return.
  /// `churn` is the sorted G'_{i-1} xor G_i when needs_churn_edges(), else empty;
  /// `churn_size` is always its cardinality.
  virtual RoundNoise apply(Graph& working, std::span<const Edge> churn, std::size_t churn_size,
                           RoundRng& rng) = 0;
};

std::unique_ptr<NoiseProcess> make_noise_process(const SmoothingModel& model, std::size_t n,
                                                 const SamplerLimits& limits = {});

}  // namespace smoothflood
