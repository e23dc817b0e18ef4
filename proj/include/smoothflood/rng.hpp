#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace smoothflood {

/// Stream tags separating independent draw sequences within one round.
enum class StreamTag : std::uint64_t {
  kNoise = 1,
  kAdversary = 2,
  kSampler = 3,
  kBootstrap = 4,
};

std::uint64_t splitmix64(std::uint64_t x);
/// Order-sensitive combination of two 64-bit values.
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);
/// FNV-1a over bytes; stable across platforms, unlike std::hash.
std::uint64_t stable_hash(std::string_view text);

/// Seed lineage (experiment seed, trial index, round index, stream tag).
struct RngLineage {
  std::uint64_t experiment_seed = 0;
  std::uint64_t trial = 0;
  std::uint64_t round = 0;
  StreamTag tag = StreamTag::kNoise;

  std::uint64_t mixed() const;
  RngLineage at_round(std::uint64_t r) const {
    RngLineage copy = *this;
    copy.round = r;
    return copy;
  }
  RngLineage with_tag(StreamTag t) const {
    RngLineage copy = *this;
    copy.tag = t;
    return copy;
  }
};

/// Deterministic generator for one lineage; identical lineage gives identical draws.
class RoundRng {
 public:
  explicit RoundRng(const RngLineage& lineage) : engine_(lineage.mixed()) {}
  explicit RoundRng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }
  double uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  bool bernoulli(double p) { return uniform01() < p; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace smoothflood
