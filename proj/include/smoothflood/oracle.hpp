#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "smoothflood/graph.hpp"
#include "smoothflood/smoothing.hpp"

namespace smoothflood {

/// Finite distribution over graphs, keyed by sorted edge-key lists.
class SupportTable {
 public:
  using Key = std::vector<std::uint64_t>;

  static Key key_of(const Graph& g);

  /// Adds probability mass to g's entry.
  void add(const Graph& g, long double p);
  void add(const Key& key, long double p) { mass_[key] += p; }
  long double probability(const Graph& g) const;
  std::size_t size() const { return mass_.size(); }
  long double total() const;
  const std::map<Key, long double>& entries() const { return mass_; }

 private:
  std::map<Key, long double> mass_;
};

/// Total variation distance, 0.5 * sum |p - q| over the union of supports.
double tv_distance(const SupportTable& p, const SupportTable& q);

/// Exact uniform t-smoothing distribution by enumerating every toggle set of
/// size <= t. Requires n <= 6 and t <= 3.
SupportTable enumerate_t_smoothing(const Graph& g_adv, std::size_t t);

/// Exact targeted smoothing distribution by enumerating every revert pattern
/// over the symmetric difference. Requires |g_old xor g_adv| <= 12.
SupportTable exact_targeted_distribution(const Graph& g_adv, const Graph& g_old, double epsilon);

/// Distribution of flooding time (empty key = not flooded by max_rounds).
using FloodingDistribution = std::map<std::optional<std::size_t>, long double>;

/// Exact flooding-time distribution for an oblivious graph sequence (last
/// graph repeats) under `model`, by expanding every random branch. Requires
/// n <= 5 and at most 4 graphs; states are merged between rounds and capped
/// at 100000.
FloodingDistribution exhaustive_flooding_time(const std::vector<Graph>& sequence,
                                              const SmoothingModel& model,
                                              std::size_t max_rounds);

}  // namespace smoothflood
