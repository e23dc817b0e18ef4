#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smoothflood/graph.hpp"
#include "smoothflood/smoothing.hpp"

namespace smoothflood {

/// What an adversary may look at when proposing G_i.
struct AdversaryView {
  std::size_t round = 1;
  /// G'_{i-1}, the graph communication used last round.
  const Graph& smoothed_prev;
  /// I_{i-1}.
  const VertexSet& informed;
  /// G'_{i-1} xor G_{i-1}: the edges last round's noise flipped.
  std::span<const Edge> last_noise;
};

/// Proposes the adversarial graph sequence as deltas. The source is vertex 0.
class Adversary {
 public:
  virtual ~Adversary() = default;

  virtual std::size_t vertex_count() const = 0;
  virtual std::string name() const = 0;
  virtual bool oblivious() const = 0;

  /// Resets internal state and returns G_1.
  virtual Graph initial_graph() = 0;
  /// Delta taking G_{i-1} to G_i, for round i >= 2.
  virtual EdgeDelta propose(const AdversaryView& view) = 0;

  /// Throws ConfigError when the construction's premises fail under `model`.
  virtual void validate(const SmoothingModel& model) const { (void)model; }
};

/// An adversary that only sees the round number.
class ObliviousAdversary : public Adversary {
 public:
  bool oblivious() const final { return true; }
  Graph initial_graph() override { return graph_at(1); }
  EdgeDelta propose(const AdversaryView& view) final { return propose_round(view.round); }

  /// G_i built from scratch.
  virtual Graph graph_at(std::size_t round) const = 0;
  /// Delta from G_{round-1} to G_round.
  virtual EdgeDelta propose_round(std::size_t round) = 0;
};

/// Edges incident to `touched` whose membership differs between two
/// predicate-described graphs. `touched` must be sorted and unique and must
/// cover an endpoint of every differing edge.
template <class OldHas, class NewHas>
EdgeDelta predicate_delta(std::size_t n, std::span<const VertexId> touched, OldHas old_has,
                          NewHas new_has);

/// Star on the path: the spooling construction.
class SpoolingAdversary final : public ObliviousAdversary {
 public:
  explicit SpoolingAdversary(std::size_t n);
  std::size_t vertex_count() const override { return n_; }
  std::string name() const override { return "spooling"; }
  Graph graph_at(std::size_t round) const override;
  EdgeDelta propose_round(std::size_t round) override;
  /// Whether edge e is in G_round.
  bool contains(std::size_t round, Edge e) const;

 private:
  std::size_t n_;
};

/// Spooling that re-targets the informed set each round.
class AdaptiveSpoolingAdversary final : public Adversary {
 public:
  explicit AdaptiveSpoolingAdversary(std::size_t n);
  std::size_t vertex_count() const override { return n_; }
  std::string name() const override { return "adaptive_spooling"; }
  bool oblivious() const override { return false; }
  Graph initial_graph() override;
  EdgeDelta propose(const AdversaryView& view) override;

  /// The graph this adversary builds for informed set `informed`.
  static Graph graph_for(const VertexSet& informed);

 private:
  std::size_t n_;
  VertexSet prev_;
};

/// Two-hub construction whose churn stays constant per round.
class LowChurnAdversary final : public Adversary {
 public:
  explicit LowChurnAdversary(std::size_t n);
  std::size_t vertex_count() const override { return n_; }
  std::string name() const override { return "low_churn"; }
  bool oblivious() const override { return false; }
  Graph initial_graph() override;
  EdgeDelta propose(const AdversaryView& view) override;
  void validate(const SmoothingModel& model) const override;

  static Graph graph_for(const VertexSet& informed);

 private:
  std::size_t n_;
  VertexSet prev_;
};

/// Path with chords to the endpoints that are handed over every t rounds.
class CassetteAdversary final : public ObliviousAdversary {
 public:
  CassetteAdversary(std::size_t n, std::size_t t);
  /// t = floor(c * log_{1/epsilon} n); throws ConfigError unless 0 < epsilon < 1 and t >= 1.
  static CassetteAdversary from_noise(std::size_t n, double c, double epsilon);

  std::size_t vertex_count() const override { return n_; }
  std::string name() const override { return "cassette"; }
  std::size_t spacing() const { return t_; }
  Graph graph_at(std::size_t round) const override;
  EdgeDelta propose_round(std::size_t round) override;
  void validate(const SmoothingModel& model) const override;
  bool contains(std::size_t round, Edge e) const;

 private:
  std::size_t n_;
  std::size_t t_;
};

/// Union of two stars whose centers advance every `period` rounds.
class StarRecenterAdversary final : public ObliviousAdversary {
 public:
  StarRecenterAdversary(std::size_t n, std::size_t period);
  /// Smallest period with n * epsilon^period <= 1.
  static std::size_t default_period(std::size_t n, double epsilon);

  std::size_t vertex_count() const override { return n_; }
  std::string name() const override { return "star_recenter"; }
  Graph graph_at(std::size_t round) const override;
  EdgeDelta propose_round(std::size_t round) override;
  void validate(const SmoothingModel& model) const override;

 private:
  VertexId center(std::size_t block) const { return static_cast<VertexId>(block % n_); }
  std::size_t n_;
  std::size_t period_;
};

/// The same connected graph every round.
class StaticAdversary final : public ObliviousAdversary {
 public:
  explicit StaticAdversary(Graph g);
  std::size_t vertex_count() const override { return g_.vertex_count(); }
  std::string name() const override { return "static"; }
  Graph graph_at(std::size_t) const override { return g_; }
  EdgeDelta propose_round(std::size_t) override { return {}; }

 private:
  Graph g_;
};

/// Fixed list of graphs; the last one repeats.
class SequenceAdversary final : public ObliviousAdversary {
 public:
  explicit SequenceAdversary(std::vector<Graph> graphs);
  std::size_t vertex_count() const override { return graphs_.front().vertex_count(); }
  std::string name() const override { return "sequence"; }
  Graph graph_at(std::size_t round) const override;
  EdgeDelta propose_round(std::size_t round) override;

 private:
  std::vector<Graph> graphs_;
};

/// Declarative adversary choice, as read from a config file.
struct AdversarySpec {
  /// spooling, adaptive_spooling, low_churn, cassette, star_recenter, static
  std::string kind = "spooling";
  /// cassette: t = floor(c * log_{1/eps} n) unless `t` is given.
  double c = 2.0;
  std::optional<std::size_t> t;
  /// star_recenter block length; defaults to default_period().
  std::optional<std::size_t> period;
  /// static: path, star, cycle or complete.
  std::string graph = "path";

  std::string label() const;
};

/// Builds and validates an adversary against `model`. Throws ConfigError.
std::unique_ptr<Adversary> make_adversary(const AdversarySpec& spec, std::size_t n,
                                          const SmoothingModel& model);

// ---------------------------------------------------------------------------

template <class OldHas, class NewHas>
EdgeDelta predicate_delta(std::size_t n, std::span<const VertexId> touched, OldHas old_has,
                          NewHas new_has) {
  EdgeDelta d;
  auto is_touched = [&](VertexId w) { return std::binary_search(touched.begin(), touched.end(), w); };
  for (VertexId s : touched) {
    if (s >= n) continue;
    for (VertexId w = 0; w < n; ++w) {
      if (w == s) continue;
      if (w < s && is_touched(w)) continue;
      const Edge e = Edge::make(s, w);
      const bool before = old_has(e);
      const bool after = new_has(e);
      if (before != after) (after ? d.added : d.removed).push_back(e);
    }
  }
  return d;
}

}  // namespace smoothflood
