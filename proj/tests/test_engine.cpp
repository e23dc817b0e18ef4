#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "smoothflood/engine.hpp"

using namespace smoothflood;

namespace {

// Adds a fixed tracer edge every round if it is missing.
class TracerNoise final : public NoiseProcess {
 public:
  explicit TracerNoise(Edge e) : e_(e) {}
  RoundNoise apply(Graph& working, std::span<const Edge>, std::size_t, RoundRng&) override {
    RoundNoise rn;
    if (!working.has_edge(e_)) {
      working.add_edge(e_);
      rn.toggled.push_back(e_);
      rn.magnitude = 1;
    }
    return rn;
  }

 private:
  Edge e_;
};

struct Named {
  std::string what;
  std::unique_ptr<Adversary> adv;
  SmoothingModel model;
};

std::vector<Named> pairings(std::size_t n) {
  std::vector<Named> out;
  auto add = [&](const std::string& kind, SmoothingModel m) {
    AdversarySpec spec;
    spec.kind = kind;
    spec.c = 1;
    out.push_back({kind + "/" + m.label(), make_adversary(spec, n, m), m});
  };
  add("spooling", SmoothingModel::k_smooth(2));
  add("adaptive_spooling", SmoothingModel::k_smooth(0.5));
  add("low_churn", SmoothingModel::proportional(0.2));
  add("cassette", SmoothingModel::targeted(0.3));
  add("star_recenter", SmoothingModel::targeted(0.5));
  add("static", SmoothingModel::proportional(1.0));
  add("spooling", SmoothingModel::proportional(0.5));
  return out;
}

}  // namespace

TEST_CASE("flood step") {
  VertexSet s(4);
  s.insert(0);
  CHECK(flood_step(path_graph(4), s) == 1);
  CHECK(s.members() == std::vector<VertexId>{0, 1});

  VertexSet c(9);
  c.insert(4);
  flood_step(star_graph(9, 4), c);
  CHECK(c.full());
  CHECK(flood_step(star_graph(9, 4), c) == 0);

  // Frontier expansion against a neighbour scan, on both branches of the kernel.
  RoundRng rng(1);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t n = 2 + rng.uniform_below(150);
    Graph g(n);
    for (VertexId u = 0; u < n; ++u) {
      for (VertexId v = u + 1; v < n; ++v) {
        if (rng.bernoulli(3.0 / n)) g.add_edge(u, v);
      }
    }
    VertexSet inf(n);
    const double dens = rng.uniform01();
    for (VertexId v = 0; v < n; ++v) {
      if (rng.bernoulli(dens)) inf.insert(v);
    }
    VertexSet expect = inf;
    for (VertexId v = 0; v < n; ++v) {
      for (VertexId w = 0; w < n; ++w) {
        if (inf.contains(w) && g.has_edge(v, w)) expect.insert(v);
      }
    }
    const std::size_t before = inf.size();
    CHECK(flood_step(g, inf) == expect.size() - before);
    CHECK(inf == expect);
  }
}

TEST_CASE("zero noise flooding times") {
  for (std::size_t n : {2, 5, 17, 100}) {
    SpoolingAdversary s(n);
    CHECK(run_trial(s, SmoothingModel::k_smooth(0), RngLineage{1}).flooding_time == n - 1);
    StaticAdversary p(path_graph(n));
    CHECK(run_trial(p, SmoothingModel::k_smooth(0), RngLineage{1}).flooding_time == n - 1);
  }
  StaticAdversary single(Graph(1));
  CHECK(run_trial(single, SmoothingModel::k_smooth(0), RngLineage{1}).flooding_time == 0);
}

TEST_CASE("communication uses the smoothed graph") {
  // Path 0-1-2-3-4 takes 4 rounds; a tracer edge (0,4) in G'_i cuts it to 2.
  StaticAdversary p(path_graph(5));
  TracerNoise tracer(Edge{0, 4});
  CHECK(run_trial(p, tracer, RngLineage{1}).flooding_time == 2);

  // The tracer is reverted before the next proposal is formed, so the
  // proposal the observer sees never contains it.
  StaticAdversary p2(path_graph(5));
  RunOptions opts;
  bool leaked = false;
  opts.observer.on_proposal = [&](std::size_t, const Graph& g, const EdgeDelta&) {
    leaked = leaked || g.has_edge(0, 4);
  };
  run_trial(p2, tracer, RngLineage{1}, opts);
  CHECK_FALSE(leaked);
}

TEST_CASE("round cap gives a sentinel") {
  SpoolingAdversary s(50);
  RunOptions opts;
  opts.max_rounds = 10;
  const TrialRecord r = run_trial(s, SmoothingModel::k_smooth(0), RngLineage{1}, opts);
  CHECK_FALSE(r.flooding_time.has_value());
  CHECK(r.rounds_run == 10);
  CHECK(to_json(r)["capped"] == true);
  CHECK(to_json(r)["flooding_time"].is_null());
}

TEST_CASE("trace invariants across pairings") {
  const std::size_t n = 64;
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    for (Named& p : pairings(n)) {
      CAPTURE(p.what);
      RunOptions opts;
      opts.keep_rounds = true;
      Graph prev_smoothed;
      std::vector<std::size_t> churn_seen;
      std::size_t noise_seen = 0;
      opts.observer.on_proposal = [&](std::size_t round, const Graph& g, const EdgeDelta&) {
        CHECK(is_connected(g));
        churn_seen.push_back(round == 1 ? 0 : hamming_distance(prev_smoothed, g));
        prev_smoothed = g;
      };
      opts.observer.on_round = [&](std::size_t, const Graph& g, const VertexSet& inf) {
        CHECK(is_connected(g));
        CHECK(inf.contains(0));
        noise_seen += hamming_distance(prev_smoothed, g);
        prev_smoothed = g;
      };
      const TrialRecord r = run_trial(*p.adv, p.model, RngLineage{7, trial}, opts);
      REQUIRE(r.flooding_time.has_value());
      CHECK(*r.flooding_time <= n - 1);
      CHECK(r.rounds.size() == r.rounds_run);
      // total_noise sums the budgets t_i; a uniform draw may toggle fewer.
      CHECK(noise_seen <= r.total_noise);
      std::size_t informed = 1;
      for (const RoundTrace& t : r.rounds) {
        CHECK(t.newly_informed >= 1);
        CHECK(t.informed == informed + t.newly_informed);
        informed = t.informed;
        CHECK(t.churn == churn_seen[t.round - 1]);
      }
      CHECK(informed == n);
    }
  }
}

TEST_CASE("low churn stays within two to five") {
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    LowChurnAdversary a(512);
    const TrialRecord r = run_trial(a, SmoothingModel::proportional(0.2), RngLineage{3, trial});
    REQUIRE(r.churn_min.has_value());
    CHECK(*r.churn_min >= 2);
    CHECK(*r.churn_max <= 5);
  }
}

TEST_CASE("engine matches the standalone samplers") {
  // Targeted smoothing reads G'_{i-1}, so this also checks the engine's
  // in-place bookkeeping of the previous smoothed graph.
  const std::size_t n = 40;
  for (std::uint64_t trial = 0; trial < 25; ++trial) {
    const RngLineage lineage{99, trial};
    CassetteAdversary engine_adv(n, 2);
    std::vector<Graph> seen;
    RunOptions opts;
    opts.observer.on_round = [&](std::size_t, const Graph& g, const VertexSet&) { seen.push_back(g); };
    const TrialRecord rec = run_trial(engine_adv, SmoothingModel::targeted(0.4), lineage, opts);

    CassetteAdversary ref_adv(n, 2);
    VertexSet inf(n);
    inf.insert(0);
    Graph prev = ref_adv.graph_at(1);
    std::size_t round = 0;
    while (!inf.full()) {
      ++round;
      RoundRng rng(lineage.at_round(round).with_tag(StreamTag::kNoise));
      const NoiseOutcome out = next_targeted(prev, ref_adv.graph_at(round), 0.4, rng);
      REQUIRE(round <= seen.size());
      CHECK(out.smoothed == seen[round - 1]);
      flood_step(out.smoothed, inf);
      prev = out.smoothed;
    }
    CHECK(rec.flooding_time == round);
  }
}

TEST_CASE("determinism") {
  for (Named& p : pairings(48)) {
    const auto a = to_json(run_trial(*p.adv, p.model, RngLineage{5, 3}, RunOptions{.keep_rounds = true}));
    const auto b = to_json(run_trial(*p.adv, p.model, RngLineage{5, 3}, RunOptions{.keep_rounds = true}));
    CHECK(a == b);
  }
}

TEST_CASE("disconnected graphs are rejected") {
  CHECK_THROWS_AS(SequenceAdversary({Graph(3)}), UsageError);
}

TEST_CASE("targeted noise on a full spool recentring starves") {
  // Each recentring moves about n edges; reverting each with probability
  // 0.7 almost never leaves a connected graph.
  SpoolingAdversary s(64);
  RunOptions opts;
  opts.limits.max_retries = 1000;
  CHECK_THROWS_AS(run_trial(s, SmoothingModel::targeted(0.7), RngLineage{1}, opts), SamplerStarvation);
}
