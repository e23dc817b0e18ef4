#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "smoothflood/smoothing.hpp"

using namespace smoothflood;

namespace {

constexpr std::size_t kDraws = 100000;

}  // namespace

TEST_CASE("roundp") {
  RoundRng rng(1);
  CHECK(roundp_sample(3.0, rng) == 3);
  CHECK(roundp_sample(2.0 + 1e-12, rng) == 2);
  CHECK(roundp_sample(0.0, rng) == 0);

  // Snapped values must not consume draws.
  RoundRng a(9), b(9);
  roundp_sample(5.0, a);
  CHECK(a.uniform01() == b.uniform01());

  std::size_t ones = 0, sum = 0;
  for (std::size_t i = 0; i < kDraws; ++i) {
    const std::size_t half = roundp_sample(0.5, rng);
    CHECK((half == 0 || half == 1));
    ones += half;
    sum += roundp_sample(2.25, rng);
  }
  CHECK(std::abs(static_cast<double>(ones) / kDraws - 0.5) < 0.01);
  const double m = static_cast<double>(sum) / kDraws;
  CHECK(m >= 2.24);
  CHECK(m <= 2.26);
}

TEST_CASE("t-smoothing of the triangle is uniform over four graphs") {
  RoundRng rng(2);
  const Graph tri = complete_graph(3);
  std::map<std::vector<Edge>, std::size_t> freq;
  for (std::size_t i = 0; i < kDraws; ++i) {
    const NoiseOutcome out = sample_t_smoothing(tri, 1, rng);
    CHECK(is_connected(out.smoothed));
    auto toggled = out.toggled;
    std::sort(toggled.begin(), toggled.end());
    CHECK(toggled == symmetric_difference(tri, out.smoothed));
    ++freq[out.smoothed.edges()];
  }
  CHECK(freq.size() == 4);
  for (const auto& [edges, c] : freq) CHECK(std::abs(static_cast<double>(c) / kDraws - 0.25) < 0.01);
}

TEST_CASE("t-smoothing keeps graphs connected and within distance t") {
  RoundRng rng(3);
  const Graph p = path_graph(40);
  for (int i = 0; i < 2000; ++i) {
    Graph g = p;
    const ToggleDraw d = t_smoothing_in_place(g, 2, rng);
    CHECK(is_connected(g));
    CHECK(hamming_distance(g, p) == d.toggled.size());
    CHECK(d.toggled.size() <= 2);
  }
  Graph single = path_graph(2);
  CHECK(t_smoothing_in_place(single, 1, rng).toggled.empty());
}

TEST_CASE("t-smoothing preconditions") {
  RoundRng rng(4);
  Graph split(4);
  split.add_edge(0, 1);
  CHECK_THROWS_AS(sample_t_smoothing(split, 1, rng), UsageError);

  // On a 3-path two of the three single toggles disconnect, so with no
  // retries allowed a rejection surfaces quickly.
  Graph p = path_graph(3);
  SamplerLimits tight;
  tight.max_retries = 0;
  bool starved = false;
  for (int i = 0; i < 50 && !starved; ++i) {
    Graph g = p;
    try {
      t_smoothing_in_place(g, 1, rng, tight);
    } catch (const SamplerStarvation&) {
      starved = true;
    }
  }
  CHECK(starved);
}

TEST_CASE("k-smoothing magnitude") {
  RoundRng rng(5);
  const Graph g = path_graph(64);
  std::size_t ones = 0;
  for (std::size_t i = 0; i < kDraws; ++i) {
    const NoiseOutcome out = next_k_smoothed(g, 0.25, rng);
    CHECK(out.noise_magnitude <= 1);
    ones += out.noise_magnitude;
  }
  CHECK(std::abs(static_cast<double>(ones) / kDraws - 0.25) < 0.01);

  const NoiseOutcome none = next_k_smoothed(g, 0.0, rng);
  CHECK(none.smoothed == g);
  CHECK(none.toggled.empty());
}

TEST_CASE("proportional magnitude follows churn") {
  RoundRng rng(6);
  const Graph prev = cycle_graph(64);
  Graph adv = prev;
  adv.add_edge(0, 10);
  adv.add_edge(0, 20);
  std::size_t ones = 0;
  for (std::size_t i = 0; i < kDraws; ++i) {
    const NoiseOutcome out = next_proportional(prev, adv, 0.2, 4, rng);
    CHECK(out.noise_magnitude <= 1);
    ones += out.noise_magnitude;
  }
  CHECK(std::abs(static_cast<double>(ones) / kDraws - 0.4) < 0.01);

  const NoiseOutcome still = next_proportional(prev, prev, 1.0, 4, rng);
  CHECK(still.noise_magnitude == 0);
  CHECK(still.smoothed == prev);
}

TEST_CASE("proportional cap binds") {
  RoundRng rng(7);
  const Graph prev = complete_graph(20);
  const Graph adv = star_graph(20);
  const NoiseOutcome out = next_proportional(prev, adv, 1.0, 3, rng);
  CHECK(out.cap_bound);
  CHECK(out.noise_magnitude == 3);
}

TEST_CASE("targeted single change reverts with probability epsilon") {
  RoundRng rng(8);
  const Graph old = cycle_graph(8);
  Graph adv = old;
  adv.add_edge(0, 4);
  std::size_t reverted = 0;
  for (std::size_t i = 0; i < kDraws; ++i) {
    const NoiseOutcome out = next_targeted(old, adv, 0.3, rng);
    reverted += out.smoothed == old ? 1 : 0;
  }
  CHECK(std::abs(static_cast<double>(reverted) / kDraws - 0.3) < 0.01);
}

TEST_CASE("targeted two changes give four equal outcomes") {
  RoundRng rng(9);
  const Graph old = cycle_graph(6);
  Graph adv = old;
  adv.add_edge(0, 3);
  adv.remove_edge(1, 2);
  std::map<std::vector<Edge>, std::size_t> freq;
  for (std::size_t i = 0; i < kDraws; ++i) ++freq[next_targeted(old, adv, 0.5, rng).smoothed.edges()];
  CHECK(freq.size() == 4);
  for (const auto& [edges, c] : freq) CHECK(std::abs(static_cast<double>(c) / kDraws - 0.25) < 0.01);
}

TEST_CASE("targeted edge cases") {
  RoundRng rng(10);
  const Graph old = path_graph(5);
  Graph adv = old;
  adv.add_edge(0, 4);
  CHECK(next_targeted(old, adv, 0.0, rng).smoothed == adv);
  CHECK(next_targeted(old, adv, 1.0, rng).smoothed == old);
  CHECK(next_targeted(old, old, 0.7, rng).toggled.empty());

  // Reverting only the addition would isolate vertex 4; the other three
  // patterns survive with equal weight.
  Graph moved = path_graph(5);
  moved.remove_edge(3, 4);
  moved.add_edge(0, 4);
  std::map<std::vector<Edge>, std::size_t> freq;
  for (std::size_t i = 0; i < kDraws; ++i) {
    const NoiseOutcome out = next_targeted(old, moved, 0.5, rng);
    CHECK(is_connected(out.smoothed));
    ++freq[out.smoothed.edges()];
  }
  CHECK(freq.size() == 3);
  for (const auto& [edges, c] : freq) CHECK(std::abs(static_cast<double>(c) / kDraws - 1.0 / 3) < 0.01);
}

TEST_CASE("model validation") {
  CHECK_NOTHROW(SmoothingModel::k_smooth(2).validate(32));
  CHECK_THROWS_AS(SmoothingModel::k_smooth(2.5).validate(32), ConfigError);
  CHECK_THROWS_AS(SmoothingModel::k_smooth(-1).validate(32), ConfigError);
  CHECK_THROWS_AS(SmoothingModel::proportional(1.5).validate(64), ConfigError);
  CHECK_THROWS_AS(SmoothingModel::targeted(-0.1).validate(64), ConfigError);
  CHECK_THROWS_AS(SmoothingModel::targeted(1.0).validate(64), ConfigError);
  CHECK_NOTHROW(SmoothingModel::targeted(0.0).validate(64));
  CHECK(SmoothingModel::k_smooth(0.25).label() == "k_smooth(k=0.25)");
  CHECK(SmoothingModel::proportional(0.2).effective_cap(512) == 32);
  CHECK(SmoothingModel::proportional(0.2, 7).effective_cap(512) == 7);
}

TEST_CASE("noise process matches the standalone samplers") {
  const Graph prev = cycle_graph(32);
  Graph adv = prev;
  adv.add_edge(0, 16);
  adv.remove_edge(3, 4);
  const auto churn = symmetric_difference(prev, adv);
  for (const SmoothingModel& m :
       {SmoothingModel::k_smooth(1.5), SmoothingModel::proportional(0.5), SmoothingModel::targeted(0.4)}) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      RoundRng r1(seed), r2(seed);
      auto proc = make_noise_process(m, 32);
      Graph work = adv;
      const RoundNoise rn = proc->apply(work, churn, churn.size(), r1);
      NoiseOutcome ref;
      if (m.kind == ModelKind::kKSmooth) ref = next_k_smoothed(adv, m.k, r2);
      if (m.kind == ModelKind::kProportional) ref = next_proportional(prev, adv, m.epsilon, 2, r2);
      if (m.kind == ModelKind::kTargeted) ref = next_targeted(prev, adv, m.epsilon, r2);
      CHECK(work == ref.smoothed);
      CHECK(rn.magnitude == ref.noise_magnitude);
    }
  }
}
