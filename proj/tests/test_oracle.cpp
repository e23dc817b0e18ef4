#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "smoothflood/engine.hpp"
#include "smoothflood/oracle.hpp"

using namespace smoothflood;

namespace {

long double mass(const FloodingDistribution& d) {
  long double s = 0;
  for (const auto& [k, p] : d) s += p;
  return s;
}

double tv(const FloodingDistribution& a, const FloodingDistribution& b) {
  FloodingDistribution all = a;
  for (const auto& [k, p] : b) all[k];
  double s = 0;
  for (const auto& [k, p] : all) {
    const long double pa = a.count(k) ? a.at(k) : 0;
    const long double pb = b.count(k) ? b.at(k) : 0;
    s += static_cast<double>(std::fabs(pa - pb));
  }
  return s / 2;
}

FloodingDistribution empirical(const std::vector<Graph>& seq, const SmoothingModel& m, std::size_t max_rounds,
                               std::size_t trials) {
  FloodingDistribution d;
  RunOptions opts;
  opts.max_rounds = max_rounds;
  for (std::size_t t = 0; t < trials; ++t) {
    SequenceAdversary adv(seq);
    d[run_trial(adv, m, RngLineage{2024, t}, opts).flooding_time] += 1.0L / trials;
  }
  return d;
}

}  // namespace

TEST_CASE("t-smoothing enumeration") {
  // Triangle, one toggle: the triangle and its three spanning paths.
  const SupportTable tri = enumerate_t_smoothing(complete_graph(3), 1);
  CHECK(tri.size() == 4);
  for (const auto& [k, p] : tri.entries()) CHECK(std::fabs(static_cast<double>(p) - 0.25) < 1e-15);

  const SupportTable edge = enumerate_t_smoothing(path_graph(2), 1);
  CHECK(edge.size() == 1);
  CHECK(edge.probability(path_graph(2)) == doctest::Approx(1.0));

  // K4 minus at most two edges is always connected: 1 + 6 + 15.
  CHECK(enumerate_t_smoothing(complete_graph(4), 2).size() == 22);

  // Path 0-1-2-3 with one toggle: itself plus the three non-edges; each
  // removal disconnects.
  CHECK(enumerate_t_smoothing(path_graph(4), 1).size() == 4);

  CHECK(std::fabs(static_cast<double>(enumerate_t_smoothing(cycle_graph(6), 3).total()) - 1.0) < 1e-12);
  CHECK_THROWS(enumerate_t_smoothing(path_graph(7), 1));
}

TEST_CASE("targeted enumeration") {
  const Graph c = cycle_graph(5);
  const SupportTable same = exact_targeted_distribution(c, c, 0.4);
  CHECK(same.size() == 1);
  CHECK(same.probability(c) == doctest::Approx(1.0));

  Graph plus = c;
  plus.add_edge(0, 2);
  const SupportTable one = exact_targeted_distribution(plus, c, 0.3);
  CHECK(one.probability(plus) == doctest::Approx(0.7));
  CHECK(one.probability(c) == doctest::Approx(0.3));

  // Reverting the addition of (0,4) to a path whose (3,4) edge was removed
  // strands vertex 4, so that branch is filtered and the rest renormalized.
  Graph moved = path_graph(5);
  moved.remove_edge(3, 4);
  moved.add_edge(0, 4);
  const SupportTable cond = exact_targeted_distribution(moved, path_graph(5), 0.5);
  CHECK(cond.size() == 3);
  for (const auto& [k, p] : cond.entries()) CHECK(static_cast<double>(p) == doctest::Approx(1.0 / 3));

  // Swap (1,2) for (0,2) on a 4-path at eps = 1/4. Pattern weights are
  // 9/16 keep both, 3/16 revert the removal, 3/16 revert the addition
  // (disconnected), 1/16 revert both; conditioning divides by 13/16.
  Graph tree = path_graph(4);
  Graph cut = tree;
  cut.remove_edge(1, 2);
  cut.add_edge(0, 2);
  Graph tree_plus = tree;
  tree_plus.add_edge(0, 2);
  const SupportTable forced = exact_targeted_distribution(cut, tree, 0.25);
  CHECK(forced.size() == 3);
  CHECK(std::fabs(static_cast<double>(forced.total()) - 1.0) < 1e-12);
  CHECK(forced.probability(cut) == doctest::Approx(9.0 / 13));
  CHECK(forced.probability(tree_plus) == doctest::Approx(3.0 / 13));
  CHECK(forced.probability(tree) == doctest::Approx(1.0 / 13));
}

TEST_CASE("tv distance") {
  SupportTable a, b;
  a.add(path_graph(3), 0.5);
  a.add(complete_graph(3), 0.5);
  b.add(path_graph(3), 1.0);
  CHECK(tv_distance(a, b) == doctest::Approx(0.5));
  CHECK(tv_distance(a, a) == 0.0);
}

TEST_CASE("exact flooding time on hand-checked instances") {
  const FloodingDistribution still = exhaustive_flooding_time({path_graph(4)}, SmoothingModel::k_smooth(0), 10);
  CHECK(still.size() == 1);
  CHECK(still.at(std::size_t{3}) == doctest::Approx(1.0));

  // Path 0-1-2 with one toggle: the path or the triangle, equally likely.
  // The triangle floods in round 1; otherwise round 2 finishes.
  const FloodingDistribution p3 = exhaustive_flooding_time({path_graph(3)}, SmoothingModel::k_smooth(1), 10);
  CHECK(p3.size() == 2);
  CHECK(p3.at(std::size_t{1}) == doctest::Approx(0.5));
  CHECK(p3.at(std::size_t{2}) == doctest::Approx(0.5));

  const FloodingDistribution capped = exhaustive_flooding_time({path_graph(5)}, SmoothingModel::k_smooth(0), 2);
  CHECK(capped.at(std::nullopt) == doctest::Approx(1.0));
}

TEST_CASE("engine agrees with the exact flooding distribution") {
  const std::size_t trials = 100000;
  struct Case {
    std::vector<Graph> seq;
    SmoothingModel model;
    std::size_t max_rounds;
  };
  Graph kite = cycle_graph(4);
  kite.add_edge(0, 2);
  const std::vector<Case> cases{
      {{path_graph(3)}, SmoothingModel::k_smooth(1), 10},
      {{path_graph(4)}, SmoothingModel::k_smooth(1.5), 10},
      {{star_graph(5, 4), path_graph(5), cycle_graph(5)}, SmoothingModel::k_smooth(0.5), 10},
      {{path_graph(5), star_graph(5, 2)}, SmoothingModel::proportional(0.5, 2), 10},
      {{path_graph(4), kite, star_graph(4, 3)}, SmoothingModel::targeted(0.5), 10},
      {{path_graph(5), cycle_graph(5), star_graph(5, 0), path_graph(5)}, SmoothingModel::targeted(0.3), 3},
  };
  for (const Case& c : cases) {
    const FloodingDistribution exact = exhaustive_flooding_time(c.seq, c.model, c.max_rounds);
    CHECK(std::fabs(static_cast<double>(mass(exact)) - 1.0) < 1e-12);
    long double mean = 0;
    for (const auto& [k, p] : exact) {
      if (k) mean += *k * p;
    }
    if (!exact.count(std::nullopt)) {
      CHECK(mean >= 1);
      CHECK(mean <= c.seq.front().vertex_count() - 1);
    }
    const double d = tv(exact, empirical(c.seq, c.model, c.max_rounds, trials));
    CAPTURE(c.model.label());
    CHECK(d < 0.02);
  }
}
