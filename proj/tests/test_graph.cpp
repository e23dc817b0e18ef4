#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <queue>
#include <sstream>

#include "smoothflood/adversary.hpp"
#include "smoothflood/graph.hpp"
#include "smoothflood/rng.hpp"

using namespace smoothflood;

namespace {

Graph random_graph(std::size_t n, double p, RoundRng& rng) {
  Graph g(n);
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) {
      if (rng.bernoulli(p)) g.add_edge(u, v);
    }
  }
  return g;
}

// Plain adjacency-list BFS, independent of the CSR code in the library.
std::size_t slow_diameter(const Graph& g) {
  const std::size_t n = g.vertex_count();
  std::size_t best = 0;
  for (VertexId s = 0; s < n; ++s) {
    std::vector<std::size_t> dist(n, SIZE_MAX);
    std::queue<VertexId> q;
    dist[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const VertexId u = q.front();
      q.pop();
      for (VertexId v = 0; v < n; ++v) {
        if (g.has_edge(u, v) && dist[v] == SIZE_MAX) {
          dist[v] = dist[u] + 1;
          q.push(v);
        }
      }
    }
    for (std::size_t d : dist) {
      if (d == SIZE_MAX) return kInfiniteDiameter;
      best = std::max(best, d);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("edge canonicalization") {
  CHECK(Edge::make(3, 1) == Edge{1, 3});
  CHECK(Edge::from_key(Edge::make(7, 2).key()) == Edge{2, 7});
  CHECK_THROWS_AS(Edge::make(4, 4), UsageError);
  CHECK(Edge{0, 5} < Edge{1, 2});
}

TEST_CASE("add remove toggle keep degrees and count") {
  Graph g(70);
  g.add_edge(0, 69);
  g.add_edge(3, 64);
  CHECK(g.edge_count() == 2);
  CHECK(g.has_edge(69, 0));
  CHECK(g.degree(0) == 1);
  CHECK_THROWS_AS(g.add_edge(0, 69), UsageError);
  CHECK_THROWS_AS(g.remove_edge(1, 2), UsageError);
  CHECK_THROWS_AS(g.add_edge(0, 70), UsageError);
  CHECK_FALSE(g.toggle_edge(Edge{3, 64}));
  CHECK(g.toggle_edge(Edge{1, 2}));
  CHECK(g.edge_count() == 2);
  CHECK(g.neighbors(0) == std::vector<VertexId>{69});
  CHECK(g.edges() == std::vector<Edge>{{0, 69}, {1, 2}});
}

TEST_CASE("symmetric difference") {
  const Graph triangle = complete_graph(3);
  const Graph path = path_graph(3);
  CHECK(symmetric_difference(triangle, path) == std::vector<Edge>{{0, 2}});
  CHECK(hamming_distance(triangle, path) == 1);
  CHECK(hamming_distance(path, path) == 0);
  CHECK_THROWS_AS(symmetric_difference(path, path_graph(4)), UsageError);
}

TEST_CASE("delta round trip") {
  RoundRng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + rng.uniform_below(90);
    const Graph a = random_graph(n, 0.3, rng);
    const Graph b = random_graph(n, 0.3, rng);
    const EdgeDelta d = delta_between(a, b);
    CHECK(d.size() == hamming_distance(a, b));
    CHECK(apply_delta(a, d) == b);
  }
  Graph g = path_graph(4);
  EdgeDelta bad;
  bad.added.push_back(Edge{0, 1});
  CHECK_THROWS_AS(apply_delta_in_place(g, bad), UsageError);
  CHECK(g == path_graph(4));
  EdgeDelta gone;
  gone.removed.push_back(Edge{0, 3});
  CHECK_THROWS_AS(apply_delta(g, gone), UsageError);
}

TEST_CASE("connectivity and diameter") {
  CHECK(is_connected(Graph(1)));
  CHECK_FALSE(is_connected(Graph(2)));
  CHECK(diameter(path_graph(10)) == 9);
  CHECK(diameter(cycle_graph(10)) == 5);
  CHECK(diameter(star_graph(10, 4)) == 2);
  CHECK(diameter(complete_graph(6)) == 1);
  CHECK(diameter(Graph(3)) == kInfiniteDiameter);

  RoundRng rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng.uniform_below(20);
    const Graph g = random_graph(n, 0.15 + 0.3 * rng.uniform01(), rng);
    const std::size_t d = slow_diameter(g);
    CHECK(diameter(g) == d);
    CHECK(is_connected(g) == (d != kInfiniteDiameter));
  }
}

TEST_CASE("cassette first graph at n=9, t=2") {
  // Path 0..8 with shortcuts (4,8) and (6,8): vertex 7 is six hops from 0.
  const Graph g = CassetteAdversary(9, 2).graph_at(1);
  CHECK(slow_diameter(g) == 6);
  CHECK(diameter(g) == 6);
}

TEST_CASE("edge list io") {
  const Graph g = graph_from_edges(5, std::vector<Edge>{{0, 1}, {1, 2}, {1, 3}, {1, 4}});
  CHECK(to_edge_list(g) == "5 4\n0 1\n1 2\n1 3\n1 4\n");
  std::istringstream in(to_edge_list(g));
  CHECK(read_edge_list(in) == g);
  std::istringstream truncated("4 3\n0 1\n1 2\n");
  CHECK_THROWS(read_edge_list(truncated));
  std::istringstream loop("3 1\n2 2\n");
  CHECK_THROWS(read_edge_list(loop));
}

TEST_CASE("vertex set") {
  VertexSet s(130);
  CHECK(s.insert(129));
  CHECK_FALSE(s.insert(129));
  s.insert(0);
  CHECK(s.size() == 2);
  CHECK(s.members() == std::vector<VertexId>{0, 129});
  CHECK(s.first_missing() == VertexId{1});
  VertexSet full(3);
  for (VertexId v = 0; v < 3; ++v) full.insert(v);
  CHECK(full.full());
  CHECK_FALSE(full.first_missing().has_value());
}

TEST_CASE("size limit") {
  CHECK_THROWS_AS(Graph(kMaxVertices + 1), UsageError);
}
