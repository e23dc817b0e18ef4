#include "smoothflood/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace smoothflood {

void Edge::throw_self_loop(VertexId a) { throw UsageError("self-loop on vertex " + std::to_string(a)); }

Graph::Graph(std::size_t n) : n_(n), words_((n + 63) / 64) {
  if (n > kMaxVertices) {
    throw UsageError("graph with " + std::to_string(n) + " vertices exceeds the limit of " +
                     std::to_string(kMaxVertices));
  }
  bits_.assign(n_ * words_, 0);
  degree_.assign(n_, 0);
}

void Graph::throw_out_of_range(VertexId v) const {
  throw UsageError("vertex " + std::to_string(v) + " out of range for n=" + std::to_string(n_));
}

void Graph::flip(VertexId a, VertexId b) {
  row_data(a)[b >> 6] ^= std::uint64_t{1} << (b & 63);
  row_data(b)[a >> 6] ^= std::uint64_t{1} << (a & 63);
}

void Graph::add_edge(Edge e) {
  check_vertex(e.v);
  if (has_edge(e)) {
    throw UsageError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") already present");
  }
  flip(e.u, e.v);
  ++degree_[e.u];
  ++degree_[e.v];
  ++m_;
}

void Graph::remove_edge(Edge e) {
  check_vertex(e.v);
  if (!has_edge(e)) {
    throw UsageError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") not present");
  }
  flip(e.u, e.v);
  --degree_[e.u];
  --degree_[e.v];
  --m_;
}

bool Graph::toggle_edge(Edge e) {
  if (has_edge(e)) {
    remove_edge(e);
    return false;
  }
  add_edge(e);
  return true;
}

std::vector<VertexId> Graph::neighbors(VertexId v) const {
  std::vector<VertexId> out;
  out.reserve(degree_[v]);
  for_each_neighbor(v, [&](VertexId w) { out.push_back(w); });
  return out;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(m_);
  for (VertexId u = 0; u < n_; ++u) {
    for_each_neighbor(u, [&](VertexId w) {
      if (u < w) out.push_back(Edge{u, w});
    });
  }
  return out;
}

std::vector<VertexId> VertexSet::members() const {
  std::vector<VertexId> out;
  out.reserve(count_);
  for_each([&](VertexId v) { out.push_back(v); });
  return out;
}

std::optional<VertexId> VertexSet::first_missing() const {
  for (std::size_t w = 0; w < words_.size(); ++w) {
    const std::uint64_t free = ~words_[w];
    if (free == 0) continue;
    const auto v = static_cast<VertexId>(w * 64 + std::countr_zero(free));
    if (v < n_) return v;
    return std::nullopt;
  }
  return std::nullopt;
}

std::vector<Edge> symmetric_difference(const Graph& g1, const Graph& g2) {
  if (g1.vertex_count() != g2.vertex_count()) {
    throw UsageError("symmetric_difference: vertex counts differ (" +
                     std::to_string(g1.vertex_count()) + " vs " +
                     std::to_string(g2.vertex_count()) + ")");
  }
  std::vector<Edge> out;
  const std::size_t words = g1.row_words();
  for (VertexId u = 0; u < g1.vertex_count(); ++u) {
    auto r1 = g1.row(u);
    auto r2 = g2.row(u);
    // Only bits above u, so each edge is reported once.
    for (std::size_t w = u >> 6; w < words; ++w) {
      std::uint64_t diff = r1[w] ^ r2[w];
      if (w == (u >> 6)) {
        const unsigned shift = (u & 63) + 1;
        diff = shift >= 64 ? 0 : diff & (~std::uint64_t{0} << shift);
      }
      while (diff != 0) {
        out.push_back(Edge{u, static_cast<VertexId>(w * 64 + std::countr_zero(diff))});
        diff &= diff - 1;
      }
    }
  }
  return out;
}

std::size_t hamming_distance(const Graph& g1, const Graph& g2) {
  if (g1.vertex_count() != g2.vertex_count()) {
    throw UsageError("hamming_distance: vertex counts differ");
  }
  std::size_t bits = 0;
  for (VertexId u = 0; u < g1.vertex_count(); ++u) {
    auto r1 = g1.row(u);
    auto r2 = g2.row(u);
    for (std::size_t w = 0; w < g1.row_words(); ++w) bits += std::popcount(r1[w] ^ r2[w]);
  }
  return bits / 2;
}

bool is_connected(const Graph& g) {
  const std::size_t n = g.vertex_count();
  if (n <= 1) return true;
  for (VertexId v = 0; v < n; ++v) {
    if (g.degree(v) == 0) return false;
  }
  // Word-parallel traversal: unvisited bits are cleared as vertices are reached.
  const std::size_t words = g.row_words();
  std::vector<std::uint64_t> unvisited(words, ~std::uint64_t{0});
  if (n % 64 != 0) unvisited.back() = (std::uint64_t{1} << (n % 64)) - 1;
  unvisited[0] &= ~std::uint64_t{1};
  std::vector<VertexId> stack{0};
  std::size_t reached = 1;
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    auto r = g.row(v);
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t fresh = r[w] & unvisited[w];
      if (fresh == 0) continue;
      unvisited[w] &= ~fresh;
      while (fresh != 0) {
        stack.push_back(static_cast<VertexId>(w * 64 + std::countr_zero(fresh)));
        fresh &= fresh - 1;
        ++reached;
      }
    }
  }
  return reached == n;
}

std::size_t diameter(const Graph& g) {
  const std::size_t n = g.vertex_count();
  if (n <= 1) return 0;
  if (!is_connected(g)) return kInfiniteDiameter;
  // CSR adjacency once, then BFS from every vertex in O(n + m) each.
  std::vector<std::uint32_t> offsets(n + 1, 0);
  std::vector<VertexId> targets;
  targets.reserve(2 * g.edge_count());
  for (VertexId v = 0; v < n; ++v) {
    g.for_each_neighbor(v, [&](VertexId w) { targets.push_back(w); });
    offsets[v + 1] = static_cast<std::uint32_t>(targets.size());
  }
  std::vector<std::uint32_t> dist(n);
  std::vector<VertexId> queue(n);
  std::size_t best = 0;
  for (VertexId s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<std::uint32_t>::max());
    dist[s] = 0;
    std::size_t head = 0;
    std::size_t tail = 0;
    queue[tail++] = s;
    while (head < tail) {
      const VertexId v = queue[head++];
      for (std::uint32_t i = offsets[v]; i < offsets[v + 1]; ++i) {
        const VertexId w = targets[i];
        if (dist[w] == std::numeric_limits<std::uint32_t>::max()) {
          dist[w] = dist[v] + 1;
          queue[tail++] = w;
        }
      }
    }
    best = std::max<std::size_t>(best, dist[queue[tail - 1]]);
  }
  return best;
}

void apply_delta_in_place(Graph& g, const EdgeDelta& d) {
  for (const Edge& e : d.removed) {
    if (e.v >= g.vertex_count() || !g.has_edge(e)) {
      throw UsageError("delta removes absent edge (" + std::to_string(e.u) + "," +
                       std::to_string(e.v) + ")");
    }
  }
  for (const Edge& e : d.added) {
    if (e.v >= g.vertex_count() || e.u >= e.v) {
      throw UsageError("delta adds invalid edge (" + std::to_string(e.u) + "," +
                       std::to_string(e.v) + ")");
    }
    if (g.has_edge(e)) {
      throw UsageError("delta adds present edge (" + std::to_string(e.u) + "," +
                       std::to_string(e.v) + ")");
    }
  }
  for (const Edge& e : d.removed) {
    if (!g.has_edge(e)) {
      throw UsageError("delta removes edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                       ") twice");
    }
    g.flip(e.u, e.v);
    --g.degree_[e.u];
    --g.degree_[e.v];
  }
  for (const Edge& e : d.added) {
    if (g.has_edge(e)) {
      throw UsageError("delta adds edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                       ") twice or also removes it");
    }
    g.flip(e.u, e.v);
    ++g.degree_[e.u];
    ++g.degree_[e.v];
  }
  g.m_ = g.m_ - d.removed.size() + d.added.size();
}

Graph apply_delta(const Graph& g, const EdgeDelta& d) {
  Graph out = g;
  apply_delta_in_place(out, d);
  return out;
}

EdgeDelta delta_between(const Graph& from, const Graph& to) {
  EdgeDelta d;
  for (const Edge& e : symmetric_difference(from, to)) {
    (to.has_edge(e) ? d.added : d.removed).push_back(e);
  }
  return d;
}

Graph path_graph(std::size_t n) {
  Graph g(n);
  for (VertexId v = 0; v + 1 < n; ++v) g.add_edge(Edge{v, v + 1});
  return g;
}

Graph star_graph(std::size_t n, VertexId center) {
  Graph g(n);
  for (VertexId v = 0; v < n; ++v) {
    if (v != center) g.add_edge(Edge::make(center, v));
  }
  return g;
}

Graph cycle_graph(std::size_t n) {
  Graph g = path_graph(n);
  if (n >= 3) g.add_edge(Edge{0, static_cast<VertexId>(n - 1)});
  return g;
}

Graph complete_graph(std::size_t n) {
  Graph g(n);
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) g.add_edge(Edge{u, v});
  }
  return g;
}

Graph graph_from_edges(std::size_t n, std::span<const Edge> edges) {
  Graph g(n);
  for (const Edge& e : edges) g.add_edge(Edge::make(e.u, e.v));
  return g;
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

Graph read_edge_list(std::istream& in) {
  std::size_t n = 0;
  std::size_t m = 0;
  if (!(in >> n >> m)) throw UsageError("edge list: missing \"n m\" header");
  Graph g(n);
  for (std::size_t i = 0; i < m; ++i) {
    long long a = 0;
    long long b = 0;
    if (!(in >> a >> b)) {
      throw UsageError("edge list: expected " + std::to_string(m) + " edges, got " + std::to_string(i));
    }
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n || static_cast<std::size_t>(b) >= n) {
      throw UsageError("edge list: endpoint out of range on edge " + std::to_string(i));
    }
    g.add_edge(Edge::make(static_cast<VertexId>(a), static_cast<VertexId>(b)));
  }
  return g;
}

std::string to_edge_list(const Graph& g) {
  std::ostringstream out;
  write_edge_list(out, g);
  return out.str();
}

}  // namespace smoothflood
