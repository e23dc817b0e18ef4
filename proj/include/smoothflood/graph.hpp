#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace smoothflood {

/// Raised when an operation's preconditions are violated by the caller.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

using VertexId = std::uint32_t;

/// Largest vertex count the dense adjacency matrix accepts.
inline constexpr std::size_t kMaxVertices = 4096;

/// Undirected edge in canonical order (u < v).
struct Edge {
  VertexId u = 0;
  VertexId v = 1;

  /// Canonicalizes the endpoint order; throws UsageError on a self-loop.
  static Edge make(VertexId a, VertexId b) {
    if (a == b) throw_self_loop(a);
    return a < b ? Edge{a, b} : Edge{b, a};
  }
  [[noreturn]] static void throw_self_loop(VertexId a);

  std::uint64_t key() const { return (std::uint64_t{u} << 32) | v; }
  static Edge from_key(std::uint64_t key) {
    return Edge{static_cast<VertexId>(key >> 32), static_cast<VertexId>(key & 0xffffffffu)};
  }

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge& a, const Edge& b) { return a.key() <=> b.key(); }
};

/// Edge changes taking one graph to the next.
///
/// Invariants when applied to a graph G: added and removed are disjoint,
/// removed is a subset of E(G) and added is disjoint from E(G).
struct EdgeDelta {
  std::vector<Edge> added;
  std::vector<Edge> removed;

  bool empty() const { return added.empty() && removed.empty(); }
  std::size_t size() const { return added.size() + removed.size(); }
};

/// Simple undirected graph on vertices 0..n-1, stored as a symmetric bit matrix.
///
/// Membership and toggling are O(1); neighbor scans cost O(n/64 + deg).
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n);

  std::size_t vertex_count() const { return n_; }
  std::size_t edge_count() const { return m_; }
  std::size_t degree(VertexId v) const { return degree_[v]; }

  bool has_edge(VertexId a, VertexId b) const {
    return a != b && ((row_data(a)[b >> 6] >> (b & 63)) & 1u) != 0;
  }
  bool has_edge(Edge e) const { return has_edge(e.u, e.v); }

  /// Throws UsageError when the edge is already present or out of range.
  void add_edge(Edge e);
  void add_edge(VertexId a, VertexId b) { add_edge(Edge::make(a, b)); }
  /// Throws UsageError when the edge is absent.
  void remove_edge(Edge e);
  void remove_edge(VertexId a, VertexId b) { remove_edge(Edge::make(a, b)); }
  /// Flips membership; returns true when the edge is present afterwards.
  bool toggle_edge(Edge e);

  /// Word view of vertex v's adjacency row (bit w set iff edge (v,w) exists).
  std::span<const std::uint64_t> row(VertexId v) const { return {row_data(v), words_}; }
  std::size_t row_words() const { return words_; }

  template <class F>
  void for_each_neighbor(VertexId v, F&& visit) const {
    const std::uint64_t* r = row_data(v);
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t bits = r[w];
      while (bits != 0) {
        visit(static_cast<VertexId>(w * 64 + std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
  }

  std::vector<VertexId> neighbors(VertexId v) const;
  /// All edges, sorted by canonical key.
  std::vector<Edge> edges() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.m_ == b.m_ && a.bits_ == b.bits_;
  }
  friend void apply_delta_in_place(Graph& g, const EdgeDelta& d);

 private:
  const std::uint64_t* row_data(VertexId v) const { return bits_.data() + std::size_t{v} * words_; }
  std::uint64_t* row_data(VertexId v) { return bits_.data() + std::size_t{v} * words_; }
  void check_vertex(VertexId v) const {
    if (v >= n_) throw_out_of_range(v);
  }
  [[noreturn]] void throw_out_of_range(VertexId v) const;
  void flip(VertexId a, VertexId b);

  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::size_t m_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint32_t> degree_;
};

/// Fixed-universe vertex set backed by a bitset; keeps its cardinality.
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  std::size_t universe() const { return n_; }
  std::size_t size() const { return count_; }
  bool full() const { return count_ == n_; }
  bool contains(VertexId v) const { return ((words_[v >> 6] >> (v & 63)) & 1u) != 0; }
  /// Returns true when v was not yet a member.
  bool insert(VertexId v) {
    const std::uint64_t mask = std::uint64_t{1} << (v & 63);
    if ((words_[v >> 6] & mask) != 0) return false;
    words_[v >> 6] |= mask;
    ++count_;
    return true;
  }
  std::span<const std::uint64_t> words() const { return words_; }

  template <class F>
  void for_each(F&& visit) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        visit(static_cast<VertexId>(w * 64 + std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
  }
  std::vector<VertexId> members() const;
  /// Smallest non-member, if any.
  std::optional<VertexId> first_missing() const;

  friend bool operator==(const VertexSet& a, const VertexSet& b) {
    return a.n_ == b.n_ && a.words_ == b.words_;
  }

 private:
  std::size_t n_ = 0;
  std::size_t count_ = 0;
  std::vector<std::uint64_t> words_;
};

inline constexpr std::size_t kInfiniteDiameter = std::numeric_limits<std::size_t>::max();

/// Edges present in exactly one of g1, g2 (sorted). Throws UsageError on mismatched n.
std::vector<Edge> symmetric_difference(const Graph& g1, const Graph& g2);
std::size_t hamming_distance(const Graph& g1, const Graph& g2);

bool is_connected(const Graph& g);
/// Largest shortest-path hop distance; kInfiniteDiameter when disconnected.
std::size_t diameter(const Graph& g);

/// Applies the delta in place; validates the delta invariants first.
void apply_delta_in_place(Graph& g, const EdgeDelta& d);
Graph apply_delta(const Graph& g, const EdgeDelta& d);
/// The delta taking `from` to `to`.
EdgeDelta delta_between(const Graph& from, const Graph& to);

// Builders.
Graph path_graph(std::size_t n);
Graph star_graph(std::size_t n, VertexId center = 0);
Graph cycle_graph(std::size_t n);
Graph complete_graph(std::size_t n);
Graph graph_from_edges(std::size_t n, std::span<const Edge> edges);

/// Edge-list text: header "n m", then one "u v" pair per line.
void write_edge_list(std::ostream& out, const Graph& g);
Graph read_edge_list(std::istream& in);
std::string to_edge_list(const Graph& g);

}  // namespace smoothflood
