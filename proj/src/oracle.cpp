#include "smoothflood/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace smoothflood {

namespace {

// Union-find connectivity over an explicit edge list, kept separate from the
// bit-matrix traversal used by the samplers.
bool connected_edges(std::size_t n, const std::vector<Edge>& edges) {
  if (n <= 1) return true;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t parts = n;
  for (const Edge& e : edges) {
    const std::size_t a = find(e.u);
    const std::size_t b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --parts;
    }
  }
  return parts == 1;
}

std::vector<Edge> all_slots(std::size_t n) {
  std::vector<Edge> slots;
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) slots.push_back(Edge{u, v});
  }
  return slots;
}

// Edge set of `base` with every slot in `mask` flipped, sorted by key.
std::vector<Edge> flipped_edges(const std::vector<Edge>& base, const std::vector<Edge>& slots,
                                std::uint64_t mask) {
  std::vector<std::uint64_t> keys;
  for (const Edge& e : base) keys.push_back(e.key());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (((mask >> i) & 1u) == 0) continue;
    const std::uint64_t k = slots[i].key();
    auto it = std::find(keys.begin(), keys.end(), k);
    if (it == keys.end()) {
      keys.push_back(k);
    } else {
      keys.erase(it);
    }
  }
  std::sort(keys.begin(), keys.end());
  std::vector<Edge> out;
  for (std::uint64_t k : keys) out.push_back(Edge::from_key(k));
  return out;
}

SupportTable::Key key_of_edges(const std::vector<Edge>& edges) {
  SupportTable::Key key;
  for (const Edge& e : edges) key.push_back(e.key());
  return key;
}

struct Branch {
  std::size_t value;
  long double p;
};

std::vector<Branch> roundp_branches(double x) {
  const double nearest = std::round(x);
  if (std::abs(x - nearest) < 1e-9) return {{static_cast<std::size_t>(nearest), 1.0L}};
  const double lo = std::floor(x);
  const long double frac = static_cast<long double>(x) - lo;
  return {{static_cast<std::size_t>(lo), 1.0L - frac}, {static_cast<std::size_t>(lo) + 1, frac}};
}

Graph graph_from_key(std::size_t n, const SupportTable::Key& key) {
  Graph g(n);
  for (std::uint64_t k : key) g.add_edge(Edge::from_key(k));
  return g;
}

// Informed set after one round on the given edges, as a bitmask.
std::uint32_t expand(std::uint32_t informed, const SupportTable::Key& key) {
  std::uint32_t next = informed;
  for (std::uint64_t k : key) {
    const Edge e = Edge::from_key(k);
    if ((informed >> e.u) & 1u) next |= 1u << e.v;
    if ((informed >> e.v) & 1u) next |= 1u << e.u;
  }
  return next;
}

}  // namespace

SupportTable::Key SupportTable::key_of(const Graph& g) { return key_of_edges(g.edges()); }

void SupportTable::add(const Graph& g, long double p) { mass_[key_of(g)] += p; }

long double SupportTable::probability(const Graph& g) const {
  auto it = mass_.find(key_of(g));
  return it == mass_.end() ? 0.0L : it->second;
}

long double SupportTable::total() const {
  long double s = 0;
  for (const auto& [k, p] : mass_) s += p;
  return s;
}

double tv_distance(const SupportTable& p, const SupportTable& q) {
  long double sum = 0;
  for (const auto& [k, mass] : p.entries()) {
    auto it = q.entries().find(k);
    sum += std::abs(mass - (it == q.entries().end() ? 0.0L : it->second));
  }
  for (const auto& [k, mass] : q.entries()) {
    if (p.entries().find(k) == p.entries().end()) sum += mass;
  }
  return static_cast<double>(sum / 2);
}

SupportTable enumerate_t_smoothing(const Graph& g_adv, std::size_t t) {
  const std::size_t n = g_adv.vertex_count();
  if (n > 6) throw UsageError("enumerate_t_smoothing: n must be at most 6");
  if (t > 3) throw UsageError("enumerate_t_smoothing: t must be at most 3");
  const std::vector<Edge> slots = all_slots(n);
  const std::vector<Edge> base = g_adv.edges();
  std::vector<SupportTable::Key> kept;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << slots.size()); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) > t) continue;
    const std::vector<Edge> edges = flipped_edges(base, slots, mask);
    if (connected_edges(n, edges)) kept.push_back(key_of_edges(edges));
  }
  SupportTable table;
  for (const auto& k : kept) table.add(k, 1.0L / static_cast<long double>(kept.size()));
  return table;
}

SupportTable exact_targeted_distribution(const Graph& g_adv, const Graph& g_old, double epsilon) {
  const std::size_t n = g_adv.vertex_count();
  const std::vector<Edge> changed = symmetric_difference(g_old, g_adv);
  if (changed.size() > 12) {
    throw UsageError("exact_targeted_distribution: symmetric difference exceeds 12 edges");
  }
  const std::vector<Edge> base = g_adv.edges();
  SupportTable raw;
  long double connected_mass = 0;
  const long double eps = epsilon;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << changed.size()); ++mask) {
    const int flips = std::popcount(mask);
    const long double p = std::pow(eps, flips) *
                          std::pow(1.0L - eps, static_cast<int>(changed.size()) - flips);
    if (p == 0) continue;
    const std::vector<Edge> edges = flipped_edges(base, changed, mask);
    if (!connected_edges(n, edges)) continue;
    raw.add(key_of_edges(edges), p);
    connected_mass += p;
  }
  SupportTable table;
  for (const auto& [k, p] : raw.entries()) table.add(k, p / connected_mass);
  return table;
}

FloodingDistribution exhaustive_flooding_time(const std::vector<Graph>& sequence,
                                              const SmoothingModel& model,
                                              std::size_t max_rounds) {
  if (sequence.empty() || sequence.size() > 4) {
    throw UsageError("exhaustive_flooding_time: sequence must hold 1 to 4 graphs");
  }
  const std::size_t n = sequence.front().vertex_count();
  if (n > 5) throw UsageError("exhaustive_flooding_time: n must be at most 5");
  const std::uint32_t full = (1u << n) - 1;

  FloodingDistribution result;
  if (n <= 1) {
    result[0] = 1.0L;
    return result;
  }
  using State = std::pair<SupportTable::Key, std::uint32_t>;
  std::map<State, long double> states;
  states[{SupportTable::key_of(sequence.front()), 1u}] = 1.0L;

  for (std::size_t round = 1; round <= max_rounds && !states.empty(); ++round) {
    const Graph& g_adv = sequence[std::min(round, sequence.size()) - 1];
    std::map<State, long double> next;
    for (const auto& [state, p] : states) {
      // Distribution of G'_round given G'_{round-1}.
      SupportTable step;
      switch (model.kind) {
        case ModelKind::kKSmooth:
          for (const Branch& b : roundp_branches(model.k)) {
            const SupportTable part = enumerate_t_smoothing(g_adv, b.value);
            for (const auto& [k, q] : part.entries()) {
              step.add(k, b.p * q);
            }
          }
          break;
        case ModelKind::kProportional: {
          const Graph prev = graph_from_key(n, state.first);
          const double x = model.epsilon * static_cast<double>(hamming_distance(prev, g_adv));
          for (const Branch& b : roundp_branches(x)) {
            const std::size_t t = std::min(b.value, model.effective_cap(n));
            const SupportTable part = enumerate_t_smoothing(g_adv, t);
            for (const auto& [k, q] : part.entries()) {
              step.add(k, b.p * q);
            }
          }
          break;
        }
        case ModelKind::kTargeted: {
          const Graph prev = graph_from_key(n, state.first);
          step = exact_targeted_distribution(g_adv, prev, model.epsilon);
          break;
        }
      }
      for (const auto& [k, q] : step.entries()) {
        const std::uint32_t informed = expand(state.second, k);
        if (informed == full) {
          result[round] += p * q;
        } else {
          next[{k, informed}] += p * q;
        }
      }
    }
    if (next.size() > 100000) throw UsageError("exhaustive_flooding_time: state space too large");
    states = std::move(next);
  }
  for (const auto& [state, p] : states) result[std::nullopt] += p;
  return result;
}

}  // namespace smoothflood
