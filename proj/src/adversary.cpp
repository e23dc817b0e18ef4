#include "smoothflood/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace smoothflood {

namespace {

std::vector<VertexId> newly_informed(const VertexSet& before, const VertexSet& after) {
  std::vector<VertexId> out;
  auto b = before.words();
  auto a = after.words();
  for (std::size_t w = 0; w < a.size(); ++w) {
    std::uint64_t fresh = a[w] & ~b[w];
    while (fresh != 0) {
      out.push_back(static_cast<VertexId>(w * 64 + std::countr_zero(fresh)));
      fresh &= fresh - 1;
    }
  }
  return out;
}

void sort_unique(std::vector<VertexId>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void require_vertices(std::size_t n, const char* what) {
  if (n < 2) throw ConfigError(std::string(what) + " needs at least 2 vertices");
}

// Informed side hangs off the source; the uninformed side hangs off u = min of
// the uninformed set; (0,u) bridges them.
bool adaptive_has(const VertexSet& informed, std::optional<VertexId> u, Edge e) {
  if (e.u == 0) return informed.contains(e.v) || (u && e.v == *u);
  if (u && (e.u == *u || e.v == *u)) {
    const VertexId other = e.u == *u ? e.v : e.u;
    return !informed.contains(other);
  }
  return false;
}

// Informed side hangs off the source, uninformed side off the last vertex, and
// (0,u) is the only bridge.
bool low_churn_has(const VertexSet& informed, std::optional<VertexId> u, Edge e) {
  const auto last = static_cast<VertexId>(informed.universe() - 1);
  if (e.u == 0) return informed.contains(e.v) || (u && e.v == *u);
  if (e.v == last) return !informed.contains(e.u);
  return false;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

}  // namespace

// --- spooling ---------------------------------------------------------------

SpoolingAdversary::SpoolingAdversary(std::size_t n) : n_(n) { require_vertices(n, "spooling"); }

bool SpoolingAdversary::contains(std::size_t round, Edge e) const {
  const std::size_t c = std::clamp<std::size_t>(round, 1, n_ - 1);
  if (e.v == c - 1) return true;  // left star; e.u < e.v always
  if (e.u == c - 1 && e.v == c) return true;
  return e.u == c;  // right star
}

Graph SpoolingAdversary::graph_at(std::size_t round) const {
  const auto c = static_cast<VertexId>(std::clamp<std::size_t>(round, 1, n_ - 1));
  Graph g(n_);
  for (VertexId a = 0; a + 1 < c; ++a) g.add_edge(Edge{a, c - 1});
  g.add_edge(Edge{c - 1, c});
  for (VertexId b = c + 1; b < n_; ++b) g.add_edge(Edge{c, b});
  return g;
}

EdgeDelta SpoolingAdversary::propose_round(std::size_t round) {
  const std::size_t before = std::clamp<std::size_t>(round - 1, 1, n_ - 1);
  const std::size_t after = std::clamp<std::size_t>(round, 1, n_ - 1);
  if (round < 2 || before == after) return {};
  // Center p hands over to c = p + 1; the old bridge joins the new left star
  // and (p, c) becomes the new bridge.
  const auto p = static_cast<VertexId>(before);
  const auto c = static_cast<VertexId>(after);
  EdgeDelta d;
  d.removed.reserve(n_);
  d.added.reserve(n_);
  for (VertexId a = 0; a + 1 < p; ++a) {
    d.removed.push_back(Edge{a, p - 1});
    d.added.push_back(Edge{a, p});
  }
  for (VertexId b = c + 1; b < n_; ++b) {
    d.removed.push_back(Edge{p, b});
    d.added.push_back(Edge{c, b});
  }
  return d;
}

// --- adaptive spooling ------------------------------------------------------

AdaptiveSpoolingAdversary::AdaptiveSpoolingAdversary(std::size_t n) : n_(n) {
  require_vertices(n, "adaptive spooling");
}

Graph AdaptiveSpoolingAdversary::graph_for(const VertexSet& informed) {
  const std::size_t n = informed.universe();
  const std::optional<VertexId> u = informed.first_missing();
  Graph g(n);
  informed.for_each([&](VertexId x) {
    if (x != 0) g.add_edge(Edge{0, x});
  });
  if (u) {
    g.add_edge(Edge::make(0, *u));
    for (VertexId y = 1; y < n; ++y) {
      if (y != *u && !informed.contains(y)) g.add_edge(Edge::make(*u, y));
    }
  }
  return g;
}

Graph AdaptiveSpoolingAdversary::initial_graph() {
  prev_ = VertexSet(n_);
  prev_.insert(0);
  return graph_for(prev_);
}

EdgeDelta AdaptiveSpoolingAdversary::propose(const AdversaryView& view) {
  const VertexSet& now = view.informed;
  const std::optional<VertexId> u_old = prev_.first_missing();
  const std::optional<VertexId> u_new = now.first_missing();
  std::vector<VertexId> touched = newly_informed(prev_, now);
  if (u_old) touched.push_back(*u_old);
  if (u_new) touched.push_back(*u_new);
  sort_unique(touched);
  EdgeDelta d = predicate_delta(
      n_, touched, [&](Edge e) { return adaptive_has(prev_, u_old, e); },
      [&](Edge e) { return adaptive_has(now, u_new, e); });
  prev_ = now;
  return d;
}

// --- low churn --------------------------------------------------------------

LowChurnAdversary::LowChurnAdversary(std::size_t n) : n_(n) { require_vertices(n, "low churn"); }

Graph LowChurnAdversary::graph_for(const VertexSet& informed) {
  const std::size_t n = informed.universe();
  const auto last = static_cast<VertexId>(n - 1);
  const std::optional<VertexId> u = informed.first_missing();
  Graph g(n);
  for (VertexId x = 1; x < n; ++x) {
    if (informed.contains(x) || (u && x == *u)) g.add_edge(Edge{0, x});
  }
  for (VertexId y = 1; y < last; ++y) {
    if (!informed.contains(y)) g.add_edge(Edge{y, last});
  }
  return g;
}

Graph LowChurnAdversary::initial_graph() {
  prev_ = VertexSet(n_);
  prev_.insert(0);
  return graph_for(prev_);
}

EdgeDelta LowChurnAdversary::propose(const AdversaryView& view) {
  const VertexSet& now = view.informed;
  const std::optional<VertexId> u_old = prev_.first_missing();
  const std::optional<VertexId> u_new = now.first_missing();
  std::vector<VertexId> touched = newly_informed(prev_, now);
  if (u_old) touched.push_back(*u_old);
  if (u_new) touched.push_back(*u_new);
  sort_unique(touched);
  EdgeDelta d = predicate_delta(
      n_, touched, [&](Edge e) { return low_churn_has(prev_, u_old, e); },
      [&](Edge e) { return low_churn_has(now, u_new, e); });
  prev_ = now;
  return d;
}

void LowChurnAdversary::validate(const SmoothingModel& model) const {
  if (model.kind != ModelKind::kProportional) {
    throw ConfigError("low_churn adversary requires the proportional model, got " + model.label());
  }
  if (model.epsilon > 0.2 + 1e-12) {
    throw ConfigError("low_churn adversary requires epsilon <= 1/5, got " + fmt(model.epsilon));
  }
}

// --- cassette ---------------------------------------------------------------

CassetteAdversary::CassetteAdversary(std::size_t n, std::size_t t) : n_(n), t_(t) {
  require_vertices(n, "cassette");
  if (t == 0) throw ConfigError("cassette spacing t must be at least 1");
}

CassetteAdversary CassetteAdversary::from_noise(std::size_t n, double c, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ConfigError("cassette requires 0 < epsilon < 1, got " + fmt(epsilon));
  }
  const double raw = c * std::log(static_cast<double>(n)) / std::log(1.0 / epsilon);
  const double t = std::floor(raw + 1e-9);
  if (!(t >= 1.0)) {
    throw ConfigError("cassette spacing floor(c*log_{1/eps} n) = " + fmt(t) + " is below 1");
  }
  return CassetteAdversary(n, static_cast<std::size_t>(t));
}

bool CassetteAdversary::contains(std::size_t round, Edge e) const {
  const std::size_t r = std::clamp<std::size_t>(round, 1, n_);
  const std::size_t m = (r - 1) / t_;
  const std::size_t top = (n_ - 2) / t_;
  if (e.v == e.u + 1) return true;
  if (e.u == 0 && e.v % t_ == 0) {
    const std::size_t j = e.v / t_;
    if (j >= 1 && j <= m) return true;
  }
  if (e.v == n_ - 1 && e.u % t_ == 0) {
    const std::size_t j = e.u / t_;
    if (j >= m + 2 && j <= top) return true;
  }
  return false;
}

Graph CassetteAdversary::graph_at(std::size_t round) const {
  const std::size_t r = std::clamp<std::size_t>(round, 1, n_);
  const std::size_t m = (r - 1) / t_;
  const std::size_t top = (n_ - 2) / t_;
  const auto last = static_cast<VertexId>(n_ - 1);
  Graph g = path_graph(n_);
  auto add = [&](VertexId a, VertexId b) {
    if (a == b || a >= n_ || b >= n_) return;
    const Edge e = Edge::make(a, b);
    if (!g.has_edge(e)) g.add_edge(e);
  };
  for (std::size_t j = 1; j <= m; ++j) add(0, static_cast<VertexId>(j * t_));
  for (std::size_t j = m + 2; j <= top; ++j) add(static_cast<VertexId>(j * t_), last);
  return g;
}

EdgeDelta CassetteAdversary::propose_round(std::size_t round) {
  if (round < 2) return {};
  const std::size_t before = round - 1;
  if ((std::min(before, n_) - 1) / t_ == (std::min(round, n_) - 1) / t_) return {};
  // Every chord touches one of the endpoints.
  const std::vector<VertexId> touched{0, static_cast<VertexId>(n_ - 1)};
  return predicate_delta(
      n_, touched, [&](Edge e) { return contains(before, e); },
      [&](Edge e) { return contains(round, e); });
}

void CassetteAdversary::validate(const SmoothingModel& model) const {
  if (model.kind != ModelKind::kTargeted) {
    throw ConfigError("cassette adversary requires the targeted model, got " + model.label());
  }
  if (!(model.epsilon > 0.0 && model.epsilon < 1.0)) {
    throw ConfigError("cassette adversary requires 0 < epsilon < 1, got " + fmt(model.epsilon));
  }
}

// --- star recenter ----------------------------------------------------------

StarRecenterAdversary::StarRecenterAdversary(std::size_t n, std::size_t period)
    : n_(n), period_(period) {
  require_vertices(n, "star recenter");
  if (period == 0) throw ConfigError("star_recenter period must be at least 1");
}

std::size_t StarRecenterAdversary::default_period(std::size_t n, double epsilon) {
  if (epsilon <= 0.0) return 1;
  if (epsilon >= 1.0) throw ConfigError("star_recenter needs epsilon < 1 to pick a period");
  std::size_t p = 1;
  while (static_cast<double>(n) * std::pow(epsilon, static_cast<double>(p)) > 1.0 + 1e-9) ++p;
  return p;
}

Graph StarRecenterAdversary::graph_at(std::size_t round) const {
  const std::size_t b = round / period_;
  const VertexId c1 = center(b);
  const VertexId c2 = center(b + 1);
  Graph g(n_);
  for (VertexId v = 0; v < n_; ++v) {
    if (v != c1) g.add_edge(Edge::make(c1, v));
  }
  for (VertexId v = 0; v < n_; ++v) {
    if (v != c2 && v != c1) g.add_edge(Edge::make(c2, v));
  }
  return g;
}

EdgeDelta StarRecenterAdversary::propose_round(std::size_t round) {
  if (round < 2) return {};
  const std::size_t b_old = (round - 1) / period_;
  const std::size_t b_new = round / period_;
  if (b_old == b_new) return {};
  const VertexId o1 = center(b_old), o2 = center(b_old + 1);
  const VertexId n1 = center(b_new), n2 = center(b_new + 1);
  std::vector<VertexId> touched{o1, o2, n1, n2};
  sort_unique(touched);
  auto has = [](VertexId c1, VertexId c2) {
    return [c1, c2](Edge e) { return e.u == c1 || e.v == c1 || e.u == c2 || e.v == c2; };
  };
  return predicate_delta(n_, touched, has(o1, o2), has(n1, n2));
}

void StarRecenterAdversary::validate(const SmoothingModel& model) const {
  if (model.kind != ModelKind::kTargeted) return;
  const double leak = static_cast<double>(n_) * std::pow(model.epsilon, static_cast<double>(period_));
  if (leak > 1.0 + 1e-9) {
    throw ConfigError("star_recenter needs n * epsilon^period <= 1, got " + fmt(leak) +
                      " with period " + std::to_string(period_));
  }
}

// --- static and sequence ----------------------------------------------------

StaticAdversary::StaticAdversary(Graph g) : g_(std::move(g)) {
  if (!is_connected(g_)) throw ConfigError("static adversary graph must be connected");
}

SequenceAdversary::SequenceAdversary(std::vector<Graph> graphs) : graphs_(std::move(graphs)) {
  if (graphs_.empty()) throw UsageError("sequence adversary needs at least one graph");
  for (const Graph& g : graphs_) {
    if (g.vertex_count() != graphs_.front().vertex_count()) {
      throw UsageError("sequence adversary graphs differ in vertex count");
    }
    if (!is_connected(g)) throw UsageError("sequence adversary graphs must be connected");
  }
}

Graph SequenceAdversary::graph_at(std::size_t round) const {
  const std::size_t idx = std::clamp<std::size_t>(round, 1, graphs_.size()) - 1;
  return graphs_[idx];
}

EdgeDelta SequenceAdversary::propose_round(std::size_t round) {
  if (round < 2 || round > graphs_.size()) return {};
  return delta_between(graphs_[round - 2], graphs_[round - 1]);
}

// --- factory ----------------------------------------------------------------

std::string AdversarySpec::label() const {
  if (kind == "cassette") return t ? "cassette(t=" + std::to_string(*t) + ")" : "cassette(c=" + fmt(c) + ")";
  if (kind == "star_recenter" && period) return "star_recenter(period=" + std::to_string(*period) + ")";
  if (kind == "static") return "static(" + graph + ")";
  return kind;
}

std::unique_ptr<Adversary> make_adversary(const AdversarySpec& spec, std::size_t n,
                                          const SmoothingModel& model) {
  std::unique_ptr<Adversary> adv;
  if (spec.kind == "spooling") {
    adv = std::make_unique<SpoolingAdversary>(n);
  } else if (spec.kind == "adaptive_spooling") {
    adv = std::make_unique<AdaptiveSpoolingAdversary>(n);
  } else if (spec.kind == "low_churn") {
    adv = std::make_unique<LowChurnAdversary>(n);
  } else if (spec.kind == "cassette") {
    if (spec.t) {
      adv = std::make_unique<CassetteAdversary>(n, *spec.t);
    } else {
      adv = std::make_unique<CassetteAdversary>(CassetteAdversary::from_noise(n, spec.c, model.epsilon));
    }
  } else if (spec.kind == "star_recenter") {
    const std::size_t period =
        spec.period.value_or(model.kind == ModelKind::kTargeted
                                 ? StarRecenterAdversary::default_period(n, model.epsilon)
                                 : 1);
    adv = std::make_unique<StarRecenterAdversary>(n, period);
  } else if (spec.kind == "static") {
    require_vertices(n, "static");
    Graph g;
    if (spec.graph == "path") {
      g = path_graph(n);
    } else if (spec.graph == "star") {
      g = star_graph(n);
    } else if (spec.graph == "cycle") {
      g = cycle_graph(n);
    } else if (spec.graph == "complete") {
      g = complete_graph(n);
    } else {
      throw ConfigError("unknown static graph \"" + spec.graph + "\"");
    }
    adv = std::make_unique<StaticAdversary>(std::move(g));
  } else {
    throw ConfigError("unknown adversary kind \"" + spec.kind + "\"");
  }
  adv->validate(model);
  return adv;
}

}  // namespace smoothflood
