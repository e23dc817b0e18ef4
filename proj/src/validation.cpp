#include "smoothflood/validation.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include "smoothflood/harness.hpp"
#include "smoothflood/oracle.hpp"

namespace smoothflood {

namespace {

std::string f6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

std::string g6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

/// Loads presets and shares cell results between presets with equal seeds.
class Context {
 public:
  explicit Context(const ValidationOptions& options) : opts_(options) {}

  ExperimentResult preset(const std::string& name) {
    const ExperimentConfig cfg = load_config(opts_.config_dir / (name + ".json"));
    const std::vector<Cell> cells = cfg.cells();
    ExperimentConfig missing = cfg;
    missing.grid.clear();
    missing.fits.clear();
    missing.compares.clear();
    for (const Cell& c : cells) {
      if (cache_.count(key(cfg, c)) == 0) missing.grid.push_back(GridBlock{{c.n}, {c.model}, {c.adversary}});
    }
    if (!missing.grid.empty()) {
      ExperimentResult fresh = run_experiment(missing, opts_.workers);
      for (CellResult& cr : fresh.cells) cache_.emplace(key(cfg, cr.cell), std::move(cr));
    }
    ExperimentResult out;
    out.config = cfg;
    for (const Cell& c : cells) out.cells.push_back(cache_.at(key(cfg, c)));
    if (opts_.out_dir) write_outputs(out, *opts_.out_dir / name, true);
    return out;
  }

  const ValidationOptions& options() const { return opts_; }

 private:
  static std::string key(const ExperimentConfig& cfg, const Cell& c) {
    return std::to_string(cfg.base_seed) + "|" + std::to_string(cfg.trials) + "|" +
           std::to_string(cfg.max_rounds.value_or(0)) + "|" + to_string(cfg.trace) + "|" + c.key();
  }

  const ValidationOptions& opts_;
  std::map<std::string, CellResult> cache_;
};

FitRow find_fit(const std::vector<FitRow>& fits, const std::string& name) {
  for (const FitRow& f : fits) {
    if (f.spec.name == name) return f;
  }
  throw ConfigError("preset lacks fit \"" + name + "\"");
}

std::vector<const CellResult*> select(const ExperimentResult& r, const std::string& adversary) {
  std::vector<const CellResult*> out;
  for (const CellResult& c : r.cells) {
    if (c.cell.adversary.label() == adversary) out.push_back(&c);
  }
  return out;
}

bool enough_trials(const ExperimentResult& r, std::size_t need, std::string& detail) {
  for (const CellResult& c : r.cells) {
    if (c.trials.size() < need) {
      detail += "cell " + c.cell.key() + " has only " + std::to_string(c.trials.size()) + " trials; ";
      return false;
    }
  }
  return true;
}

// --- exactness helpers ------------------------------------------------------

std::vector<Edge> slots_of(std::size_t n) {
  std::vector<Edge> slots;
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) slots.push_back(Edge{u, v});
  }
  return slots;
}

Graph from_mask(std::size_t n, const std::vector<Edge>& slots, std::uint32_t mask) {
  Graph g(n);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if ((mask >> i) & 1u) g.add_edge(slots[i]);
  }
  return g;
}

std::size_t slot_index(const std::vector<Edge>& slots, Edge e) {
  return static_cast<std::size_t>(std::find(slots.begin(), slots.end(), e) - slots.begin());
}

// Every connected labelled graph on 2..4 vertices plus one representative
// of each isomorphism class on 5 vertices.
std::vector<Graph> sampler_test_graphs() {
  std::vector<Graph> out;
  for (std::size_t n = 2; n <= 4; ++n) {
    const auto slots = slots_of(n);
    for (std::uint32_t mask = 0; mask < (1u << slots.size()); ++mask) {
      Graph g = from_mask(n, slots, mask);
      if (is_connected(g)) out.push_back(std::move(g));
    }
  }
  const std::size_t n = 5;
  const auto slots = slots_of(n);
  std::array<VertexId, 5> perm{0, 1, 2, 3, 4};
  std::vector<std::array<VertexId, 5>> perms;
  do {
    perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::vector<std::uint32_t> seen;
  for (std::uint32_t mask = 0; mask < (1u << slots.size()); ++mask) {
    Graph g = from_mask(n, slots, mask);
    if (!is_connected(g)) continue;
    std::uint32_t canon = UINT32_MAX;
    for (const auto& p : perms) {
      std::uint32_t m = 0;
      for (std::size_t i = 0; i < slots.size(); ++i) {
        if ((mask >> i) & 1u) m |= 1u << slot_index(slots, Edge::make(p[slots[i].u], p[slots[i].v]));
      }
      canon = std::min(canon, m);
    }
    if (std::find(seen.begin(), seen.end(), canon) != seen.end()) continue;
    seen.push_back(canon);
    out.push_back(std::move(g));
  }
  return out;
}

SupportTable empirical_table(const Graph& base, const std::vector<Edge>& slots,
                             const std::vector<std::size_t>& counts, std::size_t draws) {
  SupportTable table;
  for (std::uint32_t mask = 0; mask < counts.size(); ++mask) {
    if (counts[mask] == 0) continue;
    Graph g = base;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if ((mask >> i) & 1u) g.toggle_edge(slots[i]);
    }
    table.add(g, static_cast<long double>(counts[mask]) / static_cast<long double>(draws));
  }
  return table;
}

// --- criteria ----------------------------------------------------------------

CriterionResult c01_sampler_exactness(Context&) {
  CriterionResult r{1, "t-smoothing sampler matches enumeration", false, "", 0};
  const auto start = std::chrono::steady_clock::now();
  const std::size_t draws = 100000;
  RoundRng rng(RngLineage{0x51a7e, 1, 0, StreamTag::kSampler});
  const std::vector<Graph> graphs = sampler_test_graphs();
  double worst = 0.0;
  std::size_t cases = 0;
  for (const Graph& g : graphs) {
    const auto slots = slots_of(g.vertex_count());
    for (std::size_t t : {1, 2}) {
      std::vector<std::size_t> counts(std::size_t{1} << slots.size(), 0);
      for (std::size_t d = 0; d < draws; ++d) {
        const NoiseOutcome out = sample_t_smoothing(g, t, rng);
        std::uint32_t mask = 0;
        for (const Edge& e : out.toggled) mask |= 1u << slot_index(slots, e);
        ++counts[mask];
      }
      const double tv = tv_distance(enumerate_t_smoothing(g, t), empirical_table(g, slots, counts, draws));
      worst = std::max(worst, tv);
      ++cases;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.passed = worst < 0.02 && secs < 60.0;
  r.detail = std::to_string(graphs.size()) + " graphs, " + std::to_string(cases) +
             " cases, 1e5 draws each, max TV " + f6(worst) + " (limit 0.02)";
  if (secs >= 60.0) r.detail += "; exceeded 60 s";
  return r;
}

CriterionResult c02_targeted_exactness(Context&) {
  CriterionResult r{2, "targeted sampler matches enumeration; chord survival", false, "", 0};
  RoundRng rng(RngLineage{0x7a63e7, 2, 0, StreamTag::kSampler});
  const std::size_t draws = 100000;
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t n = 4 + rng.uniform_below(3);
    const auto slots = slots_of(n);
    Graph g_old;
    do {
      g_old = Graph(n);
      for (const Edge& e : slots) {
        if (rng.bernoulli(0.5)) g_old.add_edge(e);
      }
    } while (!is_connected(g_old));
    Graph g_adv;
    do {
      g_adv = g_old;
      const std::size_t d = 1 + rng.uniform_below(6);
      std::vector<Edge> pool = slots;
      for (std::size_t i = 0; i < d; ++i) {
        const std::size_t pick = i + rng.uniform_below(pool.size() - i);
        std::swap(pool[i], pool[pick]);
        g_adv.toggle_edge(pool[i]);
      }
    } while (!is_connected(g_adv));
    const double eps = 0.1 + 0.8 * rng.uniform01();
    const std::vector<Edge> changed = symmetric_difference(g_old, g_adv);
    std::vector<std::size_t> counts(std::size_t{1} << changed.size(), 0);
    for (std::size_t d = 0; d < draws; ++d) {
      const NoiseOutcome out = sample_targeted_smoothing(g_adv, g_old, eps, rng);
      std::uint32_t mask = 0;
      for (const Edge& e : out.toggled) mask |= 1u << slot_index(changed, e);
      ++counts[mask];
    }
    const double tv = tv_distance(exact_targeted_distribution(g_adv, g_old, eps),
                                  empirical_table(g_adv, changed, counts, draws));
    worst = std::max(worst, tv);
  }

  // The chord (6, 63) leaves the proposal in round 4 and must stay in the
  // smoothed graph through rounds 4, 5 and 6: probability eps^3.
  const double eps = 0.7;
  const std::size_t runs = 10000;
  std::size_t survived = 0;
  const Edge chord{6, 63};
  for (std::size_t run = 0; run < runs; ++run) {
    CassetteAdversary adv(64, 3);
    bool alive = true;
    RunOptions opts;
    opts.max_rounds = 6;
    opts.observer.on_round = [&](std::size_t round, const Graph& g, const VertexSet&) {
      if (round >= 4) alive = alive && g.has_edge(chord);
    };
    run_trial(adv, SmoothingModel::targeted(eps), RngLineage{0xca55e77e, run, 0, StreamTag::kNoise}, opts);
    survived += alive ? 1 : 0;
  }
  const double rate = static_cast<double>(survived) / static_cast<double>(runs);
  r.passed = worst < 0.02 && std::abs(rate - 0.343) <= 0.02;
  r.detail = "20 instances, max TV " + f6(worst) + " (limit 0.02); survival " + f6(rate) +
             " over 1e4 runs (target 0.343 +- 0.02)";
  return r;
}

CriterionResult c03_zero_noise(Context&) {
  CriterionResult r{3, "zero-noise baselines flood in n-1 rounds", true, "", 0};
  for (std::size_t n : {5, 50, 500}) {
    SpoolingAdversary spool(n);
    StaticAdversary path(path_graph(n));
    const RngLineage lineage{3, 0, 0, StreamTag::kNoise};
    const auto a = run_trial(spool, SmoothingModel::k_smooth(0), lineage);
    const auto b = run_trial(path, SmoothingModel::k_smooth(0), lineage);
    const bool ok = a.flooding_time == n - 1 && b.flooding_time == n - 1;
    r.passed = r.passed && ok;
    r.detail += "n=" + std::to_string(n) + ": spooling " +
                (a.flooding_time ? std::to_string(*a.flooding_time) : "capped") + ", path " +
                (b.flooding_time ? std::to_string(*b.flooding_time) : "capped") + "; ";
  }
  return r;
}

CriterionResult c04_spooling_scaling(Context& ctx) {
  CriterionResult r{4, "spooling flooding time scales as n^(2/3) k^(-1/3)", false, "", 0};
  const ExperimentResult ks = ctx.preset("spooling_k_sweep");
  auto cells = select(ks, "spooling");
  std::sort(cells.begin(), cells.end(), [](auto* a, auto* b) { return a->cell.model.k < b->cell.model.k; });
  bool decreasing = cells.size() >= 2;
  std::string medians;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    medians += "k=" + g6(cells[i]->cell.model.k) + ":" + f6(cells[i]->summary.ft_median) + " ";
    if (i > 0 && !(cells[i]->summary.ft_median < cells[i - 1]->summary.ft_median)) decreasing = false;
  }
  const FitRow kfit = find_fit(compute_fits(ks), "k_slope");
  const ExperimentResult ns = ctx.preset("spooling_n_sweep");
  const FitRow nfit = find_fit(compute_fits(ns), "n_exponent");
  std::string detail;
  const bool trials_ok = enough_trials(ks, 200, detail) && enough_trials(ns, 200, detail);
  const bool k_ok = kfit.ok && kfit.fit.slope >= -0.50 && kfit.fit.slope <= -0.18;
  const bool n_ok = nfit.ok && nfit.fit.slope >= 0.55 && nfit.fit.slope <= 0.80;
  r.passed = trials_ok && decreasing && k_ok && n_ok;
  r.detail = detail + "medians " + medians + (decreasing ? "(strictly decreasing)" : "(NOT strictly decreasing)") +
             "; k slope " + (kfit.ok ? f6(kfit.fit.slope) : kfit.error) + " in [-0.50,-0.18]; n exponent " +
             (nfit.ok ? f6(nfit.fit.slope) : nfit.error) + " in [0.55,0.80]";
  return r;
}

CriterionResult c05_fractional(Context& ctx) {
  CriterionResult r{5, "fractional k interpolates monotonically", false, "", 0};
  const ExperimentResult res = ctx.preset("fractional_k");
  auto cells = select(res, "spooling");
  std::sort(cells.begin(), cells.end(), [](auto* a, auto* b) { return a->cell.model.k < b->cell.model.k; });
  std::string detail;
  bool ok = enough_trials(res, 200, detail) && cells.size() == 3;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    detail += "k=" + g6(cells[i]->cell.model.k) + ":" + f6(cells[i]->summary.ft_median) + " ";
    if (i > 0 && !(cells[i]->summary.ft_median < cells[i - 1]->summary.ft_median)) ok = false;
  }
  r.passed = ok;
  r.detail = "medians " + detail;
  return r;
}

CriterionResult c06_adaptive_separation(Context& ctx) {
  CriterionResult r{6, "adaptive spooling separates from oblivious", false, "", 0};
  const ExperimentResult res = ctx.preset("adaptive_separation");
  bool ok = true;
  std::string detail;
  for (const CompareRow& row : compute_compares(res)) {
    const bool pass = row.median_numerator >= 2.0 * row.median_denominator;
    ok = ok && pass;
    detail += "n=" + std::to_string(row.n) + " ratio " + f6(row.interval.ratio) + " [" +
              f6(row.interval.lower) + "," + f6(row.interval.upper) + "]; ";
  }
  const auto fits = compute_fits(res);
  const FitRow& ad = find_fit(fits, "adaptive_n");
  const FitRow& ob = find_fit(fits, "oblivious_n");
  const bool fits_ok = ad.ok && ob.ok && ad.fit.slope >= 0.8 && ob.fit.slope <= 0.8;
  r.passed = ok && fits_ok && !compute_compares(res).empty();
  r.detail = detail + "adaptive exponent " + (ad.ok ? f6(ad.fit.slope) : ad.error) + " (>= 0.8), oblivious " +
             (ob.ok ? f6(ob.fit.slope) : ob.error) + " (<= 0.8)";
  return r;
}

CriterionResult c07_adaptive_growth(Context& ctx) {
  CriterionResult r{7, "adaptive informed set grows at most linearly", false, "", 0};
  const ExperimentResult res = ctx.preset("adaptive_growth");
  if (res.cells.size() != 1) throw ConfigError("adaptive_growth preset must hold one cell");
  const CellResult& cell = res.cells.front();
  const std::size_t n = cell.cell.n;
  const std::size_t horizon = n / 20;
  bool ok = true;
  double worst_ratio = 0.0;
  std::size_t worst_round = 0;
  for (std::size_t i = 1; i <= horizon; ++i) {
    double sum = 0;
    for (const TrialRecord& t : cell.trials) {
      sum += i <= t.rounds.size() ? static_cast<double>(t.rounds[i - 1].informed) : static_cast<double>(n);
    }
    const double avg = sum / static_cast<double>(cell.trials.size());
    if (avg > 3.0 * static_cast<double>(i)) ok = false;
    const double ratio = avg / static_cast<double>(i);
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst_round = i;
    }
  }
  std::string detail;
  r.passed = ok && enough_trials(res, 200, detail);
  r.detail = detail + "rounds 1.." + std::to_string(horizon) + " at n=" + std::to_string(n) +
             ": max mean|I_i|/i = " + f6(worst_ratio) + " at i=" + std::to_string(worst_round) + " (limit 3)";
  return r;
}

CriterionResult c08_low_churn(Context& ctx) {
  CriterionResult r{8, "low-churn adversary holds flooding above n/10", false, "", 0};
  const ExperimentResult res = ctx.preset("low_churn");
  std::string detail;
  bool ok = enough_trials(res, 200, detail);
  for (const CellResult& c : res.cells) {
    std::size_t slow = 0;
    std::size_t lo = SIZE_MAX, hi = 0;
    for (const TrialRecord& t : c.trials) {
      if (!t.flooding_time || *t.flooding_time * 10 >= c.cell.n) ++slow;
      if (t.churn_min) lo = std::min(lo, *t.churn_min);
      if (t.churn_max) hi = std::max(hi, *t.churn_max);
    }
    const double frac = static_cast<double>(slow) / static_cast<double>(c.trials.size());
    ok = ok && frac >= 0.9 && lo >= 2 && hi <= 5;
    detail += "n=" + std::to_string(c.cell.n) + ": " + f6(frac) + " of trials >= n/10, churn in [" +
              std::to_string(lo) + "," + std::to_string(hi) + "]; ";
  }
  r.passed = ok;
  r.detail = detail;
  return r;
}

CriterionResult c09_waiting_game(Context& ctx) {
  CriterionResult r{9, "static adversary sees no proportional noise", false, "", 0};
  const ExperimentResult res = ctx.preset("waiting_game");
  bool ok = true;
  std::size_t trials = 0, rounds = 0, noise = 0;
  for (const CellResult& c : res.cells) {
    for (const TrialRecord& t : c.trials) {
      ++trials;
      rounds += t.rounds_run;
      noise += t.total_noise;
      ok = ok && t.total_noise == 0 && t.total_churn == 0;
    }
  }
  r.passed = ok && trials > 0;
  r.detail = std::to_string(trials) + " trials, " + std::to_string(rounds) + " rounds, total noise " +
             std::to_string(noise);
  return r;
}

CriterionResult c10_star_recenter(Context& ctx) {
  CriterionResult r{10, "targeted star-recenter probe floods in O(log n)", false, "", 0};
  const ExperimentResult res = ctx.preset("star_recenter_probe");
  bool ok = true;
  std::string detail;
  for (const CellResult& c : res.cells) {
    const double bound = 2.0 * std::log(static_cast<double>(c.cell.n));
    ok = ok && c.summary.ft_median <= bound;
    detail += "n=" + std::to_string(c.cell.n) + " median " + f6(c.summary.ft_median) + " (<= " + f6(bound) + "); ";
  }
  const FitRow fit = find_fit(compute_fits(res), "n_exponent");
  r.passed = ok && fit.ok && fit.fit.slope < 0.2;
  r.detail = detail + "exponent " + (fit.ok ? f6(fit.fit.slope) : fit.error) + " (< 0.2)";
  return r;
}

CriterionResult c11_cassette(Context& ctx) {
  CriterionResult r{11, "cassette keeps flooding at n-1 with bounded diameter", false, "", 0};
  const ExperimentResult res = ctx.preset("cassette");
  std::string detail;
  bool ok = enough_trials(res, 100, detail);
  for (const CellResult& c : res.cells) {
    const std::size_t n = c.cell.n;
    std::size_t exact = 0;
    for (const TrialRecord& t : c.trials) exact += t.flooding_time == n - 1 ? 1 : 0;
    const double frac = static_cast<double>(exact) / static_cast<double>(c.trials.size());
    ok = ok && frac >= 0.9;

    // The proposals do not depend on the trial, so one pass covers them all.
    auto adv = make_adversary(c.cell.adversary, n, c.cell.model);
    auto& cassette = dynamic_cast<CassetteAdversary&>(*adv);
    const std::size_t t = cassette.spacing();
    std::size_t worst = 0, checked = 0;
    for (std::size_t round = 1; round <= n; ++round) {
      if (round > 1 && cassette.propose_round(round).empty()) continue;
      worst = std::max(worst, diameter(cassette.graph_at(round)));
      ++checked;
    }
    ok = ok && worst <= 5 * t + 4;
    detail += "n=" + std::to_string(n) + " t=" + std::to_string(t) + ": " + f6(frac) +
              " of trials flood in n-1; max diameter " + std::to_string(worst) + " over " +
              std::to_string(checked) + " distinct proposals (limit " + std::to_string(5 * t + 4) + "); ";
  }
  r.passed = ok;
  r.detail = detail;
  return r;
}

std::string render(const ExperimentResult& res) {
  std::ostringstream out;
  write_summary_csv(out, res);
  write_trials_jsonl(out, res);
  write_fits_csv(out, compute_fits(res));
  write_compare_csv(out, compute_compares(res));
  return out.str();
}

CriterionResult c12_determinism(Context& ctx) {
  CriterionResult r{12, "repeat runs are byte-identical", false, "", 0};
  const ExperimentConfig cfg = load_config(ctx.options().config_dir / "determinism.json");
  const int workers = std::max(2, ctx.options().workers);
  const std::string first = render(run_experiment(cfg, workers));
  const std::string second = render(run_experiment(cfg, workers));
  const std::string serial = render(run_experiment_serial(cfg));
  r.passed = first == second && first == serial;
  r.detail = std::to_string(first.size()) + " bytes; parallel repeat " +
             (first == second ? "identical" : "DIFFERS") + ", serial reference " +
             (first == serial ? "identical" : "DIFFERS");
  if (ctx.options().out_dir) {
    ExperimentResult res = run_experiment(cfg, workers);
    write_outputs(res, *ctx.options().out_dir / "determinism", true);
  }
  return r;
}

using CriterionFn = CriterionResult (*)(Context&);

const std::vector<CriterionFn>& all_criteria() {
  static const std::vector<CriterionFn> fns{
      c01_sampler_exactness, c02_targeted_exactness, c03_zero_noise,     c04_spooling_scaling,
      c05_fractional,        c06_adaptive_separation, c07_adaptive_growth, c08_low_churn,
      c09_waiting_game,      c10_star_recenter,      c11_cassette,        c12_determinism};
  return fns;
}

std::vector<int> suite_ids(const std::string& suite) {
  if (suite == "full") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  if (suite == "fast") return {3, 9, 12};
  if (suite == "exactness") return {1, 2};
  if (suite == "scaling") return {4, 5, 6, 7};
  if (suite == "constructions") return {8, 10, 11};
  throw ConfigError("unknown validation suite \"" + suite + "\"");
}

}  // namespace

std::vector<std::string> validation_suites() {
  return {"full", "fast", "exactness", "scaling", "constructions"};
}

std::vector<CriterionResult> run_validation(const ValidationOptions& options) {
  const std::vector<int> ids = suite_ids(options.suite);
  Context ctx(options);
  std::vector<CriterionResult> results;
  for (int id : ids) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult res = all_criteria()[static_cast<std::size_t>(id - 1)](ctx);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (options.progress) options.progress(res);
    results.push_back(std::move(res));
  }
  if (options.out_dir) {
    std::filesystem::create_directories(*options.out_dir);
    std::ofstream out(*options.out_dir / "criteria.csv", std::ios::binary);
    out << "id,name,status,detail\n";
    for (const CriterionResult& c : results) {
      out << c.id << ",\"" << c.name << "\"," << (c.passed ? "PASS" : "FAIL") << ",\"" << c.detail << "\"\n";
    }
  }
  return results;
}

}  // namespace smoothflood
