#include "smoothflood/engine.hpp"

#include <algorithm>

namespace smoothflood {

std::size_t flood_step(const Graph& g, VertexSet& informed) {
  const std::size_t n = g.vertex_count();
  const std::size_t words = g.row_words();
  auto in = informed.words();
  std::vector<VertexId> fresh;
  if (informed.size() <= n - informed.size()) {
    std::vector<std::uint64_t> reach(words, 0);
    informed.for_each([&](VertexId v) {
      auto r = g.row(v);
      for (std::size_t w = 0; w < words; ++w) reach[w] |= r[w];
    });
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t bits = reach[w] & ~in[w];
      while (bits != 0) {
        fresh.push_back(static_cast<VertexId>(w * 64 + std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
  } else {
    for (VertexId v = 0; v < n; ++v) {
      if (informed.contains(v)) continue;
      auto r = g.row(v);
      for (std::size_t w = 0; w < words; ++w) {
        if ((r[w] & in[w]) != 0) {
          fresh.push_back(v);
          break;
        }
      }
    }
  }
  // Inserted only after the scan so that new vertices relay next round.
  for (VertexId v : fresh) informed.insert(v);
  return fresh.size();
}

TrialRecord run_trial(Adversary& adversary, NoiseProcess& noise, const RngLineage& lineage,
                      const RunOptions& options) {
  const std::size_t n = adversary.vertex_count();
  const std::size_t cap = options.max_rounds.value_or(4 * n);
  TrialRecord rec;
  rec.n = n;

  VertexSet informed(n);
  informed.insert(0);
  if (informed.full()) {
    rec.flooding_time = 0;
    return rec;
  }

  Graph working = adversary.initial_graph();
  if (working.vertex_count() != n || !is_connected(working)) {
    throw UsageError("adversary's first graph must be connected on " + std::to_string(n) + " vertices");
  }
  // G'_{i-1} xor G_{i-1}; empty before round 1 since G'_0 = G_1.
  std::vector<Edge> toggles;
  std::vector<char> was_present;
  std::vector<std::uint64_t> toggle_keys;
  std::vector<Edge> churn_edges;

  for (std::size_t round = 1; round <= cap; ++round) {
    EdgeDelta delta;
    std::size_t churn = 0;
    churn_edges.clear();
    if (round >= 2) {
      const AdversaryView view{round, working, informed, toggles};
      delta = adversary.propose(view);

      was_present.resize(toggles.size());
      for (std::size_t k = 0; k < toggles.size(); ++k) was_present[k] = working.has_edge(toggles[k]);
      for (const Edge& e : toggles) working.toggle_edge(e);
      apply_delta_in_place(working, delta);
      if (options.verify_proposals && !delta.removed.empty() && !is_connected(working)) {
        throw UsageError(adversary.name() + " proposed a disconnected graph in round " +
                         std::to_string(round));
      }

      // Slots flipped last round differ from G_i exactly when G_i disagrees with G'_{i-1}.
      std::size_t overlap = 0;
      std::size_t toggled_churn = 0;
      for (std::size_t k = 0; k < toggles.size(); ++k) {
        if (working.has_edge(toggles[k]) == static_cast<bool>(was_present[k])) {
          ++overlap;
        } else {
          ++toggled_churn;
        }
      }
      churn = delta.size() - overlap + toggled_churn;

      if (noise.needs_churn_edges()) {
        toggle_keys.clear();
        for (const Edge& e : toggles) toggle_keys.push_back(e.key());
        std::sort(toggle_keys.begin(), toggle_keys.end());
        auto in_toggles = [&](const Edge& e) {
          return std::binary_search(toggle_keys.begin(), toggle_keys.end(), e.key());
        };
        for (const auto* list : {&delta.added, &delta.removed}) {
          for (const Edge& e : *list) {
            if (!in_toggles(e)) churn_edges.push_back(e);
          }
        }
        for (std::size_t k = 0; k < toggles.size(); ++k) {
          if (working.has_edge(toggles[k]) != static_cast<bool>(was_present[k])) {
            churn_edges.push_back(toggles[k]);
          }
        }
        std::sort(churn_edges.begin(), churn_edges.end());
      }
    }
    if (options.observer.on_proposal) options.observer.on_proposal(round, working, delta);

    RoundRng rng(lineage.at_round(round).with_tag(StreamTag::kNoise));
    RoundNoise rn = noise.apply(working, churn_edges, churn, rng);
    toggles = std::move(rn.toggled);

    const std::size_t fresh = flood_step(working, informed);
    if (options.observer.on_round) options.observer.on_round(round, working, informed);

    rec.rounds_run = round;
    rec.total_noise += rn.magnitude;
    rec.total_rejections += rn.rejections;
    rec.total_churn += churn;
    rec.cap_bound_rounds += rn.cap_bound ? 1 : 0;
    if (round >= 2) {
      rec.churn_min = std::min(rec.churn_min.value_or(churn), churn);
      rec.churn_max = std::max(rec.churn_max.value_or(churn), churn);
    }
    if (options.keep_rounds) {
      RoundTrace tr;
      tr.round = round;
      tr.informed = informed.size();
      tr.newly_informed = fresh;
      tr.churn = churn;
      tr.noise = rn.magnitude;
      tr.rejections = rn.rejections;
      tr.cap_bound = rn.cap_bound;
      tr.proposal_delta = delta.size();
      rec.rounds.push_back(tr);
    }
    if (informed.full()) {
      rec.flooding_time = round;
      break;
    }
  }
  return rec;
}

TrialRecord run_trial(Adversary& adversary, const SmoothingModel& model, const RngLineage& lineage,
                      const RunOptions& options) {
  auto noise = make_noise_process(model, adversary.vertex_count(), options.limits);
  return run_trial(adversary, *noise, lineage, options);
}

nlohmann::json to_json(const RoundTrace& t) {
  return {{"round", t.round},         {"informed", t.informed},     {"newly_informed", t.newly_informed},
          {"churn", t.churn},         {"noise", t.noise},           {"rejections", t.rejections},
          {"cap_bound", t.cap_bound}, {"proposal_delta", t.proposal_delta}};
}

nlohmann::json to_json(const TrialRecord& r) {
  nlohmann::json j;
  j["n"] = r.n;
  j["flooding_time"] = r.flooding_time ? nlohmann::json(*r.flooding_time) : nlohmann::json(nullptr);
  j["capped"] = !r.flooding_time.has_value();
  j["rounds_run"] = r.rounds_run;
  j["total_noise"] = r.total_noise;
  j["total_rejections"] = r.total_rejections;
  j["total_churn"] = r.total_churn;
  j["cap_bound_rounds"] = r.cap_bound_rounds;
  j["churn_min"] = r.churn_min ? nlohmann::json(*r.churn_min) : nlohmann::json(nullptr);
  j["churn_max"] = r.churn_max ? nlohmann::json(*r.churn_max) : nlohmann::json(nullptr);
  if (!r.rounds.empty()) {
    nlohmann::json rounds = nlohmann::json::array();
    for (const RoundTrace& t : r.rounds) rounds.push_back(to_json(t));
    j["rounds"] = std::move(rounds);
  }
  return j;
}

}  // namespace smoothflood
