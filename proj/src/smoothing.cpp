#include "smoothflood/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace smoothflood {

namespace {

std::string format_param(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

void check_retries(std::size_t rejections, const SamplerLimits& limits, const char* what) {
  if (rejections > limits.max_retries) {
    throw SamplerStarvation(std::string(what) + ": no connected outcome after " +
                            std::to_string(limits.max_retries) + " retries");
  }
}

/// Uniform j-subset of the C(n,2) edge slots.
void draw_slots(std::size_t n, std::size_t j, RoundRng& rng, std::vector<Edge>& out) {
  out.clear();
  const std::size_t slots = n * (n - 1) / 2;
  if (j == 0) return;
  if (slots <= 64 || 4 * j > slots) {
    // Small universe: partial Fisher-Yates over the explicit slot list.
    std::vector<Edge> all;
    all.reserve(slots);
    for (VertexId u = 0; u < n; ++u) {
      for (VertexId v = u + 1; v < n; ++v) all.push_back(Edge{u, v});
    }
    for (std::size_t i = 0; i < j; ++i) {
      const std::size_t pick = i + rng.uniform_below(slots - i);
      std::swap(all[i], all[pick]);
      out.push_back(all[i]);
    }
    return;
  }
  while (out.size() < j) {
    const auto a = static_cast<VertexId>(rng.uniform_below(n));
    const auto b = static_cast<VertexId>(rng.uniform_below(n));
    if (a == b) continue;
    const Edge e = Edge::make(a, b);
    if (std::find(out.begin(), out.end(), e) != out.end()) continue;
    out.push_back(e);
  }
}

}  // namespace

SmoothingModel SmoothingModel::k_smooth(double k) {
  SmoothingModel m;
  m.kind = ModelKind::kKSmooth;
  m.k = k;
  return m;
}

SmoothingModel SmoothingModel::proportional(double epsilon, std::optional<std::size_t> cap) {
  SmoothingModel m;
  m.kind = ModelKind::kProportional;
  m.epsilon = epsilon;
  m.cap = cap;
  return m;
}

SmoothingModel SmoothingModel::targeted(double epsilon) {
  SmoothingModel m;
  m.kind = ModelKind::kTargeted;
  m.epsilon = epsilon;
  return m;
}

void SmoothingModel::validate(std::size_t n) const {
  const double limit = static_cast<double>(n) / 16.0;
  switch (kind) {
    case ModelKind::kKSmooth:
      if (!std::isfinite(k) || k < 0.0) {
        throw ConfigError("k-smoothing requires k >= 0, got k=" + format_param(k));
      }
      if (k > limit) {
        throw ConfigError("k-smoothing premise k <= n/16 violated: k=" + format_param(k) +
                          ", n=" + std::to_string(n) + " (n/16=" + format_param(limit) + ")");
      }
      break;
    case ModelKind::kProportional:
      if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw ConfigError("proportional smoothing requires 0 < epsilon <= 1, got " +
                          format_param(epsilon));
      }
      if (static_cast<double>(effective_cap(n)) > limit) {
        throw ConfigError("proportional noise cap " + std::to_string(effective_cap(n)) +
                          " exceeds n/16=" + format_param(limit));
      }
      break;
    case ModelKind::kTargeted:
      if (!(epsilon >= 0.0 && epsilon < 1.0)) {
        throw ConfigError("targeted smoothing requires 0 <= epsilon < 1, got " +
                          format_param(epsilon));
      }
      break;
  }
}

std::string SmoothingModel::kind_name() const {
  switch (kind) {
    case ModelKind::kKSmooth:
      return "k_smooth";
    case ModelKind::kProportional:
      return "proportional";
    case ModelKind::kTargeted:
      return "targeted";
  }
  return "unknown";
}

std::string SmoothingModel::label() const {
  switch (kind) {
    case ModelKind::kKSmooth:
      return "k_smooth(k=" + format_param(k) + ")";
    case ModelKind::kProportional:
      return "proportional(eps=" + format_param(epsilon) +
             (cap ? ",cap=" + std::to_string(*cap) : std::string()) + ")";
    case ModelKind::kTargeted:
      return "targeted(eps=" + format_param(epsilon) + ")";
  }
  return "unknown";
}

std::size_t roundp_sample(double x, RoundRng& rng) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw UsageError("roundp: argument must be a finite non-negative real");
  }
  const double nearest = std::round(x);
  if (std::abs(x - nearest) < 1e-9) return static_cast<std::size_t>(nearest);
  const double lower = std::floor(x);
  const auto base = static_cast<std::size_t>(lower);
  return rng.bernoulli(x - lower) ? base + 1 : base;
}

ToggleDraw t_smoothing_in_place(Graph& g, std::size_t t, RoundRng& rng,
                                const SamplerLimits& limits) {
  ToggleDraw draw;
  const std::size_t n = g.vertex_count();
  const std::size_t slots = n < 2 ? 0 : n * (n - 1) / 2;
  const std::size_t jmax = std::min(t, slots);
  if (jmax == 0) return draw;

  // Toggle-set size j has weight C(M, j); log-space with incremental ratios.
  std::vector<double> log_w(jmax + 1, 0.0);
  for (std::size_t j = 1; j <= jmax; ++j) {
    log_w[j] = log_w[j - 1] + std::log(static_cast<double>(slots - j + 1)) -
               std::log(static_cast<double>(j));
  }
  const double top = *std::max_element(log_w.begin(), log_w.end());
  std::vector<double> weights(jmax + 1);
  for (std::size_t j = 0; j <= jmax; ++j) weights[j] = std::exp(log_w[j] - top);
  std::discrete_distribution<std::size_t> pick_size(weights.begin(), weights.end());

  std::vector<Edge> chosen;
  for (;;) {
    const std::size_t j = pick_size(rng.engine());
    draw_slots(n, j, rng, chosen);
    bool removed_any = false;
    for (const Edge& e : chosen) removed_any |= !g.toggle_edge(e);
    // Pure additions keep a connected graph connected.
    if (!removed_any || is_connected(g)) {
      draw.toggled = chosen;
      return draw;
    }
    for (const Edge& e : chosen) g.toggle_edge(e);
    ++draw.rejections;
    check_retries(draw.rejections, limits, "t-smoothing");
  }
}

ToggleDraw targeted_in_place(Graph& g, std::span<const Edge> changed, double epsilon,
                             RoundRng& rng, const SamplerLimits& limits) {
  ToggleDraw draw;
  if (changed.empty() || epsilon <= 0.0) return draw;
  std::vector<Edge> flipped;
  for (;;) {
    flipped.clear();
    bool removed_any = false;
    for (const Edge& e : changed) {
      if (!rng.bernoulli(epsilon)) continue;
      removed_any |= !g.toggle_edge(e);
      flipped.push_back(e);
    }
    if (!removed_any || is_connected(g)) {
      draw.toggled = std::move(flipped);
      return draw;
    }
    for (const Edge& e : flipped) g.toggle_edge(e);
    ++draw.rejections;
    check_retries(draw.rejections, limits, "targeted smoothing");
  }
}

namespace {

void require_connected(const Graph& g, const char* what) {
  if (!is_connected(g)) throw UsageError(std::string(what) + ": graph must be connected");
}

NoiseOutcome outcome_from(Graph&& smoothed, std::size_t magnitude, ToggleDraw&& draw) {
  NoiseOutcome out;
  out.smoothed = std::move(smoothed);
  out.noise_magnitude = magnitude;
  out.toggled = std::move(draw.toggled);
  out.rejections = draw.rejections;
  return out;
}

}  // namespace

NoiseOutcome sample_t_smoothing(const Graph& g_adv, std::size_t t, RoundRng& rng,
                                const SamplerLimits& limits) {
  require_connected(g_adv, "t-smoothing");
  Graph working = g_adv;
  ToggleDraw draw = t_smoothing_in_place(working, t, rng, limits);
  return outcome_from(std::move(working), t, std::move(draw));
}

NoiseOutcome sample_targeted_smoothing(const Graph& g_adv, const Graph& g_old, double epsilon,
                                       RoundRng& rng, const SamplerLimits& limits) {
  require_connected(g_adv, "targeted smoothing (proposal)");
  require_connected(g_old, "targeted smoothing (previous graph)");
  const std::vector<Edge> changed = symmetric_difference(g_old, g_adv);
  Graph working = g_adv;
  ToggleDraw draw = targeted_in_place(working, changed, epsilon, rng, limits);
  const std::size_t magnitude = draw.toggled.size();
  return outcome_from(std::move(working), magnitude, std::move(draw));
}

NoiseOutcome next_k_smoothed(const Graph& g_adv, double k, RoundRng& rng,
                             const SamplerLimits& limits) {
  const std::size_t t = roundp_sample(k, rng);
  return sample_t_smoothing(g_adv, t, rng, limits);
}

NoiseOutcome next_proportional(const Graph& g_prev_smoothed, const Graph& g_adv, double epsilon,
                               std::size_t cap, RoundRng& rng, const SamplerLimits& limits) {
  const std::size_t churn = hamming_distance(g_prev_smoothed, g_adv);
  const std::size_t drawn = roundp_sample(epsilon * static_cast<double>(churn), rng);
  const std::size_t t = std::min(drawn, cap);
  NoiseOutcome out = sample_t_smoothing(g_adv, t, rng, limits);
  out.cap_bound = drawn > cap;
  return out;
}

NoiseOutcome next_targeted(const Graph& g_prev_smoothed, const Graph& g_adv, double epsilon,
                           RoundRng& rng, const SamplerLimits& limits) {
  return sample_targeted_smoothing(g_adv, g_prev_smoothed, epsilon, rng, limits);
}

namespace {

class KSmoothProcess final : public NoiseProcess {
 public:
  KSmoothProcess(double k, SamplerLimits limits) : k_(k), limits_(limits) {}
  RoundNoise apply(Graph& working, std::span<const Edge>, std::size_t, RoundRng& rng) override {
    RoundNoise out;
    out.magnitude = roundp_sample(k_, rng);
    ToggleDraw draw = t_smoothing_in_place(working, out.magnitude, rng, limits_);
    out.toggled = std::move(draw.toggled);
    out.rejections = draw.rejections;
    return out;
  }

 private:
  double k_;
  SamplerLimits limits_;
};

class ProportionalProcess final : public NoiseProcess {
 public:
  ProportionalProcess(double epsilon, std::size_t cap, SamplerLimits limits)
      : epsilon_(epsilon), cap_(cap), limits_(limits) {}
  RoundNoise apply(Graph& working, std::span<const Edge>, std::size_t churn_size,
                   RoundRng& rng) override {
    RoundNoise out;
    const std::size_t drawn = roundp_sample(epsilon_ * static_cast<double>(churn_size), rng);
    out.magnitude = std::min(drawn, cap_);
    out.cap_bound = drawn > cap_;
    ToggleDraw draw = t_smoothing_in_place(working, out.magnitude, rng, limits_);
    out.toggled = std::move(draw.toggled);
    out.rejections = draw.rejections;
    return out;
  }

 private:
  double epsilon_;
  std::size_t cap_;
  SamplerLimits limits_;
};

class TargetedProcess final : public NoiseProcess {
 public:
  TargetedProcess(double epsilon, SamplerLimits limits) : epsilon_(epsilon), limits_(limits) {}
  bool needs_churn_edges() const override { return true; }
  RoundNoise apply(Graph& working, std::span<const Edge> churn, std::size_t,
                   RoundRng& rng) override {
    RoundNoise out;
    ToggleDraw draw = targeted_in_place(working, churn, epsilon_, rng, limits_);
    out.magnitude = draw.toggled.size();
    out.toggled = std::move(draw.toggled);
    out.rejections = draw.rejections;
    return out;
  }

 private:
  double epsilon_;
  SamplerLimits limits_;
};

}  // namespace

std::unique_ptr<NoiseProcess> make_noise_process(const SmoothingModel& model, std::size_t n,
                                                 const SamplerLimits& limits) {
  switch (model.kind) {
    case ModelKind::kKSmooth:
      return std::make_unique<KSmoothProcess>(model.k, limits);
    case ModelKind::kProportional:
      return std::make_unique<ProportionalProcess>(model.epsilon, model.effective_cap(n), limits);
    case ModelKind::kTargeted:
      return std::make_unique<TargetedProcess>(model.epsilon, limits);
  }
  throw UsageError("unknown smoothing model");
}

}  // namespace smoothflood
