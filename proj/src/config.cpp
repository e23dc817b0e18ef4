#include "smoothflood/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace smoothflood {

namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    if (!known) throw ConfigError(where + ": unknown key \"" + key + "\"");
  }
}

template <class T>
T get_as(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": bad \"" + key + "\": " + e.what());
  }
}

std::size_t get_count(const json& j, const char* key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(where + ": \"" + key + "\" must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

void require_list(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_array() || j.at(key).empty()) {
    throw ConfigError(where + ": \"" + key + "\" must be a non-empty array");
  }
}

}  // namespace

std::string Cell::key() const {
  return "n=" + std::to_string(n) + "|" + model.label() + "|" + adversary.label();
}

std::string to_string(TraceLevel level) {
  switch (level) {
    case TraceLevel::kNone:
      return "none";
    case TraceLevel::kSummary:
      return "summary";
    case TraceLevel::kRounds:
      return "rounds";
  }
  return "summary";
}

SmoothingModel parse_model(const json& j) {
  const std::string where = "model";
  const auto kind = get_as<std::string>(j, "kind", where);
  if (kind == "k_smooth") {
    check_keys(j, {"kind", "k"}, where);
    return SmoothingModel::k_smooth(get_as<double>(j, "k", where));
  }
  if (kind == "proportional") {
    check_keys(j, {"kind", "epsilon", "cap"}, where);
    std::optional<std::size_t> cap;
    if (j.contains("cap")) cap = get_count(j, "cap", where);
    return SmoothingModel::proportional(get_as<double>(j, "epsilon", where), cap);
  }
  if (kind == "targeted") {
    check_keys(j, {"kind", "epsilon"}, where);
    return SmoothingModel::targeted(get_as<double>(j, "epsilon", where));
  }
  throw ConfigError("model: unknown kind \"" + kind + "\"");
}

AdversarySpec parse_adversary(const json& j) {
  const std::string where = "adversary";
  check_keys(j, {"kind", "c", "t", "period", "graph"}, where);
  AdversarySpec spec;
  spec.kind = get_as<std::string>(j, "kind", where);
  static const std::set<std::string> kinds{"spooling",  "adaptive_spooling", "low_churn",
                                           "cassette",  "star_recenter",     "static"};
  if (kinds.count(spec.kind) == 0) throw ConfigError("adversary: unknown kind \"" + spec.kind + "\"");
  if (j.contains("c")) spec.c = get_as<double>(j, "c", where);
  if (j.contains("t")) spec.t = get_count(j, "t", where);
  if (j.contains("period")) spec.period = get_count(j, "period", where);
  if (j.contains("graph")) spec.graph = get_as<std::string>(j, "graph", where);
  return spec;
}

ExperimentConfig parse_config(const json& j) {
  check_keys(j, {"name", "base_seed", "trials", "max_rounds", "trace", "output_dir", "cells", "fits",
                 "compare"},
             "config");
  ExperimentConfig cfg;
  cfg.name = get_as<std::string>(j, "name", "config");
  cfg.base_seed = get_as<std::uint64_t>(j, "base_seed", "config");
  cfg.trials = get_count(j, "trials", "config");
  if (cfg.trials == 0) throw ConfigError("config: \"trials\" must be positive");
  if (j.contains("max_rounds") && !j.at("max_rounds").is_null()) {
    cfg.max_rounds = get_count(j, "max_rounds", "config");
  }
  if (j.contains("trace")) {
    const auto t = get_as<std::string>(j, "trace", "config");
    if (t == "none") {
      cfg.trace = TraceLevel::kNone;
    } else if (t == "summary") {
      cfg.trace = TraceLevel::kSummary;
    } else if (t == "rounds") {
      cfg.trace = TraceLevel::kRounds;
    } else {
      throw ConfigError("config: trace must be none, summary or rounds");
    }
  }
  if (j.contains("output_dir")) cfg.output_dir = get_as<std::string>(j, "output_dir", "config");

  if (!j.contains("cells") || !j.at("cells").is_array() || j.at("cells").empty()) {
    throw ConfigError("config: \"cells\" must be a non-empty array of grid blocks");
  }
  for (const json& block : j.at("cells")) {
    const std::string where = "cells";
    check_keys(block, {"n", "models", "adversaries"}, where);
    require_list(block, "n", where);
    require_list(block, "models", where);
    require_list(block, "adversaries", where);
    GridBlock g;
    for (const json& n : block.at("n")) {
      if (!n.is_number_integer() || n.get<long long>() < 2) {
        throw ConfigError("cells: every n must be an integer >= 2");
      }
      g.ns.push_back(n.get<std::size_t>());
    }
    for (const json& m : block.at("models")) g.models.push_back(parse_model(m));
    for (const json& a : block.at("adversaries")) g.adversaries.push_back(parse_adversary(a));
    cfg.grid.push_back(std::move(g));
  }

  if (j.contains("fits")) {
    for (const json& f : j.at("fits")) {
      const std::string where = "fits";
      check_keys(f, {"name", "axis", "where", "min", "max"}, where);
      FitSpec fit;
      fit.name = get_as<std::string>(f, "name", where);
      fit.axis = get_as<std::string>(f, "axis", where);
      if (fit.axis != "n" && fit.axis != "param") {
        throw ConfigError("fits: axis must be \"n\" or \"param\"");
      }
      if (f.contains("where")) {
        const json& w = f.at("where");
        check_keys(w, {"adversary", "model", "n", "param"}, "fits.where");
        if (w.contains("adversary")) fit.adversary = get_as<std::string>(w, "adversary", where);
        if (w.contains("model")) fit.model = get_as<std::string>(w, "model", where);
        if (w.contains("n")) fit.n = get_count(w, "n", where);
        if (w.contains("param")) fit.param = get_as<double>(w, "param", where);
      }
      if (f.contains("min")) fit.min = get_as<double>(f, "min", where);
      if (f.contains("max")) fit.max = get_as<double>(f, "max", where);
      cfg.fits.push_back(std::move(fit));
    }
  }
  if (j.contains("compare")) {
    for (const json& c : j.at("compare")) {
      const std::string where = "compare";
      check_keys(c, {"name", "numerator", "denominator", "resamples", "level"}, where);
      CompareSpec cmp;
      cmp.name = get_as<std::string>(c, "name", where);
      cmp.numerator = get_as<std::string>(c, "numerator", where);
      cmp.denominator = get_as<std::string>(c, "denominator", where);
      if (c.contains("resamples")) cmp.resamples = get_count(c, "resamples", where);
      if (c.contains("level")) cmp.level = get_as<double>(c, "level", where);
      if (!(cmp.level > 0.0 && cmp.level < 1.0)) throw ConfigError("compare: level must lie in (0, 1)");
      cfg.compares.push_back(std::move(cmp));
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(j);
}

std::vector<Cell> ExperimentConfig::cells() const {
  std::vector<Cell> out;
  std::set<std::string> seen;
  for (const GridBlock& block : grid) {
    for (std::size_t n : block.ns) {
      for (const SmoothingModel& model : block.models) {
        for (const AdversarySpec& adv : block.adversaries) {
          Cell cell{n, model, adv};
          if (!seen.insert(cell.key()).second) continue;
          try {
            model.validate(n);
            make_adversary(adv, n, model);
          } catch (const ConfigError& e) {
            throw ConfigError("cell " + cell.key() + ": " + e.what());
          }
          out.push_back(std::move(cell));
        }
      }
    }
  }
  return out;
}

}  // namespace smoothflood
