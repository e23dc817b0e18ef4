#include "smoothflood/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <ostream>

namespace smoothflood {

namespace {

std::string f6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct Task {
  std::size_t cell;
  std::size_t trial;
};

struct Prepared {
  std::vector<Cell> cells;
  std::vector<std::size_t> caps;
  std::vector<Task> tasks;
};

Prepared prepare(const ExperimentConfig& config) {
  Prepared p;
  p.cells = config.cells();
  for (const Cell& c : p.cells) p.caps.push_back(config.max_rounds.value_or(4 * c.n));
  for (std::size_t c = 0; c < p.cells.size(); ++c) {
    for (std::size_t t = 0; t < config.trials; ++t) p.tasks.push_back({c, t});
  }
  return p;
}

TrialRecord run_one(const ExperimentConfig& config, const Prepared& p, const Task& task) {
  const Cell& cell = p.cells[task.cell];
  auto adversary = make_adversary(cell.adversary, cell.n, cell.model);
  RngLineage lineage;
  lineage.experiment_seed = trial_seed(config.base_seed, cell.key(), task.trial);
  lineage.trial = task.trial;
  RunOptions opts;
  opts.max_rounds = p.caps[task.cell];
  opts.keep_rounds = config.trace == TraceLevel::kRounds;
  // Built-in constructions are connected by design and covered by unit tests.
  opts.verify_proposals = false;
  return run_trial(*adversary, cell.model, lineage, opts);
}

ExperimentResult assemble(const ExperimentConfig& config, Prepared&& p,
                          std::vector<TrialRecord>&& records) {
  ExperimentResult result;
  result.config = config;
  for (std::size_t c = 0; c < p.cells.size(); ++c) {
    CellResult cr;
    cr.cell = p.cells[c];
    cr.round_cap = p.caps[c];
    for (std::size_t t = 0; t < config.trials; ++t) {
      cr.trials.push_back(std::move(records[c * config.trials + t]));
    }
    cr.summary = summarize(cr.trials, cr.round_cap);
    result.cells.push_back(std::move(cr));
  }
  return result;
}

}  // namespace

std::vector<double> CellResult::flooding_times() const {
  std::vector<double> out;
  out.reserve(trials.size());
  for (const TrialRecord& r : trials) {
    out.push_back(static_cast<double>(r.flooding_time.value_or(round_cap)));
  }
  return out;
}

std::uint64_t trial_seed(std::uint64_t base_seed, const std::string& cell_key, std::size_t trial) {
  return hash_combine(hash_combine(base_seed, stable_hash(cell_key)), trial);
}

CellSummary summarize(const std::vector<TrialRecord>& trials, std::size_t round_cap) {
  CellSummary s;
  s.trials = trials.size();
  if (trials.empty()) return s;
  std::vector<double> ft;
  std::size_t capped = 0, noise = 0, rounds = 0, rejections = 0;
  for (const TrialRecord& r : trials) {
    ft.push_back(static_cast<double>(r.flooding_time.value_or(round_cap)));
    capped += r.flooding_time ? 0 : 1;
    noise += r.total_noise;
    rounds += r.rounds_run;
    rejections += r.total_rejections;
  }
  s.ft_min = *std::min_element(ft.begin(), ft.end());
  s.ft_max = *std::max_element(ft.begin(), ft.end());
  s.ft_median = median(ft);
  s.ft_mean = mean(ft);
  s.ft_p90 = quantile(ft, 0.9);
  s.capped_fraction = static_cast<double>(capped) / static_cast<double>(trials.size());
  s.mean_noise_per_round = rounds ? static_cast<double>(noise) / static_cast<double>(rounds) : 0.0;
  s.mean_rejections = static_cast<double>(rejections) / static_cast<double>(trials.size());
  return s;
}

int default_workers() {
  if (const char* env = std::getenv("SMOOTHFLOOD_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  return omp_get_max_threads();
}

ExperimentResult run_experiment(const ExperimentConfig& config, int workers) {
  Prepared p = prepare(config);
  std::vector<TrialRecord> records(p.tasks.size());
  std::exception_ptr failure;
  std::size_t failed_at = p.tasks.size();
  const auto count = static_cast<std::int64_t>(p.tasks.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, workers))
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      records[i] = run_one(config, p, p.tasks[i]);
    } catch (...) {
#pragma omp critical(smoothflood_failure)
      {
        // Report the lowest failing task so the error does not depend on scheduling.
        if (static_cast<std::size_t>(i) < failed_at) {
          failed_at = static_cast<std::size_t>(i);
          failure = std::current_exception();
        }
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  return assemble(config, std::move(p), std::move(records));
}

ExperimentResult run_experiment_serial(const ExperimentConfig& config) {
  Prepared p = prepare(config);
  std::vector<TrialRecord> records;
  records.reserve(p.tasks.size());
  for (const Task& task : p.tasks) records.push_back(run_one(config, p, task));
  return assemble(config, std::move(p), std::move(records));
}

std::vector<FitRow> compute_fits(const ExperimentResult& result) {
  std::vector<FitRow> rows;
  for (const FitSpec& spec : result.config.fits) {
    FitRow row;
    row.spec = spec;
    for (const CellResult& cr : result.cells) {
      const Cell& c = cr.cell;
      if (spec.adversary && c.adversary.label() != *spec.adversary) continue;
      if (spec.model && c.model.kind_name() != *spec.model) continue;
      if (spec.n && c.n != *spec.n) continue;
      if (spec.param && std::abs(c.model.parameter() - *spec.param) > 1e-9) continue;
      const double x = spec.axis == "n" ? static_cast<double>(c.n) : c.model.parameter();
      if (spec.min && x < *spec.min - 1e-12) continue;
      if (spec.max && x > *spec.max + 1e-12) continue;
      // A censored median carries no scaling information.
      if (cr.summary.capped_fraction >= 0.5) {
        ++row.excluded;
        continue;
      }
      row.x.push_back(x);
      row.y.push_back(cr.summary.ft_median);
    }
    try {
      row.fit = fit_power_law(row.x, row.y);
      row.ok = true;
    } catch (const UsageError& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CompareRow> compute_compares(const ExperimentResult& result) {
  std::vector<CompareRow> rows;
  for (const CompareSpec& spec : result.config.compares) {
    for (const CellResult& num : result.cells) {
      if (num.cell.adversary.label() != spec.numerator) continue;
      for (const CellResult& den : result.cells) {
        if (den.cell.adversary.label() != spec.denominator) continue;
        if (den.cell.n != num.cell.n || den.cell.model.label() != num.cell.model.label()) continue;
        CompareRow row;
        row.name = spec.name;
        row.n = num.cell.n;
        row.model = num.cell.model.label();
        row.numerator = spec.numerator;
        row.denominator = spec.denominator;
        const std::vector<double> a = num.flooding_times();
        const std::vector<double> b = den.flooding_times();
        row.median_numerator = median(a);
        row.median_denominator = median(b);
        RngLineage lineage;
        lineage.experiment_seed = result.config.base_seed;
        lineage.trial = stable_hash(spec.name + "|" + num.cell.key());
        lineage.tag = StreamTag::kBootstrap;
        RoundRng rng(lineage);
        row.interval = bootstrap_median_ratio(a, b, spec.resamples, spec.level, rng);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

void write_summary_csv(std::ostream& out, const ExperimentResult& result) {
  out << "# smoothflood summary v1\n";
  out << "cell,n,model,model_param,adversary,trials,ft_min,ft_median,ft_mean,ft_p90,ft_max,"
         "capped_fraction,mean_noise_per_round,mean_rejections\n";
  for (const CellResult& cr : result.cells) {
    const CellSummary& s = cr.summary;
    out << csv_field(cr.cell.key()) << ',' << cr.cell.n << ',' << cr.cell.model.kind_name() << ','
        << f6(cr.cell.model.parameter()) << ',' << csv_field(cr.cell.adversary.label()) << ','
        << s.trials << ',' << f6(s.ft_min) << ',' << f6(s.ft_median) << ',' << f6(s.ft_mean) << ','
        << f6(s.ft_p90) << ',' << f6(s.ft_max) << ',' << f6(s.capped_fraction) << ','
        << f6(s.mean_noise_per_round) << ',' << f6(s.mean_rejections) << '\n';
  }
}

void write_trials_jsonl(std::ostream& out, const ExperimentResult& result) {
  for (const CellResult& cr : result.cells) {
    for (std::size_t t = 0; t < cr.trials.size(); ++t) {
      nlohmann::json j = to_json(cr.trials[t]);
      j["cell"] = cr.cell.key();
      j["trial"] = t;
      j["seed"] = trial_seed(result.config.base_seed, cr.cell.key(), t);
      j["round_cap"] = cr.round_cap;
      out << j.dump() << '\n';
    }
  }
}

void write_fits_csv(std::ostream& out, const std::vector<FitRow>& fits) {
  out << "fit,axis,points,excluded,slope,slope_stderr,intercept,x,residuals,status\n";
  for (const FitRow& row : fits) {
    std::string xs, rs;
    for (std::size_t i = 0; i < row.x.size(); ++i) {
      xs += (i ? ";" : "") + f6(row.x[i]);
      if (row.ok) rs += (i ? ";" : "") + f6(row.fit.residuals[i]);
    }
    out << csv_field(row.spec.name) << ',' << row.spec.axis << ',' << row.x.size() << ','
        << row.excluded << ',' << (row.ok ? f6(row.fit.slope) : "") << ','
        << (row.ok ? f6(row.fit.slope_stderr) : "") << ',' << (row.ok ? f6(row.fit.intercept) : "")
        << ',' << xs << ',' << rs << ',' << csv_field(row.ok ? "ok" : row.error) << '\n';
  }
}

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
  out << "compare,n,model,numerator,denominator,median_numerator,median_denominator,ratio,ci_lower,"
         "ci_upper\n";
  for (const CompareRow& r : rows) {
    out << csv_field(r.name) << ',' << r.n << ',' << csv_field(r.model) << ','
        << csv_field(r.numerator) << ',' << csv_field(r.denominator) << ','
        << f6(r.median_numerator) << ',' << f6(r.median_denominator) << ',' << f6(r.interval.ratio)
        << ',' << f6(r.interval.lower) << ',' << f6(r.interval.upper) << '\n';
  }
}

void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir, bool sweep) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("summary.csv");
    write_summary_csv(f, result);
  }
  if (result.config.trace != TraceLevel::kNone) {
    auto f = open("trials.jsonl");
    write_trials_jsonl(f, result);
  }
  if (sweep) {
    auto f = open("fits.csv");
    write_fits_csv(f, compute_fits(result));
    auto g = open("compare.csv");
    write_compare_csv(g, compute_compares(result));
  }
}

}  // namespace smoothflood
