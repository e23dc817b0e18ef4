#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "smoothflood/harness.hpp"
#include "smoothflood/validation.hpp"

using namespace smoothflood;

namespace {

int run_config(const std::string& path, const std::string& out, int workers, bool serial, bool sweep) {
  const ExperimentConfig cfg = load_config(path);
  const ExperimentResult result = serial ? run_experiment_serial(cfg) : run_experiment(cfg, workers);
  const std::string dir = out.empty() ? cfg.output_dir : out;
  write_outputs(result, dir, sweep);
  std::cerr << cfg.name << ": " << result.cells.size() << " cells x " << cfg.trials
            << " trials -> " << dir << "\n";
  return 0;
}

void print_criterion(const CriterionResult& c) {
  std::printf("[%02d] %s  %s (%.1fs)\n       %s\n", c.id, c.passed ? "PASS" : "FAIL", c.name.c_str(),
              c.seconds, c.detail.c_str());
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flooding on smoothed dynamic graphs"};
  app.require_subcommand(1);
  app.fallthrough();
  int workers = default_workers();
  app.add_option("--workers", workers, "OpenMP worker threads (default: SMOOTHFLOOD_WORKERS)")
      ->check(CLI::PositiveNumber);

  std::string config_path, out_dir;
  bool serial = false;
  auto* run = app.add_subcommand("run", "Run every cell of a config and write summary.csv");
  run->add_option("config", config_path, "Experiment JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (default: config output_dir)");
  run->add_flag("--serial", serial, "Use the single-threaded reference runner");

  auto* sweep = app.add_subcommand("sweep", "Run a config and also write fits.csv and compare.csv");
  sweep->add_option("config", config_path, "Experiment JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out_dir, "Output directory (default: config output_dir)");
  sweep->add_flag("--serial", serial, "Use the single-threaded reference runner");

  ValidationOptions vopts;
  std::string suite = "full", vout = "validation_out", configs = SMOOTHFLOOD_CONFIG_DIR;
  auto* validate = app.add_subcommand("validate", "Run the acceptance criteria");
  validate->add_option("--suite", suite, "Criteria subset")
      ->check(CLI::IsMember(validation_suites()));
  validate->add_option("--out", vout, "Directory for CSV outputs");
  validate->add_option("--configs", configs, "Preset directory")->check(CLI::ExistingDirectory);

  std::string adversary = "spooling", model = "k_smooth", graph = "path";
  std::size_t n = 16, round = 1;
  double k = 1.0, epsilon = 0.5, c = 2.0;
  std::optional<std::size_t> cap, spacing, period;
  std::uint64_t seed = 1;
  bool smoothed = false;
  auto* debug = app.add_subcommand("sample-debug", "Print one round's graph as an edge list");
  debug->add_option("--adversary", adversary, "Adversary kind")->required();
  debug->add_option("--round", round, "Round number (1-based)")->required()->check(CLI::PositiveNumber);
  debug->add_option("--n", n, "Vertex count");
  debug->add_option("--model", model, "k_smooth, proportional or targeted")
      ->check(CLI::IsMember({"k_smooth", "proportional", "targeted"}));
  debug->add_option("--k", k, "k for k_smooth");
  debug->add_option("--epsilon", epsilon, "epsilon for proportional or targeted");
  debug->add_option("--cap", cap, "Proportional noise cap");
  debug->add_option("--c", c, "Cassette constant");
  debug->add_option("--t", spacing, "Cassette spacing");
  debug->add_option("--period", period, "Star-recenter period");
  debug->add_option("--graph", graph, "Static graph: path, star, cycle or complete");
  debug->add_option("--seed", seed, "Experiment seed");
  debug->add_flag("--smoothed", smoothed, "Print G'_i instead of the proposal G_i");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_config(config_path, out_dir, workers, serial, false);
    if (*sweep) return run_config(config_path, out_dir, workers, serial, true);
    if (*validate) {
      vopts.suite = suite;
      vopts.out_dir = vout;
      vopts.config_dir = configs;
      vopts.workers = workers;
      vopts.progress = print_criterion;
      const auto results = run_validation(vopts);
      std::size_t failed = 0;
      for (const auto& r : results) failed += r.passed ? 0 : 1;
      std::printf("%zu/%zu criteria passed\n", results.size() - failed, results.size());
      return failed == 0 ? 0 : 1;
    }
    if (*debug) {
      SmoothingModel m = model == "k_smooth"       ? SmoothingModel::k_smooth(k)
                         : model == "proportional" ? SmoothingModel::proportional(epsilon, cap)
                                                   : SmoothingModel::targeted(epsilon);
      AdversarySpec spec;
      spec.kind = adversary;
      spec.c = c;
      spec.t = spacing;
      spec.period = period;
      spec.graph = graph;
      m.validate(n);
      auto adv = make_adversary(spec, n, m);
      std::optional<Graph> captured;
      RunOptions opts;
      opts.max_rounds = round;
      if (smoothed) {
        opts.observer.on_round = [&](std::size_t i, const Graph& g, const VertexSet&) {
          if (i == round) captured = g;
        };
      } else {
        opts.observer.on_proposal = [&](std::size_t i, const Graph& g, const EdgeDelta&) {
          if (i == round) captured = g;
        };
      }
      run_trial(*adv, m, RngLineage{seed, 0, 0, StreamTag::kNoise}, opts);
      if (!captured) {
        std::cerr << "flooding finished before round " << round << "\n";
        return 1;
      }
      write_edge_list(std::cout, *captured);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
