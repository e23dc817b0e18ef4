// Times the serial reference runner against the OpenMP runner on one config,
// and a few inner kernels on their own.
#include <chrono>
#include <cstdio>
#include <sstream>
#include <string>

#include "smoothflood/harness.hpp"

using namespace smoothflood;

namespace {

template <class F>
double seconds(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string render(const ExperimentResult& r) {
  std::ostringstream out;
  write_summary_csv(out, r);
  write_trials_jsonl(out, r);
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : std::string(SMOOTHFLOOD_CONFIG_DIR) + "/determinism.json";
  const int workers = argc > 2 ? std::atoi(argv[2]) : default_workers();
  const ExperimentConfig cfg = load_config(path);

  ExperimentResult serial, parallel;
  const double ts = seconds([&] { serial = run_experiment_serial(cfg); });
  const double tp = seconds([&] { parallel = run_experiment(cfg, workers); });
  const std::size_t trials = serial.cells.size() * cfg.trials;
  std::printf("config %s: %zu cells, %zu trials\n", cfg.name.c_str(), serial.cells.size(), trials);
  std::printf("serial    %8.3f s  %10.1f trials/s\n", ts, static_cast<double>(trials) / ts);
  std::printf("parallel  %8.3f s  %10.1f trials/s  (%d workers, speedup %.2fx)\n", tp,
              static_cast<double>(trials) / tp, workers, ts / tp);
  const bool same = render(serial) == render(parallel);
  std::printf("outputs   %s\n", same ? "identical" : "DIFFER");

  // Kernels.
  {
    const Graph g = path_graph(1024);
    RoundRng rng(7);
    const int reps = 20000;
    const double t = seconds([&] {
      for (int i = 0; i < reps; ++i) sample_t_smoothing(g, 4, rng);
    });
    std::printf("t-smoothing n=1024 t=4      %8.2f us/draw\n", 1e6 * t / reps);
  }
  {
    SpoolingAdversary adv(2000);
    const int reps = 2000;
    const double t = seconds([&] {
      for (int i = 0; i < reps; ++i) adv.propose_round(2 + static_cast<std::size_t>(i) % 1990);
    });
    std::printf("spooling delta n=2000       %8.2f us/round\n", 1e6 * t / reps);
  }
  {
    Graph g = complete_graph(2048);
    const int reps = 200;
    double t = 0;
    for (int i = 0; i < reps; ++i) {
      VertexSet informed(2048);
      for (VertexId v = 0; v < 2048; v += 3) informed.insert(v);
      t += seconds([&] { flood_step(g, informed); });
    }
    std::printf("flood step n=2048 dense     %8.2f us/step\n", 1e6 * t / reps);
  }
  return same ? 0 : 1;
}
