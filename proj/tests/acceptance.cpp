// One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.
#include <cstdio>

#include "smoothflood/harness.hpp"
#include "smoothflood/validation.hpp"

int main() {
  smoothflood::ValidationOptions opts;
  opts.suite = "full";
  opts.workers = smoothflood::default_workers();
  opts.progress = [](const smoothflood::CriterionResult& c) {
    std::printf("%s criterion %02d: %s -- %s [%.1fs]\n", c.passed ? "PASS" : "FAIL", c.id,
                c.name.c_str(), c.detail.c_str(), c.seconds);
    std::fflush(stdout);
  };
  const auto results = smoothflood::run_validation(opts);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::printf("%d of %zu criteria failed\n", failed, results.size());
  return failed == 0 ? 0 : 1;
}
