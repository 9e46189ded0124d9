// Times the sequential explorer against the OpenMP level-synchronous one on
// the same models and checks that both store the same number of states.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <omp.h>

#include "mpdcheck/barrier.hpp"
#include "mpdcheck/ring.hpp"

using namespace mpdcheck;

namespace {

struct Case {
  std::string label;
  ProtocolModel model;
};

template <typename F>
double time_it(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  const int threads = argc > 1 ? std::atoi(argv[1]) : omp_get_max_threads();
  const std::vector<Case> cases = {
      {"barrier n=12", barrier::make_model({.n = 12})},
      {"barrier n=14 leader_first", barrier::make_model({.n = 14, .variant = barrier::Variant::kLeaderFirst})},
      {"ordered ring n=9", ring::make_model({.n = 9, .variant = ring::Variant::kOrdered})},
      {"unordered ring n=5", ring::make_model({.n = 5, .variant = ring::Variant::kUnordered})},
  };

  std::printf("%-28s %12s %10s %10s %8s\n", "model", "states", "serial s", "omp s", "speedup");
  int status = 0;
  for (const auto& c : cases) {
    ExplorationResult serial, parallel;
    const double ts = time_it([&] { serial = explore(c.model); });
    const double tp = time_it([&] { parallel = explore_parallel(c.model, {}, threads); });
    if (!serial.stats.same_counts(parallel.stats)) {
      std::fprintf(stderr, "%s: parallel run disagrees with the sequential run\n", c.label.c_str());
      status = 1;
    }
    std::printf("%-28s %12llu %10.3f %10.3f %8.2f\n", c.label.c_str(),
                static_cast<unsigned long long>(serial.stats.states_stored), ts, tp, ts / tp);
  }
  std::printf("threads: %d\n", threads);
  return status;
}
