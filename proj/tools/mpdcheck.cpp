#include <iostream>

#include "CLI11.hpp"
#include "mpdcheck/cli.hpp"

int main(int argc, char** argv) {
  using namespace mpdcheck;

  CLI::App app{"Explicit-state model checker for the MPD ring and barrier protocols"};
  app.require_subcommand(1);

  cli::RunRequest request;
  std::size_t queue_capacity = 0;
  auto* run = app.add_subcommand("run", "Explore a protocol model and report the verdict");
  run->add_option("--model", request.model, "barrier or ring")->capture_default_str();
  run->add_option("--size", request.size, "Number of processes")->capture_default_str();
  run->add_option("--variant", request.variant,
                  "barrier: leader_last|leader_first; ring: ordered|unordered");
  run->add_option("--search", request.search, "bfs or dfs")->capture_default_str();
  run->add_option("--max-states", request.max_states)->capture_default_str();
  run->add_option("--max-seconds", request.max_seconds)->capture_default_str();
  run->add_option("--queue-capacity", queue_capacity, "Per-process queue bound (default size + 2)");
  run->add_option("--mutation", request.mutation, "Seeded bug: release_on_barrier_in");
  run->add_option("--threads", request.threads, "OpenMP threads for BFS; 0 runs sequentially")
      ->capture_default_str();
  run->add_option("--trace", request.trace_path, "Counterexample trace (text; JSON at <path>.json)");
  run->add_option("--graph", request.graph_path, "Graphviz export of the state graph");
  run->add_option("--stats", request.stats_path, "Tab-separated statistics row");

  std::string trace_path;
  auto* replay = app.add_subcommand("replay", "Re-check a trace file step by step");
  replay->add_option("trace", trace_path, "Trace file (text or JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitUsage;
  }

  if (*run) {
    if (run->count("--queue-capacity") > 0) request.queue_capacity = queue_capacity;
    return cli::run(request, std::cout, std::cerr);
  }
  return cli::verify_trace(trace_path, std::cout, std::cerr);
}
