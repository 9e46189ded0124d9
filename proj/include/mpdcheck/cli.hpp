#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "mpdcheck/engine.hpp"

namespace mpdcheck::cli {

enum ExitStatus : int {
  kExitVerified = 0,
  kExitViolation = 1,
  kExitLimit = 2,
  kExitUsage = 3,
};

int exit_status(Verdict v);

struct RunRequest {
  std::string model = "barrier";  // barrier | ring
  std::size_t size = 3;
  std::string variant;  // empty selects the model default
  std::string search = "bfs";
  std::size_t max_states = 50'000'000;
  double max_seconds = 600.0;
  std::optional<std::size_t> queue_capacity;
  std::string mutation;  // empty or release_on_barrier_in
  int threads = 0;       // 0 runs the sequential explorer
  std::string trace_path;
  std::string graph_path;
  std::string stats_path;
};

// Throws std::invalid_argument describing the first invalid field.
void validate(const RunRequest& request);
ProtocolModel build_model(const RunRequest& request);

// Table-1 style labels for the stats file.
std::string problem_label(const RunRequest& request);
std::string method_label(const RunRequest& request);

// Runs the request end to end. Human-readable progress goes to `out`,
// failures to `err`.
int run(const RunRequest& request, std::ostream& out, std::ostream& err);

// Reads a trace written by run() (text or JSON), rebuilds its model and
// replays every step. Returns 0 when the replay matches, 1 on a mismatch,
// 3 when the file cannot be read.
int verify_trace(const std::string& path, std::ostream& out, std::ostream& err);

}  // namespace mpdcheck::cli
