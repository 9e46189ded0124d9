#pragma once

#include <iosfwd>
#include <string>

#include "mpdcheck/engine.hpp"

namespace mpdcheck::report {

// Tab-separated, one header line and one row per run.
inline constexpr const char* kStatsHeader =
    "problem\tmethod-config\tmodel size\ttime (s)\tmemory (MB)\tstates stored\tstates matched";

std::string stats_row(const std::string& problem, const std::string& method, std::size_t size,
                      const RunStats& stats);

// Model description carried in trace headers so a trace can be replayed on
// its own. Keys are the RunRequest field names.
struct TraceHeader {
  std::string model;
  std::size_t size = 0;
  std::string variant;
  std::string mutation;
  std::size_t queue_capacity = 0;
  std::string verdict;
};

// One record per line: step, rule, pid, post-state rendering. Lines starting
// with '#' carry the header.
void write_trace_text(std::ostream& os, const TraceHeader& header, const Trace& trace);
void write_trace_json(std::ostream& os, const TraceHeader& header, const Trace& trace);

struct ParsedTrace {
  TraceHeader header;
  Trace trace;
};

// Accepts either format. Throws std::invalid_argument on malformed input.
ParsedTrace read_trace(std::istream& is);

// Graphviz description of the stored state graph. Throws std::logic_error if
// the run did not record edges.
void export_state_graph(const ExplorationResult& result, std::ostream& os);

}  // namespace mpdcheck::report
