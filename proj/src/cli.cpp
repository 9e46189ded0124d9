#include "mpdcheck/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "mpdcheck/barrier.hpp"
#include "mpdcheck/report.hpp"
#include "mpdcheck/ring.hpp"

namespace mpdcheck::cli {

namespace {

std::string effective_variant(const RunRequest& r) {
  if (!r.variant.empty()) return r.variant;
  return r.model == "ring" ? "ordered" : "leader_last";
}

report::TraceHeader trace_header(const RunRequest& r, std::size_t capacity, Verdict verdict) {
  return {r.model, r.size, effective_variant(r), r.mutation, capacity, std::string(to_string(verdict))};
}

// Opens in append mode so probing never truncates an existing file.
bool writable(const std::string& path) {
  if (path.empty()) return true;
  std::ofstream probe(path, std::ios::app);
  return probe.good();
}

bool write_file(const std::string& path, const std::string& contents, std::ostream& err) {
  std::ofstream os(path, std::ios::trunc);
  os << contents;
  if (!os) {
    err << "error: cannot write " << path << '\n';
    return false;
  }
  return true;
}

}  // namespace

int exit_status(Verdict v) {
  switch (v) {
    case Verdict::kVerified: return kExitVerified;
    case Verdict::kInvariantViolated:
    case Verdict::kPostconditionViolated: return kExitViolation;
    case Verdict::kQueueOverflow:
    case Verdict::kLimitExceeded: return kExitLimit;
  }
  return kExitUsage;
}

void validate(const RunRequest& r) {
  if (r.model != "barrier" && r.model != "ring")
    throw std::invalid_argument("unknown model '" + r.model + "' (expected barrier or ring)");
  if (r.size < 1) throw std::invalid_argument("size must be at least 1");
  if (r.size > kMaxProcesses) throw std::invalid_argument("size too large");
  const std::string variant = effective_variant(r);
  if (r.model == "barrier" && variant != "leader_last" && variant != "leader_first")
    throw std::invalid_argument("barrier variant must be leader_last or leader_first");
  if (r.model == "ring" && variant != "ordered" && variant != "unordered")
    throw std::invalid_argument("ring variant must be ordered or unordered");
  if (r.search != "bfs" && r.search != "dfs") throw std::invalid_argument("search must be bfs or dfs");
  if (!r.mutation.empty() && !(r.model == "barrier" && r.mutation == "release_on_barrier_in"))
    throw std::invalid_argument("unknown mutation '" + r.mutation + "' for model " + r.model);
  if (r.max_states == 0) throw std::invalid_argument("max-states must be positive");
  if (!(r.max_seconds > 0)) throw std::invalid_argument("max-seconds must be positive");
  if (r.queue_capacity && *r.queue_capacity == 0) throw std::invalid_argument("queue capacity must be positive");
  if (r.threads < 0) throw std::invalid_argument("threads must be non-negative");
  if (r.threads > 0 && r.search != "bfs") throw std::invalid_argument("parallel exploration requires bfs");
}

ProtocolModel build_model(const RunRequest& r) {
  validate(r);
  const std::string variant = effective_variant(r);
  if (r.model == "barrier") {
    barrier::Config cfg;
    cfg.n = r.size;
    cfg.variant = variant == "leader_first" ? barrier::Variant::kLeaderFirst : barrier::Variant::kLeaderLast;
    cfg.mutation = r.mutation.empty() ? barrier::Mutation::kNone : barrier::Mutation::kReleaseOnBarrierIn;
    cfg.queue_capacity = r.queue_capacity;
    return barrier::make_model(cfg);
  }
  ring::Config cfg;
  cfg.n = r.size;
  cfg.variant = variant == "unordered" ? ring::Variant::kUnordered : ring::Variant::kOrdered;
  cfg.queue_capacity = r.queue_capacity;
  return ring::make_model(cfg);
}

std::string problem_label(const RunRequest& r) {
  if (r.model == "barrier") return "barrier";
  return effective_variant(r) + " ring";
}

std::string method_label(const RunRequest& r) {
  std::string label = r.search + "," + effective_variant(r);
  if (r.threads > 0) label += ",omp" + std::to_string(r.threads);
  if (!r.mutation.empty()) label += "," + r.mutation;
  return label;
}

int run(const RunRequest& r, std::ostream& out, std::ostream& err) {
  ProtocolModel model;
  try {
    model = build_model(r);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  for (const std::string* path : {&r.trace_path, &r.graph_path, &r.stats_path}) {
    if (!writable(*path)) {
      err << "error: output path is not writable: " << *path << '\n';
      return kExitUsage;
    }
  }
  if (!r.trace_path.empty() && !writable(r.trace_path + ".json")) {
    err << "error: output path is not writable: " << r.trace_path << ".json\n";
    return kExitUsage;
  }

  ExploreConfig config;
  config.search_order = r.search == "dfs" ? SearchOrder::kDfs : SearchOrder::kBfs;
  config.max_states = r.max_states;
  config.max_seconds = r.max_seconds;
  config.record_edges = !r.graph_path.empty();

  ExplorationResult result;
  try {
    result = r.threads > 0 ? explore_parallel(model, config, r.threads) : explore(model, config);
  } catch (const std::exception& e) {
    err << "error: exploration aborted: " << e.what() << '\n';
    return kExitUsage;
  }

  const RunStats stats = stats_report(result);
  const std::string row = report::stats_row(problem_label(r), method_label(r), r.size, stats);
  out << "verdict: " << to_string(result.verdict) << '\n';
  if (!result.diagnostic.empty()) out << "detail: " << result.diagnostic << '\n';
  out << "terminal states: " << result.terminal_states.size() << '\n';
  out << "transitions fired: " << stats.transitions_fired << ", max frontier: " << stats.max_frontier
      << ", max depth: " << stats.max_depth << '\n';
  out << report::kStatsHeader << '\n' << row << '\n';

  Trace trace;
  if (result.witness) {
    trace = reconstruct_trace(result, *result.witness);
    out << "path to state " << *result.witness << " (" << trace.size() - 1 << " steps):\n";
    report::write_trace_text(out, trace_header(r, model.queue_capacity, result.verdict), trace);
  }

  if (!r.stats_path.empty() &&
      !write_file(r.stats_path, std::string(report::kStatsHeader) + "\n" + row + "\n", err)) {
    return kExitUsage;
  }
  if (!r.trace_path.empty()) {
    const auto header = trace_header(r, model.queue_capacity, result.verdict);
    std::ostringstream text;
    std::ostringstream json;
    report::write_trace_text(text, header, trace);
    report::write_trace_json(json, header, trace);
    if (!write_file(r.trace_path, text.str(), err) || !write_file(r.trace_path + ".json", json.str(), err))
      return kExitUsage;
  }
  if (!r.graph_path.empty()) {
    std::ostringstream dot;
    report::export_state_graph(result, dot);
    if (!write_file(r.graph_path, dot.str(), err)) return kExitUsage;
  }
  return exit_status(result.verdict);
}

int verify_trace(const std::string& path, std::ostream& out, std::ostream& err) {
  std::ifstream is(path);
  if (!is) {
    err << "error: cannot read " << path << '\n';
    return kExitUsage;
  }
  report::ParsedTrace parsed;
  ProtocolModel model;
  try {
    parsed = report::read_trace(is);
    RunRequest r;
    r.model = parsed.header.model;
    r.size = parsed.header.size;
    r.variant = parsed.header.variant;
    r.mutation = parsed.header.mutation;
    r.queue_capacity = parsed.header.queue_capacity;
    model = build_model(r);
  } catch (const std::exception& e) {
    err << "error: " << path << ": " << e.what() << '\n';
    return kExitUsage;
  }
  const std::string problem = replay_trace(model, parsed.trace);
  if (!problem.empty()) {
    out << "replay failed: " << problem << '\n';
    return kExitViolation;
  }
  out << "replay ok: " << parsed.trace.size() << " states, final state "
      << render(parsed.trace.back().state) << '\n';
  return kExitVerified;
}

}  // namespace mpdcheck::cli
