#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mpdcheck/state.hpp"

namespace mpdcheck {

using StateId = std::uint32_t;

// A guarded transition, instantiated once per process id: for every pid with
// enabled(s, pid), apply(s, pid) is a successor of s.
struct TransitionRule {
  std::string name;
  std::function<bool(const SystemState&, Pid)> enabled;
  std::function<SystemState(const SystemState&, Pid)> apply;
};

struct ProtocolModel {
  std::string name;
  std::size_t process_count = 0;
  std::size_t queue_capacity = 1;
  std::vector<SystemState> initial_states;
  std::vector<TransitionRule> rules;
  // Checked on every generated state.
  std::function<bool(const SystemState&)> invariant;
  // Checked on states with no enabled (rule, pid) pair.
  std::function<bool(const SystemState&)> terminal_postcondition;
};

enum class SearchOrder { kBfs, kDfs };

struct ExploreConfig {
  SearchOrder search_order = SearchOrder::kBfs;
  std::size_t max_states = 50'000'000;
  double max_seconds = 600.0;
  // Keeps every fired transition so the state graph can be exported.
  bool record_edges = false;
};

enum class Verdict {
  kVerified,
  kInvariantViolated,
  kPostconditionViolated,
  kQueueOverflow,
  kLimitExceeded,
};

std::string_view to_string(Verdict v);

struct RunStats {
  std::uint64_t states_stored = 0;
  std::uint64_t states_matched = 0;
  std::uint64_t transitions_fired = 0;
  std::uint64_t max_frontier = 0;
  std::uint32_t max_depth = 0;
  double elapsed_seconds = 0.0;
  std::uint64_t peak_memory_estimate = 0;

  // Equality over the deterministic counters; time and memory are ignored.
  bool same_counts(const RunStats& other) const;
};

struct Edge {
  StateId from = 0;
  StateId to = 0;
  std::uint16_t rule = 0;
  Pid pid = 0;
};

// How a stored state was first generated. Initial states have no parent.
struct Provenance {
  static constexpr StateId kNoParent = 0xFFFFFFFF;
  StateId parent = kNoParent;
  std::uint16_t rule = 0;
  Pid pid = 0;
};

struct TraceStep {
  std::string rule;  // empty for the initial state
  std::optional<Pid> pid;
  SystemState state;
};

using Trace = std::vector<TraceStep>;

// Append-only store of canonical encodings, one per distinct state.
class StateStore {
 public:
  StateStore();

  std::size_t size() const { return offsets_.size() - 1; }
  std::string_view encoding(StateId id) const;

  // Returns the id of the stored copy and whether it was newly inserted.
  std::pair<StateId, bool> insert(std::string_view encoding);
  std::pair<StateId, bool> insert(std::string_view encoding, std::size_t hash);
  std::optional<StateId> find(std::string_view encoding) const;

  static std::size_t hash(std::string_view encoding);

  std::uint64_t bytes_estimate() const;

 private:
  static constexpr StateId kEmptySlot = 0xFFFFFFFF;

  void grow();

  std::string arena_;
  std::vector<std::uint64_t> offsets_;
  std::vector<std::size_t> hashes_;
  // Open addressing with linear probing; holds ids into offsets_.
  std::vector<StateId> slots_;
};

class ExplorationResult {
 public:
  Verdict verdict = Verdict::kVerified;
  RunStats stats;
  std::optional<StateId> witness;
  // Terminal states in the order the search discovered them.
  std::vector<StateId> terminal_states;
  std::vector<Edge> edges;
  bool edges_recorded = false;
  std::string diagnostic;

  std::size_t state_count() const { return store.size(); }
  SystemState state(StateId id) const;
  std::string_view encoding(StateId id) const { return store.encoding(id); }
  std::optional<StateId> find(const SystemState& s) const;
  const Provenance& provenance(StateId id) const { return provenance_.at(id); }
  std::uint32_t depth(StateId id) const { return depth_.at(id); }
  bool is_initial(StateId id) const { return provenance_.at(id).parent == Provenance::kNoParent; }

  const std::vector<std::string>& rule_names() const { return rule_names_; }

 private:
  friend class Explorer;
  friend class ParallelExplorer;

  StateStore store;
  std::vector<Provenance> provenance_;
  std::vector<std::uint32_t> depth_;
  std::vector<std::string> rule_names_;
  std::size_t queue_capacity_ = 1;
};

// Sequential reference search. Counts and traversal order are deterministic.
ExplorationResult explore(const ProtocolModel& model, const ExploreConfig& config = {});

// Level-synchronous BFS with successor generation split across OpenMP
// threads. Insertion into the visited set is merged in frontier order, so
// the result is identical to explore() with kBfs. `threads` <= 0 uses the
// OpenMP default.
ExplorationResult explore_parallel(const ProtocolModel& model, const ExploreConfig& config = {},
                                   int threads = 0);

// Path from an initial state to `target`. Throws std::out_of_range for an
// id that was never stored.
Trace reconstruct_trace(const ExplorationResult& result, StateId target);

RunStats stats_report(const ExplorationResult& result);

// Re-applies every step of `trace` against `model`. Returns an empty string
// on success, otherwise a description of the first mismatch.
std::string replay_trace(const ProtocolModel& model, const Trace& trace);

}  // namespace mpdcheck
