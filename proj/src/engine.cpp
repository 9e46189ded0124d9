#include "mpdcheck/engine.hpp"

#include <deque>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mpdcheck {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Successors of one state, in rule declaration order x ascending pid.
struct Successor {
  std::string encoding;
  std::size_t hash = 0;
  std::uint16_t rule = 0;
  Pid pid = 0;
  bool invariant_holds = true;
};

struct Expansion {
  std::vector<Successor> successors;
  bool terminal = true;
  // Set when a rule overflowed a queue; successors holds what fired before it.
  std::optional<std::string> overflow;
};

void expand(const ProtocolModel& model, const SystemState& s, bool check_invariant, Expansion& out) {
  out.successors.clear();
  out.terminal = true;
  out.overflow.reset();
  const auto n = static_cast<Pid>(model.process_count);
  for (std::size_t r = 0; r < model.rules.size(); ++r) {
    const TransitionRule& rule = model.rules[r];
    for (Pid pid = 0; pid < n; ++pid) {
      if (!rule.enabled(s, pid)) continue;
      out.terminal = false;
      SystemState next;
      try {
        next = rule.apply(s, pid);
      } catch (const QueueOverflow& e) {
        out.overflow = rule.name + " at pid " + std::to_string(pid) + ": " + e.what();
        return;
      }
      Successor succ;
      canonical_encode_into(next, succ.encoding);
      succ.hash = StateStore::hash(succ.encoding);
      succ.rule = static_cast<std::uint16_t>(r);
      succ.pid = pid;
      if (check_invariant) succ.invariant_holds = model.invariant(next);
      out.successors.push_back(std::move(succ));
    }
  }
}

void validate(const ProtocolModel& model, const ExploreConfig& config) {
  if (model.process_count == 0 || model.process_count > kMaxProcesses)
    throw std::invalid_argument("model process count out of range");
  if (model.initial_states.empty()) throw std::invalid_argument("model has no initial state");
  if (model.rules.size() > 0xFFFF) throw std::invalid_argument("too many rules");
  if (!model.invariant || !model.terminal_postcondition)
    throw std::invalid_argument("model is missing its invariant or postcondition");
  for (const auto& rule : model.rules) {
    if (!rule.enabled || !rule.apply) throw std::invalid_argument("rule " + rule.name + " is incomplete");
  }
  for (const auto& s : model.initial_states) {
    if (s.size() != model.process_count)
      throw std::invalid_argument("initial state has the wrong process count");
  }
  if (config.max_states == 0 || config.max_seconds <= 0)
    throw std::invalid_argument("exploration limits must be positive");
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kVerified: return "verified";
    case Verdict::kInvariantViolated: return "invariant_violated";
    case Verdict::kPostconditionViolated: return "postcondition_violated";
    case Verdict::kQueueOverflow: return "queue_overflow";
    case Verdict::kLimitExceeded: return "limit_exceeded";
  }
  return "?";
}

bool RunStats::same_counts(const RunStats& o) const {
  return states_stored == o.states_stored && states_matched == o.states_matched &&
         transitions_fired == o.transitions_fired && max_frontier == o.max_frontier &&
         max_depth == o.max_depth;
}

// --- StateStore -------------------------------------------------------------

StateStore::StateStore() : offsets_{0}, slots_(1024, kEmptySlot) {}

std::size_t StateStore::hash(std::string_view encoding) {
  return std::hash<std::string_view>{}(encoding);
}

std::string_view StateStore::encoding(StateId id) const {
  if (id >= size()) throw std::out_of_range("unknown state id " + std::to_string(id));
  return std::string_view(arena_).substr(offsets_[id], offsets_[id + 1] - offsets_[id]);
}

void StateStore::grow() {
  std::vector<StateId> slots(slots_.size() * 2, kEmptySlot);
  const std::size_t mask = slots.size() - 1;
  for (StateId id = 0; id < size(); ++id) {
    std::size_t i = hashes_[id] & mask;
    while (slots[i] != kEmptySlot) i = (i + 1) & mask;
    slots[i] = id;
  }
  slots_ = std::move(slots);
}

std::pair<StateId, bool> StateStore::insert(std::string_view encoding) {
  return insert(encoding, hash(encoding));
}

std::pair<StateId, bool> StateStore::insert(std::string_view enc, std::size_t h) {
  const std::size_t mask = slots_.size() - 1;
  std::size_t i = h & mask;
  while (slots_[i] != kEmptySlot) {
    const StateId id = slots_[i];
    if (hashes_[id] == h && encoding(id) == enc) return {id, false};
    i = (i + 1) & mask;
  }
  if (size() >= kEmptySlot - 1) throw std::length_error("state store is full");
  const auto id = static_cast<StateId>(size());
  arena_.append(enc);
  offsets_.push_back(arena_.size());
  hashes_.push_back(h);
  slots_[i] = id;
  if (size() * 2 > slots_.size()) grow();
  return {id, true};
}

std::optional<StateId> StateStore::find(std::string_view enc) const {
  const std::size_t h = hash(enc);
  const std::size_t mask = slots_.size() - 1;
  for (std::size_t i = h & mask; slots_[i] != kEmptySlot; i = (i + 1) & mask) {
    const StateId id = slots_[i];
    if (hashes_[id] == h && encoding(id) == enc) return id;
  }
  return std::nullopt;
}

std::uint64_t StateStore::bytes_estimate() const {
  return arena_.size() + offsets_.size() * sizeof(std::uint64_t) +
         hashes_.size() * sizeof(std::size_t) + slots_.size() * sizeof(StateId);
}

// --- ExplorationResult -------------------------------------------------------

SystemState ExplorationResult::state(StateId id) const {
  return canonical_decode(store.encoding(id), queue_capacity_);
}

std::optional<StateId> ExplorationResult::find(const SystemState& s) const {
  return store.find(canonical_encode(s));
}

// --- search -----------------------------------------------------------------

class Explorer {
 public:
  Explorer(const ProtocolModel& model, const ExploreConfig& config)
      : model_(model), config_(config), start_(Clock::now()) {
    validate(model, config);
    r_.queue_capacity_ = model.queue_capacity;
    r_.edges_recorded = config.record_edges;
    for (const auto& rule : model.rules) r_.rule_names_.push_back(rule.name);
  }

  // Stores the initial states. Returns false if one violates the invariant.
  bool seed(std::vector<StateId>& frontier) {
    for (const SystemState& s : model_.initial_states) {
      const auto [id, fresh] = r_.store.insert(canonical_encode(s));
      if (!fresh) throw std::invalid_argument("duplicate initial state");
      r_.provenance_.push_back({});
      r_.depth_.push_back(0);
      frontier.push_back(id);
      if (!model_.invariant(s)) {
        fail(Verdict::kInvariantViolated, id, "invariant violated by an initial state");
        return false;
      }
    }
    r_.stats.max_frontier = frontier.size();
    return true;
  }

  // Folds one expansion of `from` into the store. Newly stored ids are
  // appended to `frontier`. Returns false when the search must stop.
  bool merge(StateId from, const Expansion& e, std::vector<StateId>& frontier) {
    const std::uint32_t depth = r_.depth_[from] + 1;
    for (const Successor& succ : e.successors) {
      ++r_.stats.transitions_fired;
      const auto [id, fresh] = r_.store.insert(succ.encoding, succ.hash);
      if (config_.record_edges) r_.edges.push_back({from, id, succ.rule, succ.pid});
      if (!fresh) {
        ++r_.stats.states_matched;
        continue;
      }
      r_.provenance_.push_back({from, succ.rule, succ.pid});
      r_.depth_.push_back(depth);
      if (depth > r_.stats.max_depth) r_.stats.max_depth = depth;
      frontier.push_back(id);
      if (!succ.invariant_holds) {
        fail(Verdict::kInvariantViolated, id,
             "invariant violated after " + model_.rules[succ.rule].name + " at pid " +
                 std::to_string(succ.pid));
        return false;
      }
    }
    if (e.overflow) {
      fail(Verdict::kQueueOverflow, from, *e.overflow);
      return false;
    }
    if (e.terminal) r_.terminal_states.push_back(from);
    return true;
  }

  bool within_limits() {
    if (r_.store.size() > config_.max_states) {
      fail(Verdict::kLimitExceeded, std::nullopt,
           "state limit of " + std::to_string(config_.max_states) + " exceeded");
      return false;
    }
    if ((++limit_checks_ & 0x3FF) == 0 && seconds_since(start_) > config_.max_seconds) {
      fail(Verdict::kLimitExceeded, std::nullopt, "time limit exceeded");
      return false;
    }
    return true;
  }

  void note_frontier(std::size_t size) {
    if (size > r_.stats.max_frontier) r_.stats.max_frontier = size;
  }

  void check_terminals() {
    for (StateId id : r_.terminal_states) {
      if (!model_.terminal_postcondition(r_.state(id))) {
        fail(Verdict::kPostconditionViolated, id, "terminal state violates the postcondition");
        return;
      }
    }
  }

  ExplorationResult finish() {
    r_.stats.states_stored = r_.store.size();
    r_.stats.elapsed_seconds = seconds_since(start_);
    r_.stats.peak_memory_estimate =
        r_.store.bytes_estimate() +
        r_.provenance_.size() * (sizeof(Provenance) + sizeof(std::uint32_t)) +
        r_.edges.size() * sizeof(Edge) + peak_frontier_bytes_;
    return std::move(r_);
  }

  void fail(Verdict v, std::optional<StateId> witness, std::string diagnostic) {
    r_.verdict = v;
    r_.witness = witness;
    r_.diagnostic = std::move(diagnostic);
  }

  void note_frontier_bytes(std::size_t bytes) {
    if (bytes > peak_frontier_bytes_) peak_frontier_bytes_ = bytes;
  }

  const ProtocolModel& model() const { return model_; }
  const ExplorationResult& result() const { return r_; }

 private:
  const ProtocolModel& model_;
  const ExploreConfig& config_;
  Clock::time_point start_;
  ExplorationResult r_;
  std::uint64_t limit_checks_ = 0;
  std::size_t peak_frontier_bytes_ = 0;
};

ExplorationResult explore(const ProtocolModel& model, const ExploreConfig& config) {
  Explorer ex(model, config);
  std::vector<StateId> seeded;
  if (!ex.seed(seeded)) return ex.finish();

  const bool dfs = config.search_order == SearchOrder::kDfs;
  std::deque<StateId> frontier(seeded.begin(), seeded.end());
  std::vector<StateId> fresh;
  Expansion e;
  while (!frontier.empty()) {
    if (!ex.within_limits()) return ex.finish();
    StateId id;
    if (dfs) {
      id = frontier.back();
      frontier.pop_back();
    } else {
      id = frontier.front();
      frontier.pop_front();
    }
    expand(model, ex.result().state(id), true, e);
    fresh.clear();
    const bool keep_going = ex.merge(id, e, fresh);
    // DFS pushes in reverse so the first generated successor is expanded next.
    if (dfs) {
      frontier.insert(frontier.end(), fresh.rbegin(), fresh.rend());
    } else {
      frontier.insert(frontier.end(), fresh.begin(), fresh.end());
    }
    ex.note_frontier(frontier.size());
    ex.note_frontier_bytes(frontier.size() * sizeof(StateId));
    if (!keep_going) return ex.finish();
  }
  ex.check_terminals();
  return ex.finish();
}

ExplorationResult explore_parallel(const ProtocolModel& model, const ExploreConfig& config,
                                   int threads) {
  if (config.search_order != SearchOrder::kBfs)
    throw std::invalid_argument("parallel exploration supports BFS only");
  Explorer ex(model, config);
  std::vector<StateId> level;
  if (!ex.seed(level)) return ex.finish();

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif

  std::vector<Expansion> expansions;
  std::vector<StateId> next;
  while (!level.empty()) {
    const auto count = static_cast<std::ptrdiff_t>(level.size());
    expansions.resize(level.size());
    std::string error;

    const ExplorationResult& stored = ex.result();
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      try {
        expand(model, stored.state(level[i]), true, expansions[i]);
      } catch (const std::exception& err) {
#pragma omp critical(mpdcheck_expand_error)
        if (error.empty()) error = err.what();
      }
    }
    if (!error.empty()) throw std::logic_error(error);

    std::size_t pending_bytes = 0;
    for (const auto& e : expansions)
      for (const auto& s : e.successors) pending_bytes += s.encoding.size() + sizeof(Successor);
    ex.note_frontier_bytes(pending_bytes + level.size() * sizeof(StateId));

    // Merge in frontier order; this replays the sequential BFS exactly.
    next.clear();
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      if (!ex.within_limits()) return ex.finish();
      const bool keep_going = ex.merge(level[i], expansions[i], next);
      ex.note_frontier(static_cast<std::size_t>(count - i - 1) + next.size());
      if (!keep_going) return ex.finish();
    }
    level.swap(next);
  }
  ex.check_terminals();
  return ex.finish();
}

Trace reconstruct_trace(const ExplorationResult& result, StateId target) {
  if (target >= result.state_count())
    throw std::out_of_range("unknown state id " + std::to_string(target));
  Trace trace;
  StateId id = target;
  for (;;) {
    const Provenance& p = result.provenance(id);
    TraceStep step;
    step.state = result.state(id);
    if (p.parent == Provenance::kNoParent) {
      trace.push_back(std::move(step));
      break;
    }
    step.rule = result.rule_names().at(p.rule);
    step.pid = p.pid;
    trace.push_back(std::move(step));
    id = p.parent;
  }
  return {trace.rbegin(), trace.rend()};
}

RunStats stats_report(const ExplorationResult& result) { return result.stats; }

std::string replay_trace(const ProtocolModel& model, const Trace& trace) {
  if (trace.empty()) return "trace is empty";
  const TraceStep& first = trace.front();
  if (!first.rule.empty() || first.pid) return "first step must be an initial state";
  bool initial = false;
  for (const auto& s : model.initial_states) initial = initial || s == first.state;
  if (!initial) return "first state is not an initial state of the model";

  for (std::size_t i = 1; i < trace.size(); ++i) {
    const TraceStep& step = trace[i];
    const std::string where = "step " + std::to_string(i) + ": ";
    if (!step.pid || *step.pid >= model.process_count) return where + "missing or bad pid";
    const TransitionRule* rule = nullptr;
    for (const auto& r : model.rules) {
      if (r.name == step.rule) rule = &r;
    }
    if (!rule) return where + "unknown rule '" + step.rule + "'";
    const SystemState& prev = trace[i - 1].state;
    if (!rule->enabled(prev, *step.pid)) return where + "rule " + step.rule + " is not enabled";
    SystemState next;
    try {
      next = rule->apply(prev, *step.pid);
    } catch (const std::exception& e) {
      return where + e.what();
    }
    if (!(next == step.state)) {
      return where + "expected " + render(next) + " but trace has " + render(step.state);
    }
  }
  return {};
}

}  // namespace mpdcheck
