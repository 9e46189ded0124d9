#include "mpdcheck/barrier.hpp"

#include <algorithm>

namespace mpdcheck::barrier {

namespace {

bool head_is(const SystemState& s, Pid pid, MessageKind kind) {
  const auto m = peek(s, pid);
  return m && m->kind == kind;
}

}  // namespace

SystemState initial_state(const Config& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("barrier model needs at least one process");
  if (cfg.n > kMaxProcesses) throw std::invalid_argument("too many processes");
  if (cfg.capacity() < 1) throw std::invalid_argument("queue capacity must be positive");
  std::vector<ProcessState> processes;
  processes.reserve(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    BarrierProcess p;
    p.input_queue = Queue(cfg.capacity());
    processes.emplace_back(std::move(p));
  }
  return SystemState(std::move(processes));
}

bool client_request_enabled(const SystemState& s, Pid pid) {
  return !s.barrier(pid).client_barrier_in;
}

SystemState client_request(const Config& cfg, const SystemState& s, Pid pid) {
  SystemState next = s;
  BarrierProcess& self = next.barrier(pid);
  self.client_barrier_in = true;
  if (pid == 0) return send_message(next, barrier::next(pid, cfg.n), Message::barrier_in());
  if (self.holding_barrier_in) {
    self.holding_barrier_in = false;
    return send_message(next, barrier::next(pid, cfg.n), Message::barrier_in());
  }
  return next;
}

bool barrier_in_nonleader_enabled(const SystemState& s, Pid pid) {
  return pid != 0 && head_is(s, pid, MessageKind::kBarrierIn);
}

SystemState barrier_in_nonleader(const Config& cfg, const SystemState& s, Pid pid) {
  SystemState next = receive_message(s, pid);
  BarrierProcess& self = next.barrier(pid);
  if (cfg.mutation == Mutation::kReleaseOnBarrierIn) self.client_barrier_out = true;
  if (!self.client_barrier_in) {
    self.holding_barrier_in = true;
    return next;
  }
  return send_message(next, barrier::next(pid, cfg.n), Message::barrier_in());
}

bool barrier_in_leader_enabled(const SystemState& s, Pid pid) {
  return pid == 0 && head_is(s, pid, MessageKind::kBarrierIn);
}

SystemState barrier_in_leader(const Config& cfg, const SystemState& s, Pid pid) {
  SystemState next = receive_message(s, pid);
  if (cfg.variant == Variant::kLeaderFirst) next.barrier(pid).client_barrier_out = true;
  return send_message(next, barrier::next(pid, cfg.n), Message::barrier_out());
}

bool barrier_out_enabled(const SystemState& s, Pid pid) {
  return head_is(s, pid, MessageKind::kBarrierOut);
}

SystemState barrier_out(const Config& cfg, const SystemState& s, Pid pid) {
  SystemState next = receive_message(s, pid);
  if (pid != 0) {
    next.barrier(pid).client_barrier_out = true;
    return send_message(next, barrier::next(pid, cfg.n), Message::barrier_out());
  }
  if (cfg.variant == Variant::kLeaderLast) next.barrier(pid).client_barrier_out = true;
  return next;
}

bool invariant(const SystemState& s) {
  const auto procs = s.processes();
  const bool any_released = std::any_of(procs.begin(), procs.end(), [](const ProcessState& p) {
    return std::get<BarrierProcess>(p).client_barrier_out;
  });
  if (!any_released) return true;
  return std::all_of(procs.begin(), procs.end(), [](const ProcessState& p) {
    return std::get<BarrierProcess>(p).client_barrier_in;
  });
}

bool postcondition(const SystemState& s) {
  const auto procs = s.processes();
  return std::all_of(procs.begin(), procs.end(), [](const ProcessState& p) {
    const auto& b = std::get<BarrierProcess>(p);
    return b.client_barrier_out && b.input_queue.empty() && !b.holding_barrier_in;
  });
}

ProtocolModel make_model(const Config& cfg) {
  ProtocolModel model;
  model.name = "barrier";
  model.process_count = cfg.n;
  model.queue_capacity = cfg.capacity();
  model.initial_states.push_back(initial_state(cfg));
  // Declaration order fixes successor order, never the reachable set.
  model.rules = {
      {"client_request", client_request_enabled,
       [cfg](const SystemState& s, Pid pid) { return client_request(cfg, s, pid); }},
      {"barrier_in_nonleader", barrier_in_nonleader_enabled,
       [cfg](const SystemState& s, Pid pid) { return barrier_in_nonleader(cfg, s, pid); }},
      {"barrier_in_leader", barrier_in_leader_enabled,
       [cfg](const SystemState& s, Pid pid) { return barrier_in_leader(cfg, s, pid); }},
      {"barrier_out", barrier_out_enabled,
       [cfg](const SystemState& s, Pid pid) { return barrier_out(cfg, s, pid); }},
  };
  model.invariant = invariant;
  model.terminal_postcondition = postcondition;
  return model;
}

}  // namespace mpdcheck::barrier
