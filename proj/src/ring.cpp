#include "mpdcheck/ring.hpp"

namespace mpdcheck::ring {

namespace {

std::optional<Message> head_of_kind(const SystemState& s, Pid pid, MessageKind kind) {
  auto m = peek(s, pid);
  if (m && m->kind == kind) return m;
  return std::nullopt;
}

bool in_range(Pid p, std::size_t n) { return p < n; }

}  // namespace

SystemState initial_state(const Config& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("ring model needs at least one process");
  if (cfg.n > kMaxProcesses) throw std::invalid_argument("too many processes");
  if (cfg.entry >= cfg.n) throw std::invalid_argument("entry daemon out of range");
  if (cfg.capacity() < 1) throw std::invalid_argument("queue capacity must be positive");
  std::vector<ProcessState> processes;
  processes.reserve(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    RingProcess p;
    p.input_queue = Queue(cfg.capacity());
    if (i == cfg.entry) {
      p.status = RingStatus::kInRing;
      p.lhs = cfg.entry;
      p.rhs = cfg.entry;
    }
    processes.emplace_back(std::move(p));
  }
  return SystemState(std::move(processes));
}

bool begin_insert_enabled(const Config& cfg, const SystemState& s, Pid pid) {
  if (s.ring(pid).status != RingStatus::kOutside) return false;
  if (cfg.variant == Variant::kUnordered) return true;
  for (Pid id = 0; id < pid; ++id) {
    if (id != cfg.entry && s.ring(id).status != RingStatus::kInRing) return false;
  }
  return true;
}

SystemState begin_insert(const Config& cfg, const SystemState& s, Pid pid) {
  SystemState next = s;
  next.ring(pid).status = RingStatus::kInserting;
  return send_message(next, cfg.entry, Message::req_insert(pid));
}

bool handle_req_insert_enabled(const Config& cfg, const SystemState& s, Pid pid) {
  return pid == cfg.entry && head_of_kind(s, pid, MessageKind::kReqInsert).has_value();
}

SystemState handle_req_insert(const Config& cfg, const SystemState& s, Pid pid) {
  const Pid joiner = peek(s, pid)->payload[0];
  SystemState next = receive_message(s, pid);
  const Pid old_lhs = next.ring(pid).lhs;
  next.ring(pid).lhs = joiner;
  next = send_message(next, joiner, Message::insert_ack(old_lhs, cfg.entry));
  return send_message(next, old_lhs, Message::new_rhs(joiner));
}

bool handle_new_rhs_enabled(const SystemState& s, Pid pid) {
  return head_of_kind(s, pid, MessageKind::kNewRhs).has_value();
}

SystemState handle_new_rhs(const SystemState& s, Pid pid) {
  const Pid rhs = peek(s, pid)->payload[0];
  SystemState next = receive_message(s, pid);
  next.ring(pid).rhs = rhs;
  return next;
}

bool handle_insert_ack_enabled(const SystemState& s, Pid pid) {
  return s.ring(pid).status == RingStatus::kInserting &&
         head_of_kind(s, pid, MessageKind::kInsertAck).has_value();
}

SystemState handle_insert_ack(const SystemState& s, Pid pid) {
  const Message ack = *peek(s, pid);
  SystemState next = receive_message(s, pid);
  RingProcess& self = next.ring(pid);
  self.lhs = ack.payload[0];
  self.rhs = ack.payload[1];
  self.status = RingStatus::kInRing;
  return next;
}

bool postcondition(const SystemState& s) {
  const std::size_t n = s.size();
  for (Pid i = 0; i < n; ++i) {
    const RingProcess& p = s.ring(i);
    if (p.status != RingStatus::kInRing || !p.input_queue.empty()) return false;
    if (!in_range(p.lhs, n) || !in_range(p.rhs, n)) return false;
    if (s.ring(p.rhs).lhs != i) return false;
  }
  // Follow rhs from 0: a single cycle returns to 0 after exactly n hops.
  std::vector<bool> seen(n, false);
  Pid at = 0;
  for (std::size_t hop = 0; hop < n; ++hop) {
    if (seen[at]) return false;
    seen[at] = true;
    at = s.ring(at).rhs;
  }
  return at == 0;
}

bool well_formed(const Config& cfg, const SystemState& s) {
  const std::size_t n = s.size();
  for (Pid i = 0; i < n; ++i) {
    const RingProcess& p = s.ring(i);
    if (p.status == RingStatus::kInRing) {
      if (!in_range(p.lhs, n) || !in_range(p.rhs, n)) return false;
    } else if (p.lhs != kUnsetPid || p.rhs != kUnsetPid) {
      return false;
    }
    for (const Message& m : p.input_queue.items()) {
      switch (m.kind) {
        case MessageKind::kReqInsert:
          if (i != cfg.entry || !in_range(m.payload[0], n)) return false;
          break;
        case MessageKind::kInsertAck:
          if (p.status != RingStatus::kInserting) return false;
          if (!in_range(m.payload[0], n) || !in_range(m.payload[1], n)) return false;
          break;
        case MessageKind::kNewRhs:
          if (!in_range(m.payload[0], n)) return false;
          break;
        default:
          return false;
      }
    }
  }
  return true;
}

ProtocolModel make_model(const Config& cfg) {
  ProtocolModel model;
  model.name = "ring";
  model.process_count = cfg.n;
  model.queue_capacity = cfg.capacity();
  model.initial_states.push_back(initial_state(cfg));
  model.rules = {
      {"begin_insert",
       [cfg](const SystemState& s, Pid pid) { return begin_insert_enabled(cfg, s, pid); },
       [cfg](const SystemState& s, Pid pid) { return begin_insert(cfg, s, pid); }},
      {"handle_req_insert",
       [cfg](const SystemState& s, Pid pid) { return handle_req_insert_enabled(cfg, s, pid); },
       [cfg](const SystemState& s, Pid pid) { return handle_req_insert(cfg, s, pid); }},
      {"handle_new_rhs", handle_new_rhs_enabled, handle_new_rhs},
      {"handle_insert_ack", handle_insert_ack_enabled, handle_insert_ack},
  };
  model.invariant = [cfg](const SystemState& s) { return well_formed(cfg, s); };
  model.terminal_postcondition = postcondition;
  return model;
}

}  // namespace mpdcheck::ring
