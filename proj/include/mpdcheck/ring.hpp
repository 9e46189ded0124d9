#pragma once

#include <cstddef>
#include <optional>

#include "mpdcheck/engine.hpp"
#include "mpdcheck/state.hpp"

namespace mpdcheck::ring {

// Daemon ring establishment. The entry daemon starts as a ring of one; every
// other daemon joins by sending req_insert to it and is spliced in on the
// entry daemon's lhs side:
//
//   joiner k  --req_insert(k)-->  entry          (k: outside -> inserting)
//   entry: L = lhs(entry); lhs(entry) = k
//   entry     --insert_ack(L, entry)--> k        (k: inserting -> in_ring)
//   entry     --new_rhs(k)-->           L        (L drops its old rhs)
//
// In the singleton case L == entry, which then handles its own new_rhs.

enum class Variant {
  kOrdered,    // daemon k may start only after every lower non-entry rank is in
  kUnordered,  // any outside daemon may start at any time
};

struct Config {
  std::size_t n = 3;
  Variant variant = Variant::kOrdered;
  Pid entry = 0;
  // Defaults to n + 2.
  std::optional<std::size_t> queue_capacity;

  std::size_t capacity() const { return queue_capacity.value_or(n + 2); }
};

// Throws std::invalid_argument for n < 1 or an entry outside [0, n).
SystemState initial_state(const Config& cfg);

bool begin_insert_enabled(const Config& cfg, const SystemState& s, Pid pid);
SystemState begin_insert(const Config& cfg, const SystemState& s, Pid pid);

bool handle_req_insert_enabled(const Config& cfg, const SystemState& s, Pid pid);
SystemState handle_req_insert(const Config& cfg, const SystemState& s, Pid pid);

bool handle_new_rhs_enabled(const SystemState& s, Pid pid);
SystemState handle_new_rhs(const SystemState& s, Pid pid);

bool handle_insert_ack_enabled(const SystemState& s, Pid pid);
SystemState handle_insert_ack(const SystemState& s, Pid pid);

// Every daemon in the ring, every queue empty, lhs/rhs mutually consistent,
// and the rhs links form one cycle through all n daemons.
bool postcondition(const SystemState& s);

// Reachable-state safety checks: neighbor ids in range, unset exactly while
// outside, req_insert only ever queued at the entry daemon.
bool well_formed(const Config& cfg, const SystemState& s);

ProtocolModel make_model(const Config& cfg);

}  // namespace mpdcheck::ring
