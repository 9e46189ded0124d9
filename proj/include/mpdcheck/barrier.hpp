#pragma once

#include <cstddef>
#include <optional>

#include "mpdcheck/engine.hpp"
#include "mpdcheck/state.hpp"

namespace mpdcheck::barrier {

// Manager-ring barrier. Rank 0 is the leader; clients are folded into two
// bits per manager (request seen, released).

enum class Variant {
  kLeaderLast,   // the leader releases its client when barrier_out returns
  kLeaderFirst,  // the leader releases its client before sending barrier_out
};

enum class Mutation {
  kNone,
  // Seeded bug: a non-leader releases its client as soon as barrier_in
  // arrives, whether it forwards or holds the message.
  kReleaseOnBarrierIn,
};

struct Config {
  std::size_t n = 3;
  Variant variant = Variant::kLeaderLast;
  Mutation mutation = Mutation::kNone;
  // Defaults to n + 2.
  std::optional<std::size_t> queue_capacity;

  std::size_t capacity() const { return queue_capacity.value_or(n + 2); }
};

inline Pid next(Pid pid, std::size_t n) { return static_cast<Pid>((pid + 1) % n); }

// Throws std::invalid_argument for n < 1.
SystemState initial_state(const Config& cfg);

bool client_request_enabled(const SystemState& s, Pid pid);
SystemState client_request(const Config& cfg, const SystemState& s, Pid pid);

bool barrier_in_nonleader_enabled(const SystemState& s, Pid pid);
SystemState barrier_in_nonleader(const Config& cfg, const SystemState& s, Pid pid);

bool barrier_in_leader_enabled(const SystemState& s, Pid pid);
SystemState barrier_in_leader(const Config& cfg, const SystemState& s, Pid pid);

bool barrier_out_enabled(const SystemState& s, Pid pid);
SystemState barrier_out(const Config& cfg, const SystemState& s, Pid pid);

// No client is released before every client has reached the barrier.
bool invariant(const SystemState& s);
// Every client released, every queue empty, nothing held.
bool postcondition(const SystemState& s);

ProtocolModel make_model(const Config& cfg);

}  // namespace mpdcheck::barrier
