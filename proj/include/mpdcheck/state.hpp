#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mpdcheck {

// Process rank. Values >= the process count never name a process.
using Pid = std::uint16_t;

// Neighbor value of a daemon that has not joined the ring yet.
inline constexpr Pid kUnsetPid = 0xFFFF;
inline constexpr std::size_t kMaxProcesses = kUnsetPid;

enum class MessageKind : std::uint8_t {
  kBarrierIn = 0,
  kBarrierOut = 1,
  kReqInsert = 2,
  kInsertAck = 3,
  kNewRhs = 4,
};

std::string_view to_string(MessageKind kind);
std::size_t payload_arity(MessageKind kind);

struct Message {
  MessageKind kind = MessageKind::kBarrierIn;
  // Only the first payload_arity(kind) entries are meaningful; the rest are 0.
  std::array<Pid, 2> payload{0, 0};

  static Message barrier_in() { return {MessageKind::kBarrierIn, {0, 0}}; }
  static Message barrier_out() { return {MessageKind::kBarrierOut, {0, 0}}; }
  static Message req_insert(Pid requester) { return {MessageKind::kReqInsert, {requester, 0}}; }
  static Message insert_ack(Pid lhs, Pid rhs) { return {MessageKind::kInsertAck, {lhs, rhs}}; }
  static Message new_rhs(Pid rhs) { return {MessageKind::kNewRhs, {rhs, 0}}; }

  friend auto operator<=>(const Message&, const Message&) = default;
};

std::string render(const Message& m);

// Raised when a send would exceed a queue's capacity. The model's bound is
// too small for the protocol; the engine reports it as its own verdict.
class QueueOverflow : public std::runtime_error {
 public:
  QueueOverflow(Pid to, std::size_t capacity);
  Pid target() const { return target_; }

 private:
  Pid target_;
};

// Bounded FIFO input queue owned by one process. All senders share it.
class Queue {
 public:
  Queue() = default;
  explicit Queue(std::size_t capacity) : capacity_(capacity) {}

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  bool full() const { return items_.size() >= capacity_; }
  std::span<const Message> items() const { return items_; }

  std::optional<Message> front() const;
  // Throws std::logic_error on a full queue; callers wanting the overflow
  // verdict go through send_message.
  void push_back(const Message& m);
  // Throws std::logic_error on an empty queue.
  void pop_front();

  friend bool operator==(const Queue&, const Queue&) = default;

 private:
  std::vector<Message> items_;
  std::size_t capacity_ = 1;
};

struct BarrierProcess {
  bool client_barrier_in = false;
  bool client_barrier_out = false;
  bool holding_barrier_in = false;
  Queue input_queue;

  friend bool operator==(const BarrierProcess&, const BarrierProcess&) = default;
};

enum class RingStatus : std::uint8_t { kOutside = 0, kInserting = 1, kInRing = 2 };

std::string_view to_string(RingStatus status);

struct RingProcess {
  RingStatus status = RingStatus::kOutside;
  Pid lhs = kUnsetPid;
  Pid rhs = kUnsetPid;
  Queue input_queue;

  friend bool operator==(const RingProcess&, const RingProcess&) = default;
};

using ProcessState = std::variant<BarrierProcess, RingProcess>;

// Global state: one entry per process, indexed by rank. The process count is
// fixed for a run and every entry holds the same protocol variant.
class SystemState {
 public:
  SystemState() = default;
  explicit SystemState(std::vector<ProcessState> processes);

  std::size_t size() const { return processes_.size(); }
  std::span<const ProcessState> processes() const { return processes_; }

  const ProcessState& at(Pid pid) const;
  ProcessState& at(Pid pid);

  const BarrierProcess& barrier(Pid pid) const;
  BarrierProcess& barrier(Pid pid);
  const RingProcess& ring(Pid pid) const;
  RingProcess& ring(Pid pid);

  const Queue& queue(Pid pid) const;
  Queue& queue(Pid pid);

  friend bool operator==(const SystemState&, const SystemState&) = default;

 private:
  std::vector<ProcessState> processes_;
};

// Pure state edits: each returns a modified copy and leaves `s` untouched.

// Throws QueueOverflow when the target queue is full, std::out_of_range for a
// bad pid.
SystemState send_message(const SystemState& s, Pid to, const Message& m);
// Throws std::logic_error when the queue is empty.
SystemState receive_message(const SystemState& s, Pid pid);
std::optional<Message> peek(const SystemState& s, Pid pid);

// Deterministic byte encoding, injective over well-formed states. Queue
// capacities are part of the model configuration and are not encoded.
std::string canonical_encode(const SystemState& s);
void canonical_encode_into(const SystemState& s, std::string& out);
// Inverse of canonical_encode; every queue gets `queue_capacity`.
SystemState canonical_decode(std::string_view bytes, std::size_t queue_capacity);

// Human-readable rendering, e.g. (PS[1,0,0,[]],PS[1,1,0,(barrier_out)]).
std::string render(const ProcessState& p);
std::string render(const SystemState& s);
// Inverse of render(const SystemState&). Throws std::invalid_argument on
// malformed text.
SystemState parse_rendering(std::string_view text, std::size_t queue_capacity);

}  // namespace mpdcheck
