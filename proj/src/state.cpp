#include "mpdcheck/state.hpp"

#include <cctype>
#include <sstream>

namespace mpdcheck {

namespace {

constexpr std::uint8_t kBarrierTag = 0;
constexpr std::uint8_t kRingTag = 1;

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  bool done() const { return pos_ == bytes_.size(); }

  std::uint8_t u8() {
    if (pos_ >= bytes_.size()) throw std::invalid_argument("truncated state encoding");
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }

  std::uint16_t u16() {
    std::uint16_t lo = u8();
    std::uint16_t hi = u8();
    return static_cast<std::uint16_t>(lo | (hi << 8));
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::string render_pid(Pid p) { return p == kUnsetPid ? "-" : std::to_string(p); }

std::string render_queue(const Queue& q) {
  if (q.empty()) return "[]";
  std::string out = "(";
  bool first = true;
  for (const Message& m : q.items()) {
    if (!first) out += ',';
    first = false;
    out += render(m);
  }
  out += ')';
  return out;
}

}  // namespace

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::kBarrierIn: return "barrier_in";
    case MessageKind::kBarrierOut: return "barrier_out";
    case MessageKind::kReqInsert: return "req_insert";
    case MessageKind::kInsertAck: return "insert_ack";
    case MessageKind::kNewRhs: return "new_rhs";
  }
  return "?";
}

std::size_t payload_arity(MessageKind kind) {
  switch (kind) {
    case MessageKind::kBarrierIn:
    case MessageKind::kBarrierOut: return 0;
    case MessageKind::kReqInsert:
    case MessageKind::kNewRhs: return 1;
    case MessageKind::kInsertAck: return 2;
  }
  return 0;
}

std::string render(const Message& m) {
  std::string out(to_string(m.kind));
  const std::size_t arity = payload_arity(m.kind);
  if (arity == 0) return out;
  out += '(';
  for (std::size_t i = 0; i < arity; ++i) {
    if (i) out += ',';
    out += std::to_string(m.payload[i]);
  }
  out += ')';
  return out;
}

std::string_view to_string(RingStatus status) {
  switch (status) {
    case RingStatus::kOutside: return "outside";
    case RingStatus::kInserting: return "inserting";
    case RingStatus::kInRing: return "in_ring";
  }
  return "?";
}

QueueOverflow::QueueOverflow(Pid to, std::size_t capacity)
    : std::runtime_error("queue overflow at process " + std::to_string(to) +
                         " (capacity " + std::to_string(capacity) + ")"),
      target_(to) {}

std::optional<Message> Queue::front() const {
  if (items_.empty()) return std::nullopt;
  return items_.front();
}

void Queue::push_back(const Message& m) {
  if (full()) throw std::logic_error("push_back on a full queue");
  items_.push_back(m);
}

void Queue::pop_front() {
  if (items_.empty()) throw std::logic_error("pop_front on an empty queue");
  items_.erase(items_.begin());
}

SystemState::SystemState(std::vector<ProcessState> processes) : processes_(std::move(processes)) {
  if (processes_.size() > kMaxProcesses) throw std::invalid_argument("too many processes");
  for (const auto& p : processes_) {
    if (p.index() != processes_.front().index())
      throw std::invalid_argument("mixed protocol variants in one system state");
  }
}

const ProcessState& SystemState::at(Pid pid) const { return processes_.at(pid); }
ProcessState& SystemState::at(Pid pid) { return processes_.at(pid); }

const BarrierProcess& SystemState::barrier(Pid pid) const { return std::get<BarrierProcess>(at(pid)); }
BarrierProcess& SystemState::barrier(Pid pid) { return std::get<BarrierProcess>(at(pid)); }
const RingProcess& SystemState::ring(Pid pid) const { return std::get<RingProcess>(at(pid)); }
RingProcess& SystemState::ring(Pid pid) { return std::get<RingProcess>(at(pid)); }

const Queue& SystemState::queue(Pid pid) const {
  return std::visit([](const auto& p) -> const Queue& { return p.input_queue; }, at(pid));
}

Queue& SystemState::queue(Pid pid) {
  return std::visit([](auto& p) -> Queue& { return p.input_queue; }, at(pid));
}

SystemState send_message(const SystemState& s, Pid to, const Message& m) {
  if (to >= s.size()) throw std::out_of_range("send_message: no process " + std::to_string(to));
  const Queue& target = s.queue(to);
  if (target.full()) throw QueueOverflow(to, target.capacity());
  SystemState next = s;
  next.queue(to).push_back(m);
  return next;
}

SystemState receive_message(const SystemState& s, Pid pid) {
  if (s.queue(pid).empty())
    throw std::logic_error("receive_message: empty queue at process " + std::to_string(pid));
  SystemState next = s;
  next.queue(pid).pop_front();
  return next;
}

std::optional<Message> peek(const SystemState& s, Pid pid) { return s.queue(pid).front(); }

void canonical_encode_into(const SystemState& s, std::string& out) {
  for (const ProcessState& p : s.processes()) {
    const Queue* q = nullptr;
    if (const auto* b = std::get_if<BarrierProcess>(&p)) {
      out.push_back(static_cast<char>(kBarrierTag));
      out.push_back(static_cast<char>((b->client_barrier_in ? 1 : 0) |
                                      (b->client_barrier_out ? 2 : 0) |
                                      (b->holding_barrier_in ? 4 : 0)));
      q = &b->input_queue;
    } else {
      const auto& r = std::get<RingProcess>(p);
      out.push_back(static_cast<char>(kRingTag));
      out.push_back(static_cast<char>(r.status));
      put_u16(out, r.lhs);
      put_u16(out, r.rhs);
      q = &r.input_queue;
    }
    put_u16(out, static_cast<std::uint16_t>(q->size()));
    for (const Message& m : q->items()) {
      out.push_back(static_cast<char>(m.kind));
      for (std::size_t i = 0; i < payload_arity(m.kind); ++i) put_u16(out, m.payload[i]);
    }
  }
}

std::string canonical_encode(const SystemState& s) {
  std::string out;
  canonical_encode_into(s, out);
  return out;
}

SystemState canonical_decode(std::string_view bytes, std::size_t queue_capacity) {
  Reader in(bytes);
  std::vector<ProcessState> processes;
  while (!in.done()) {
    const std::uint8_t tag = in.u8();
    Queue queue(queue_capacity);
    auto read_queue = [&] {
      const std::uint16_t len = in.u16();
      for (std::uint16_t i = 0; i < len; ++i) {
        const std::uint8_t kind = in.u8();
        if (kind > static_cast<std::uint8_t>(MessageKind::kNewRhs))
          throw std::invalid_argument("bad message kind in state encoding");
        Message m{static_cast<MessageKind>(kind), {0, 0}};
        for (std::size_t k = 0; k < payload_arity(m.kind); ++k) m.payload[k] = in.u16();
        queue.push_back(m);
      }
    };
    if (tag == kBarrierTag) {
      const std::uint8_t bits = in.u8();
      BarrierProcess b;
      b.client_barrier_in = bits & 1;
      b.client_barrier_out = bits & 2;
      b.holding_barrier_in = bits & 4;
      read_queue();
      b.input_queue = std::move(queue);
      processes.emplace_back(std::move(b));
    } else if (tag == kRingTag) {
      RingProcess r;
      const std::uint8_t status = in.u8();
      if (status > static_cast<std::uint8_t>(RingStatus::kInRing))
        throw std::invalid_argument("bad ring status in state encoding");
      r.status = static_cast<RingStatus>(status);
      r.lhs = in.u16();
      r.rhs = in.u16();
      read_queue();
      r.input_queue = std::move(queue);
      processes.emplace_back(std::move(r));
    } else {
      throw std::invalid_argument("bad process tag in state encoding");
    }
  }
  return SystemState(std::move(processes));
}

std::string render(const ProcessState& p) {
  std::ostringstream os;
  if (const auto* b = std::get_if<BarrierProcess>(&p)) {
    os << "PS[" << b->client_barrier_in << ',' << b->client_barrier_out << ','
       << b->holding_barrier_in << ',' << render_queue(b->input_queue) << ']';
  } else {
    const auto& r = std::get<RingProcess>(p);
    os << "RS[" << to_string(r.status) << ',' << render_pid(r.lhs) << ',' << render_pid(r.rhs)
       << ',' << render_queue(r.input_queue) << ']';
  }
  return os.str();
}

std::string render(const SystemState& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ',';
    out += render(s.processes()[i]);
  }
  out += ')';
  return out;
}

namespace {

class RenderingParser {
 public:
  RenderingParser(std::string_view text, std::size_t capacity) : text_(text), capacity_(capacity) {}

  SystemState parse() {
    std::vector<ProcessState> processes;
    expect('(');
    if (!try_consume(')')) {
      do {
        processes.push_back(process());
      } while (try_consume(','));
      expect(')');
    }
    if (pos_ != text_.size()) fail("trailing characters");
    return SystemState(std::move(processes));
  }

 private:
  ProcessState process() {
    const std::string_view tag = word();
    expect('[');
    if (tag == "PS") {
      BarrierProcess b;
      b.client_barrier_in = bit();
      expect(',');
      b.client_barrier_out = bit();
      expect(',');
      b.holding_barrier_in = bit();
      expect(',');
      b.input_queue = queue();
      expect(']');
      return b;
    }
    if (tag == "RS") {
      RingProcess r;
      const std::string_view status = word();
      if (status == "outside") {
        r.status = RingStatus::kOutside;
      } else if (status == "inserting") {
        r.status = RingStatus::kInserting;
      } else if (status == "in_ring") {
        r.status = RingStatus::kInRing;
      } else {
        fail("unknown ring status");
      }
      expect(',');
      r.lhs = pid_or_unset();
      expect(',');
      r.rhs = pid_or_unset();
      expect(',');
      r.input_queue = queue();
      expect(']');
      return r;
    }
    fail("unknown process tag");
  }

  Queue queue() {
    Queue q(capacity_);
    if (try_consume('[')) {
      expect(']');
      return q;
    }
    expect('(');
    do {
      if (q.full()) fail("queue longer than its capacity");
      q.push_back(message());
    } while (try_consume(','));
    expect(')');
    return q;
  }

  Message message() {
    const std::string_view name = word();
    for (std::uint8_t k = 0; k <= static_cast<std::uint8_t>(MessageKind::kNewRhs); ++k) {
      const auto kind = static_cast<MessageKind>(k);
      if (to_string(kind) != name) continue;
      Message m{kind, {0, 0}};
      const std::size_t arity = payload_arity(kind);
      if (arity > 0) {
        expect('(');
        for (std::size_t i = 0; i < arity; ++i) {
          if (i) expect(',');
          m.payload[i] = number();
        }
        expect(')');
      }
      return m;
    }
    fail("unknown message kind");
  }

  bool bit() {
    const Pid v = number();
    if (v > 1) fail("expected 0 or 1");
    return v == 1;
  }

  Pid pid_or_unset() {
    if (try_consume('-')) return kUnsetPid;
    return number();
  }

  Pid number() {
    const std::size_t start = pos_;
    unsigned long v = 0;
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
      v = v * 10 + static_cast<unsigned long>(text_[pos_++] - '0');
      if (v >= kUnsetPid) fail("number out of range");
    }
    if (pos_ == start) fail("expected a number");
    return static_cast<Pid>(v);
  }

  std::string_view word() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_')) {
      ++pos_;
    }
    if (pos_ == start) fail("expected a name");
    return text_.substr(start, pos_ - start);
  }

  bool try_consume(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!try_consume(c)) fail(std::string("expected '") + c + "'");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("bad state rendering at offset " + std::to_string(pos_) + ": " + what);
  }

  std::string_view text_;
  std::size_t capacity_;
  std::size_t pos_ = 0;
};

}  // namespace

SystemState parse_rendering(std::string_view text, std::size_t queue_capacity) {
  return RenderingParser(text, queue_capacity).parse();
}

}  // namespace mpdcheck
