#include "mpdcheck/report.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace mpdcheck::report {

namespace {

using nlohmann::json;

std::string to_hex(std::string_view bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (char c : bytes) {
    const auto b = static_cast<unsigned char>(c);
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

std::string format_fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream is(line);
  while (std::getline(is, part, sep)) parts.push_back(part);
  return parts;
}

std::size_t to_size(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(what);
    return static_cast<std::size_t>(v);
  } catch (const std::logic_error&) {
    throw std::invalid_argument(std::string("bad ") + what + " '" + text + "'");
  }
}

void set_header_field(TraceHeader& h, const std::string& key, const std::string& value) {
  if (key == "model") {
    h.model = value;
  } else if (key == "size") {
    h.size = to_size(value, "size");
  } else if (key == "variant") {
    h.variant = value;
  } else if (key == "mutation") {
    h.mutation = value == "none" ? "" : value;
  } else if (key == "queue_capacity") {
    h.queue_capacity = to_size(value, "queue capacity");
  } else if (key == "verdict") {
    h.verdict = value;
  }
}

ParsedTrace read_text(std::istream& is) {
  ParsedTrace parsed;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream fields(line.substr(1));
      std::string field;
      while (fields >> field) {
        const auto eq = field.find('=');
        if (eq != std::string::npos) set_header_field(parsed.header, field.substr(0, eq), field.substr(eq + 1));
      }
      continue;
    }
    if (parsed.header.queue_capacity == 0) throw std::invalid_argument("trace header missing queue_capacity");
    const auto parts = split(line, '\t');
    if (parts.size() != 4) throw std::invalid_argument("trace record needs 4 fields: " + line);
    if (to_size(parts[0], "step index") != parsed.trace.size())
      throw std::invalid_argument("trace steps out of order at: " + line);
    TraceStep step;
    if (parts[1] != "init") step.rule = parts[1];
    if (parts[2] != "-") step.pid = static_cast<Pid>(to_size(parts[2], "pid"));
    step.state = parse_rendering(parts[3], parsed.header.queue_capacity);
    parsed.trace.push_back(std::move(step));
  }
  return parsed;
}

ParsedTrace read_json(std::istream& is) {
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad trace JSON: ") + e.what());
  }
  ParsedTrace parsed;
  try {
    const json& h = doc.at("header");
    parsed.header.model = h.at("model").get<std::string>();
    parsed.header.size = h.at("size").get<std::size_t>();
    parsed.header.variant = h.at("variant").get<std::string>();
    parsed.header.mutation = h.value("mutation", "");
    parsed.header.queue_capacity = h.at("queue_capacity").get<std::size_t>();
    parsed.header.verdict = h.value("verdict", "");
    for (const json& s : doc.at("steps")) {
      TraceStep step;
      if (!s.at("rule").is_null()) step.rule = s.at("rule").get<std::string>();
      if (!s.at("pid").is_null()) step.pid = s.at("pid").get<Pid>();
      step.state = parse_rendering(s.at("state").get<std::string>(), parsed.header.queue_capacity);
      if (s.contains("encoding") && s.at("encoding").get<std::string>() != to_hex(canonical_encode(step.state)))
        throw std::invalid_argument("encoding does not match state at step " + std::to_string(parsed.trace.size()));
      parsed.trace.push_back(std::move(step));
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad trace JSON: ") + e.what());
  }
  return parsed;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string stats_row(const std::string& problem, const std::string& method, std::size_t size,
                      const RunStats& stats) {
  std::ostringstream os;
  os << problem << '\t' << method << '\t' << size << '\t' << format_fixed(stats.elapsed_seconds, 3)
     << '\t' << format_fixed(static_cast<double>(stats.peak_memory_estimate) / (1024.0 * 1024.0), 3)
     << '\t' << stats.states_stored << '\t' << stats.states_matched;
  return os.str();
}

void write_trace_text(std::ostream& os, const TraceHeader& h, const Trace& trace) {
  os << "# model=" << h.model << " size=" << h.size << " variant=" << h.variant
     << " mutation=" << (h.mutation.empty() ? "none" : h.mutation)
     << " queue_capacity=" << h.queue_capacity << " verdict=" << h.verdict << '\n';
  os << "# step\trule\tpid\tstate\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const TraceStep& step = trace[i];
    os << i << '\t' << (step.rule.empty() ? "init" : step.rule) << '\t'
       << (step.pid ? std::to_string(*step.pid) : "-") << '\t' << render(step.state) << '\n';
  }
}

void write_trace_json(std::ostream& os, const TraceHeader& h, const Trace& trace) {
  json doc;
  doc["header"] = {{"model", h.model},       {"size", h.size},
                   {"variant", h.variant},   {"mutation", h.mutation},
                   {"queue_capacity", h.queue_capacity}, {"verdict", h.verdict}};
  json steps = json::array();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const TraceStep& step = trace[i];
    steps.push_back({{"step", i},
                     {"rule", step.rule.empty() ? json(nullptr) : json(step.rule)},
                     {"pid", step.pid ? json(*step.pid) : json(nullptr)},
                     {"state", render(step.state)},
                     {"encoding", to_hex(canonical_encode(step.state))}});
  }
  doc["steps"] = std::move(steps);
  os << doc.dump(2) << '\n';
}

ParsedTrace read_trace(std::istream& is) {
  while (std::isspace(is.peek())) is.get();
  if (is.peek() == '{') return read_json(is);
  return read_text(is);
}

void export_state_graph(const ExplorationResult& result, std::ostream& os) {
  if (!result.edges_recorded)
    throw std::logic_error("state graph export needs a run with edge recording enabled");
  std::vector<bool> terminal(result.state_count(), false);
  for (StateId id : result.terminal_states) terminal[id] = true;

  os << "digraph state_space {\n  node [shape=ellipse, fontname=\"monospace\"];\n";
  for (StateId id = 0; id < result.state_count(); ++id) {
    os << "  s" << id << " [label=\"" << id << ": " << dot_escape(render(result.state(id))) << '"';
    if (result.is_initial(id)) os << ", shape=box";
    if (terminal[id]) os << ", peripheries=2";
    if (result.witness && *result.witness == id) os << ", color=red";
    os << "];\n";
  }
  for (const Edge& e : result.edges) {
    os << "  s" << e.from << " -> s" << e.to << " [label=\"" << result.rule_names().at(e.rule) << '('
       << e.pid << ")\"];\n";
  }
  os << "}\n";
}

}  // namespace mpdcheck::report
