#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "mpdcheck/barrier.hpp"
#include "mpdcheck/cli.hpp"
#include "mpdcheck/report.hpp"
#include "oracle.hpp"

using namespace mpdcheck;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("mpdcheck_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, '\t')) out.push_back(f);
  return out;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string l;
  while (std::getline(ss, l)) out.push_back(l);
  return out;
}

int run(const cli::RunRequest& r, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int status = cli::run(r, out, err);
  if (err_text) *err_text = err.str();
  return status;
}

std::size_t count_matches(const std::string& text, const std::regex& re) {
  return static_cast<std::size_t>(std::distance(std::sregex_iterator(text.begin(), text.end(), re),
                                                std::sregex_iterator()));
}

}  // namespace

TEST_CASE("verified barrier run writes a tab-separated stats row") {
  TempDir dir;
  cli::RunRequest r;
  r.size = 3;
  r.variant = "leader_last";
  r.stats_path = dir.file("stats.tsv");
  CHECK(run(r) == cli::kExitVerified);

  const auto rows = lines(slurp(r.stats_path));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == report::kStatsHeader);
  CHECK(fields(rows[0]) == std::vector<std::string>{"problem", "method-config", "model size", "time (s)",
                                                    "memory (MB)", "states stored", "states matched"});
  const auto row = fields(rows[1]);
  REQUIRE(row.size() == 7);
  CHECK(row[0] == "barrier");
  CHECK(row[1] == "bfs,leader_last");
  CHECK(row[2] == "3");
  const auto expected = oracle::enumerate(barrier::make_model({.n = 3}));
  CHECK(row[5] == std::to_string(expected.states.size()));
}

TEST_CASE("violation writes a replayable trace in both formats") {
  TempDir dir;
  cli::RunRequest r;
  r.size = 3;
  r.mutation = "release_on_barrier_in";
  r.trace_path = dir.file("trace.txt");
  CHECK(run(r) == cli::kExitViolation);
  REQUIRE(fs::exists(r.trace_path));
  REQUIRE(fs::exists(r.trace_path + ".json"));

  std::ostringstream out, err;
  CHECK(cli::verify_trace(r.trace_path, out, err) == cli::kExitVerified);
  CHECK(cli::verify_trace(r.trace_path + ".json", out, err) == cli::kExitVerified);

  const std::string text = slurp(r.trace_path);
  CHECK(text.rfind("# model=barrier size=3 variant=leader_last mutation=release_on_barrier_in", 0) == 0);
  CHECK(text.find("0\tinit\t-\t(PS[0,0,0,[]],PS[0,0,0,[]],PS[0,0,0,[]])") != std::string::npos);

  // Corrupt one post-state; the replay must notice.
  const std::string bad_path = dir.file("bad.txt");
  std::string bad = text;
  const auto last = bad.rfind("PS[0,1,1");
  REQUIRE(last != std::string::npos);
  bad.replace(last, 8, "PS[0,1,0");
  std::ofstream(bad_path) << bad;
  std::ostringstream out2;
  CHECK(cli::verify_trace(bad_path, out2, err) == cli::kExitViolation);
  CHECK(out2.str().find("replay failed") != std::string::npos);

  CHECK(cli::verify_trace(dir.file("missing.txt"), out, err) == cli::kExitUsage);
}

TEST_CASE("usage errors exit with status 3") {
  cli::RunRequest zero;
  zero.size = 0;
  CHECK(run(zero) == cli::kExitUsage);

  cli::RunRequest bad_variant;
  bad_variant.model = "ring";
  bad_variant.variant = "leader_last";
  CHECK(run(bad_variant) == cli::kExitUsage);

  cli::RunRequest ring_mutation;
  ring_mutation.model = "ring";
  ring_mutation.mutation = "release_on_barrier_in";
  CHECK(run(ring_mutation) == cli::kExitUsage);

  cli::RunRequest dfs_threads;
  dfs_threads.search = "dfs";
  dfs_threads.threads = 2;
  CHECK(run(dfs_threads) == cli::kExitUsage);

  cli::RunRequest unwritable;
  unwritable.stats_path = "/nonexistent-dir/stats.tsv";
  std::string err;
  CHECK(run(unwritable, &err) == cli::kExitUsage);
  CHECK(err.find("/nonexistent-dir/stats.tsv") != std::string::npos);
}

TEST_CASE("limits and overflow exit with status 2") {
  cli::RunRequest limited;
  limited.size = 8;
  limited.max_states = 50;
  CHECK(run(limited) == cli::kExitLimit);

  cli::RunRequest overflow;
  overflow.model = "ring";
  overflow.variant = "unordered";
  overflow.queue_capacity = 1;
  CHECK(run(overflow) == cli::kExitLimit);
}

TEST_CASE("exit status is a function of the verdict") {
  CHECK(cli::exit_status(Verdict::kVerified) == 0);
  CHECK(cli::exit_status(Verdict::kInvariantViolated) == 1);
  CHECK(cli::exit_status(Verdict::kPostconditionViolated) == 1);
  CHECK(cli::exit_status(Verdict::kQueueOverflow) == 2);
  CHECK(cli::exit_status(Verdict::kLimitExceeded) == 2);
}

TEST_CASE("state graph export") {
  TempDir dir;
  const std::regex node(R"(\n  s\d+ \[label=)");
  const std::regex edge(R"(\n  s\d+ -> s\d+ )");

  SUBCASE("one node per stored state and one edge per fired transition") {
    cli::RunRequest r;
    r.size = 1;
    r.graph_path = dir.file("b1.dot");
    r.stats_path = dir.file("b1.tsv");
    REQUIRE(run(r) == cli::kExitVerified);
    const std::string dot = slurp(r.graph_path);
    CHECK(count_matches(dot, node) == 4);
    CHECK(count_matches(dot, edge) == 3);
  }
  SUBCASE("ordered ring of two has one terminal") {
    cli::RunRequest r;
    r.model = "ring";
    r.size = 2;
    r.graph_path = dir.file("r2.dot");
    REQUIRE(run(r) == cli::kExitVerified);
    const std::string dot = slurp(r.graph_path);
    CHECK(count_matches(dot, std::regex("peripheries=2")) == 1);
    const auto result = explore(cli::build_model(r), {.record_edges = true});
    CHECK(count_matches(dot, node) == result.stats.states_stored);
    CHECK(count_matches(dot, edge) == result.stats.transitions_fired);
  }
  SUBCASE("export needs recorded edges") {
    std::ostringstream os;
    CHECK_THROWS_AS(report::export_state_graph(explore(barrier::make_model({.n = 1})), os), std::logic_error);
  }
}

TEST_CASE("outputs are byte-identical across runs") {
  TempDir dir;
  auto request = [&](const std::string& tag) {
    cli::RunRequest r;
    r.size = 3;
    r.mutation = "release_on_barrier_in";
    r.trace_path = dir.file(tag + ".trace");
    r.graph_path = dir.file(tag + ".dot");
    r.stats_path = dir.file(tag + ".tsv");
    return r;
  };
  const auto a = request("a");
  const auto b = request("b");
  REQUIRE(run(a) == cli::kExitViolation);
  REQUIRE(run(b) == cli::kExitViolation);
  CHECK(slurp(a.trace_path) == slurp(b.trace_path));
  CHECK(slurp(a.trace_path + ".json") == slurp(b.trace_path + ".json"));
  CHECK(slurp(a.graph_path) == slurp(b.graph_path));
  auto ra = fields(lines(slurp(a.stats_path)).at(1));
  auto rb = fields(lines(slurp(b.stats_path)).at(1));
  ra[3] = rb[3] = ra[4] = rb[4] = "";
  CHECK(ra == rb);
}
