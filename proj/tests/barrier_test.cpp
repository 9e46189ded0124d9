#include "doctest.h"
#include "mpdcheck/barrier.hpp"
#include "oracle.hpp"

using namespace mpdcheck;
namespace b = mpdcheck::barrier;

namespace {

// Builds a barrier state from its rendering, e.g. "(PS[1,0,0,[]],...)".
SystemState S(const char* text, std::size_t n = 3) { return parse_rendering(text, n + 2); }

int count_in_flight(const SystemState& s, MessageKind kind) {
  int count = 0;
  for (Pid pid = 0; pid < s.size(); ++pid) {
    for (const Message& m : s.queue(pid).items()) count += m.kind == kind;
  }
  return count;
}

}  // namespace

TEST_CASE("initial state has every bit clear and every queue empty") {
  CHECK(render(b::initial_state({.n = 3})) == "(PS[0,0,0,[]],PS[0,0,0,[]],PS[0,0,0,[]])");
  CHECK(render(b::initial_state({.n = 1})) == "(PS[0,0,0,[]])");
  CHECK(canonical_encode(b::initial_state({.n = 5})) == canonical_encode(b::initial_state({.n = 5})));
  CHECK_THROWS_AS(b::initial_state({.n = 0}), std::invalid_argument);
  CHECK(b::initial_state({.n = 4}).queue(0).capacity() == 6);
}

TEST_CASE("client request") {
  const b::Config cfg{.n = 3};
  const SystemState init = b::initial_state(cfg);

  SUBCASE("leader sends barrier_in to its right neighbor") {
    CHECK(b::client_request_enabled(init, 0));
    CHECK(render(b::client_request(cfg, init, 0)) ==
          "(PS[1,0,0,[]],PS[0,0,0,(barrier_in)],PS[0,0,0,[]])");
  }
  SUBCASE("a held barrier_in is forwarded when the request arrives") {
    const SystemState s = S("(PS[1,0,0,[]],PS[0,0,1,[]],PS[0,0,0,[]])");
    CHECK(render(b::client_request(cfg, s, 1)) == "(PS[1,0,0,[]],PS[1,0,0,[]],PS[0,0,0,(barrier_in)])");
  }
  SUBCASE("non-leader without a held message only records the request") {
    CHECK(render(b::client_request(cfg, init, 2)) == "(PS[0,0,0,[]],PS[0,0,0,[]],PS[1,0,0,[]])");
  }
  SUBCASE("the request is handled once") {
    CHECK_FALSE(b::client_request_enabled(S("(PS[1,0,0,[]],PS[0,0,0,[]],PS[0,0,0,[]])"), 0));
  }
  SUBCASE("single manager sends to itself") {
    const b::Config one{.n = 1};
    CHECK(render(b::client_request(one, b::initial_state(one), 0)) == "(PS[1,0,0,(barrier_in)])");
  }
}

TEST_CASE("barrier_in at a non-leader") {
  const b::Config cfg{.n = 3};
  SUBCASE("forwarded when the client already asked") {
    const SystemState s = S("(PS[1,0,0,[]],PS[1,0,0,(barrier_in)],PS[0,0,0,[]])");
    REQUIRE(b::barrier_in_nonleader_enabled(s, 1));
    CHECK(render(b::barrier_in_nonleader(cfg, s, 1)) ==
          "(PS[1,0,0,[]],PS[1,0,0,[]],PS[0,0,0,(barrier_in)])");
  }
  SUBCASE("held otherwise") {
    const SystemState s = S("(PS[1,0,0,[]],PS[0,0,0,(barrier_in)],PS[0,0,0,[]])");
    CHECK(render(b::barrier_in_nonleader(cfg, s, 1)) == "(PS[1,0,0,[]],PS[0,0,1,[]],PS[0,0,0,[]])");
  }
  SUBCASE("the last manager wraps to the leader") {
    const SystemState s = S("(PS[1,0,0,[]],PS[1,0,0,[]],PS[1,0,0,(barrier_in)])");
    CHECK(render(b::barrier_in_nonleader(cfg, s, 2)) == "(PS[1,0,0,(barrier_in)],PS[1,0,0,[]],PS[1,0,0,[]])");
  }
  SUBCASE("not enabled at the leader") {
    CHECK_FALSE(b::barrier_in_nonleader_enabled(S("(PS[1,0,0,(barrier_in)],PS[1,0,0,[]],PS[1,0,0,[]])"), 0));
  }
  SUBCASE("seeded mutation releases the client on forward") {
    const b::Config bug{.n = 3, .mutation = b::Mutation::kReleaseOnBarrierIn};
    const SystemState s = S("(PS[1,0,0,[]],PS[1,0,0,(barrier_in)],PS[0,0,0,[]])");
    const SystemState t = b::barrier_in_nonleader(bug, s, 1);
    CHECK(render(t) == "(PS[1,0,0,[]],PS[1,1,0,[]],PS[0,0,0,(barrier_in)])");
    CHECK_FALSE(b::invariant(t));
    const SystemState held = S("(PS[1,0,0,[]],PS[0,0,0,(barrier_in)],PS[0,0,0,[]])");
    CHECK(render(b::barrier_in_nonleader(bug, held, 1)) == "(PS[1,0,0,[]],PS[0,1,1,[]],PS[0,0,0,[]])");
  }
}

TEST_CASE("barrier_in back at the leader starts barrier_out") {
  const SystemState s = S("(PS[1,0,0,(barrier_in)],PS[1,0,0,[]],PS[1,0,0,[]])");
  REQUIRE(b::barrier_in_leader_enabled(s, 0));
  CHECK_FALSE(b::barrier_in_leader_enabled(s, 1));
  CHECK(render(b::barrier_in_leader({.n = 3}, s, 0)) == "(PS[1,0,0,[]],PS[1,0,0,(barrier_out)],PS[1,0,0,[]])");
  CHECK(render(b::barrier_in_leader({.n = 3, .variant = b::Variant::kLeaderFirst}, s, 0)) ==
        "(PS[1,1,0,[]],PS[1,0,0,(barrier_out)],PS[1,0,0,[]])");
  const b::Config one{.n = 1};
  CHECK(render(b::barrier_in_leader(one, S("(PS[1,0,0,(barrier_in)])", 1), 0)) == "(PS[1,0,0,(barrier_out)])");
}

TEST_CASE("barrier_out handling") {
  const b::Config cfg{.n = 3};
  SUBCASE("leader consumes the returning barrier_out and releases last") {
    const SystemState s = S("(PS[1,0,0,(barrier_out)],PS[1,1,0,[]],PS[1,1,0,[]])");
    REQUIRE(b::barrier_out_enabled(s, 0));
    CHECK(render(b::barrier_out(cfg, s, 0)) == "(PS[1,1,0,[]],PS[1,1,0,[]],PS[1,1,0,[]])");
  }
  SUBCASE("non-leader releases and forwards") {
    const SystemState s = S("(PS[1,0,0,[]],PS[1,0,0,(barrier_out)],PS[1,0,0,[]])");
    CHECK(render(b::barrier_out(cfg, s, 1)) == "(PS[1,0,0,[]],PS[1,1,0,[]],PS[1,0,0,(barrier_out)])");
  }
  SUBCASE("leader-first leader only consumes") {
    const SystemState s = S("(PS[1,1,0,(barrier_out)],PS[1,1,0,[]],PS[1,1,0,[]])");
    CHECK(render(b::barrier_out({.n = 3, .variant = b::Variant::kLeaderFirst}, s, 0)) ==
          "(PS[1,1,0,[]],PS[1,1,0,[]],PS[1,1,0,[]])");
  }
  SUBCASE("single manager") {
    CHECK(render(b::barrier_out({.n = 1}, S("(PS[1,0,0,(barrier_out)])", 1), 0)) == "(PS[1,1,0,[]])");
  }
}

TEST_CASE("invariant and postcondition predicates") {
  CHECK(b::invariant(b::initial_state({.n = 3})));
  CHECK_FALSE(b::invariant(S("(PS[1,1,0,[]],PS[0,0,0,[]])", 2)));
  CHECK(b::invariant(S("(PS[1,1,0,[]],PS[1,0,0,[]])", 2)));

  CHECK(b::postcondition(S("(PS[1,1,0,[]],PS[1,1,0,[]],PS[1,1,0,[]])")));
  CHECK_FALSE(b::postcondition(S("(PS[1,1,0,(barrier_out)],PS[1,1,0,[]],PS[1,1,0,[]])")));
  CHECK_FALSE(b::postcondition(S("(PS[1,1,0,[]],PS[1,0,0,[]],PS[1,1,0,[]])")));
}

TEST_CASE("reachable-state properties for n <= 4") {
  for (std::size_t n = 1; n <= 4; ++n) {
    for (auto variant : {b::Variant::kLeaderLast, b::Variant::kLeaderFirst}) {
      CAPTURE(n);
      const auto model = b::make_model({.n = n, .variant = variant});
      const auto all = oracle::enumerate(model);
      REQUIRE(all.terminals.size() == 1);
      CHECK(b::postcondition(all.states[all.terminals[0]]));

      for (std::size_t i = 0; i < all.states.size(); ++i) {
        const SystemState& s = all.states[i];
        CHECK(b::invariant(s));

        // A single token circulates: barrier_in is either not yet emitted,
        // queued, or held; barrier_out is queued at most once.
        int holding = 0;
        for (Pid pid = 0; pid < n; ++pid) holding += s.barrier(pid).holding_barrier_in;
        const int not_emitted = s.barrier(0).client_barrier_in ? 0 : 1;
        CHECK(count_in_flight(s, MessageKind::kBarrierIn) + holding + not_emitted <= 1);
        CHECK(count_in_flight(s, MessageKind::kBarrierOut) <= 1);

        for (Pid pid = 0; pid < n; ++pid) {
          const auto& p = s.barrier(pid);
          CHECK((!p.holding_barrier_in || !p.client_barrier_in));
          CHECK((!p.client_barrier_out || p.client_barrier_in));
          if (variant == b::Variant::kLeaderLast && s.barrier(0).client_barrier_out)
            CHECK(p.client_barrier_out);
        }

        // Bits never go from 1 back to 0 along any transition.
        for (std::size_t j : all.successors[i]) {
          for (Pid pid = 0; pid < n; ++pid) {
            const auto& before = s.barrier(pid);
            const auto& after = all.states[j].barrier(pid);
            CHECK((!before.client_barrier_in || after.client_barrier_in));
            CHECK((!before.client_barrier_out || after.client_barrier_out));
          }
        }
      }
    }
  }
}

TEST_CASE("single manager reaches four states") {
  const auto all = oracle::enumerate(b::make_model({.n = 1}));
  CHECK(all.states.size() == 4);
}
