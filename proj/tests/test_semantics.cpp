#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "epiveri/diag.hpp"
#include "epiveri/oracle.hpp"
#include "epiveri/runs.hpp"
#include "testutil.hpp"

using namespace epiveri;
using namespace epiveri::testutil;

namespace {

// Two variables x (0) and y (1), one agent observing x, no init.
CheckedSystem tiny_system(int horizon) {
  CheckedSystem sys;
  sys.filename = "<tiny>";
  sys.var_names = {"x", "y"};
  sys.var_index = {{"x", 0}, {"y", 1}};
  sys.horizon = horizon;
  AgentInfo a;
  a.name = "A";
  a.protocol = "tiny";
  a.actions.assign(horizon, {});
  a.observable = {0};
  sys.agents.push_back(a);
  CheckedSpec spec;
  spec.keyword = "spec_spr";
  spec.time = horizon;
  spec.body = CFormula::atom(0);
  sys.specs.push_back(spec);
  return sys;
}

CStmt assign(int target, CExprPtr value) {
  CStmt st;
  st.target = target;
  st.value = std::move(value);
  return st;
}

CStmt rand_stmt(int target) {
  CStmt st;
  st.is_rand = true;
  st.target = target;
  return st;
}

}  // namespace

TEST_CASE("statements in a block thread sequentially") {
  State s{0, 0};
  std::vector<CStmt> code{
      assign(0, CExpr::constant(true)),
      assign(1, CExpr::variable(0)),
  };
  auto out = exec_code(s, code);
  REQUIRE(out.size() == 1);
  CHECK(out[0] == State{1, 1});
}

TEST_CASE("rand branches and deduplicates") {
  State s{0, 0};
  auto two = exec_code(s, {rand_stmt(0)});
  CHECK(two.size() == 2);
  CHECK(std::is_sorted(two.begin(), two.end()));
  // A second rand on the same target collapses back to two branches.
  auto still_two = exec_code(s, {rand_stmt(0), rand_stmt(0)});
  CHECK(still_two.size() == 2);
  auto four = exec_code(s, {rand_stmt(0), rand_stmt(1)});
  CHECK(four.size() == 4);
  // The branch value is readable by later statements.
  auto copied = exec_code(s, {rand_stmt(0), assign(1, CExpr::variable(0))});
  REQUIRE(copied.size() == 2);
  CHECK(copied[0] == State{0, 0});
  CHECK(copied[1] == State{1, 1});
}

TEST_CASE("a tick runs agents in declared order, then the environment") {
  CheckedSystem sys = tiny_system(1);
  sys.var_names.push_back("z");
  sys.var_index["z"] = 2;
  AgentInfo b;
  b.name = "B";
  b.protocol = "tiny";
  b.actions.assign(1, {});
  sys.agents.push_back(b);
  sys.agents[0].actions[0] = {assign(0, CExpr::constant(true))};
  sys.agents[1].actions[0] = {assign(1, CExpr::variable(0))};
  sys.env = {assign(2, CExpr::variable(1))};

  auto stmts = sys.tick_statements(0);
  REQUIRE(stmts.size() == 3);
  CHECK(stmts[0].target == 0);
  CHECK(stmts[2].target == 2);

  auto out = tick(State{0, 0, 0}, 0, sys);
  REQUIRE(out.size() == 1);
  CHECK(out[0] == State{1, 1, 1});
}

TEST_CASE("initial states enumerate the satisfying assignments") {
  CheckedSystem sys = tiny_system(1);
  SUBCASE("no initial condition leaves everything free") {
    auto states = initial_states(sys);
    CHECK(states.size() == 4);
    CHECK(count_initial_states(sys) == 4);
    CHECK(std::is_sorted(states.begin(), states.end()));
  }
  SUBCASE("a condition prunes and unmentioned variables stay free") {
    sys.init = CExpr::binary(BoolOp::Or, CExpr::variable(0),
                             CExpr::variable(0));
    sys.init_vars = {0};
    auto states = initial_states(sys);
    REQUIRE(states.size() == 2);
    CHECK(states[0] == State{1, 0});
    CHECK(states[1] == State{1, 1});
    auto rows = init_assignments(sys);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0] ==
          std::vector<std::pair<int, uint8_t>>{{0, uint8_t{1}}});
  }
  SUBCASE("an unsatisfiable condition is an error") {
    sys.init = CExpr::binary(BoolOp::And, CExpr::variable(0),
                             CExpr::negate(CExpr::variable(0)));
    sys.init_vars = {0};
    CHECK_THROWS_AS((void)initial_states(sys), Error);
    try {
      (void)count_initial_states(sys);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::UnsatisfiableInit);
    }
  }
  SUBCASE("the explosion guard trips on too many states") {
    RunLimits limits;
    limits.max_initial_states = 2;
    try {
      (void)initial_states(sys, limits);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ExplosionGuard);
    }
  }
}

TEST_CASE("counting initial states matches enumerating them") {
  std::mt19937_64 rng(test_seed());
  for (int i = 0; i < 200; ++i) {
    CheckedSystem sys = random_system(rng);
    uint64_t counted = 0;
    size_t listed = 0;
    bool count_unsat = false;
    bool list_unsat = false;
    try {
      counted = count_initial_states(sys);
    } catch (const Error& e) {
      REQUIRE(e.kind() == ErrorKind::UnsatisfiableInit);
      count_unsat = true;
    }
    try {
      listed = initial_states(sys).size();
    } catch (const Error& e) {
      REQUIRE(e.kind() == ErrorKind::UnsatisfiableInit);
      list_unsat = true;
    }
    REQUIRE(count_unsat == list_unsat);
    if (!count_unsat) REQUIRE(counted == listed);
  }
}

TEST_CASE("runs of the dining cryptographers") {
  CheckedSystem sys = load_data("dc3.mck");
  CHECK(count_initial_states(sys) == 16384);
  auto runs = generate_runs(sys, 3);
  CHECK(runs.size() == 16384);
  for (const auto& r : runs) REQUIRE(r.size() == 4);
  CHECK(std::is_sorted(runs.begin(), runs.end()));
  // Deterministic protocols: distinct runs extend distinct initial states.
  auto init = initial_states(sys);
  for (size_t i = 0; i < runs.size(); ++i) CHECK(runs[i][0] == init[i]);
}

TEST_CASE("lane evaluation agrees with scalar evaluation") {
  std::mt19937_64 rng(test_seed() ^ 0x5eedULL);
  for (int round = 0; round < 100; ++round) {
    int nv = 1 + static_cast<int>(rng() % 4);
    CExprPtr e = random_cexpr(rng, nv, 3);
    std::vector<uint64_t> lanes(nv);
    for (auto& w : lanes) w = rng();
    uint64_t got = e->eval_lanes(lanes.data());
    for (int lane = 0; lane < 64; ++lane) {
      State s(nv);
      for (int v = 0; v < nv; ++v) s[v] = (lanes[v] >> lane) & 1;
      uint64_t want = e->eval_bool(s.data()) ? 1 : 0;
      REQUIRE(((got >> lane) & 1) == want);
    }
  }
}

TEST_CASE("bit matrix transposition") {
  // Bit j of word i lands in bit 63-i of word 63-j: a transpose with the
  // columns numbered from the most significant bit.
  uint64_t a[64] = {0};
  a[3] = uint64_t{1} << 7;
  a[60] = (uint64_t{1} << 5) | (uint64_t{1} << 63);
  transpose64(a);
  CHECK(a[56] == uint64_t{1} << 60);
  CHECK(a[58] == uint64_t{1} << 3);
  CHECK(a[0] == uint64_t{1} << 3);
  CHECK(a[3] == 0);

  std::mt19937_64 rng(test_seed() ^ 0x7ea5ULL);
  uint64_t m[64], copy[64];
  for (int i = 0; i < 64; ++i) copy[i] = m[i] = rng();
  transpose64(m);
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j)
      REQUIRE(((m[63 - j] >> (63 - i)) & 1) == ((copy[i] >> j) & 1));
  transpose64(m);
  for (int i = 0; i < 64; ++i) REQUIRE(m[i] == copy[i]);
}

TEST_CASE("oracle worlds are the timed copies of the runs") {
  CheckedSystem sys = load_data("msg3.mck");
  Evs e = oracle_evs(sys, 4);
  CHECK(e.vars.size() == sys.var_names.size() * 5);
  CHECK(e.vars[0] == "delay[0]@0");
  CHECK(e.agents == std::vector<std::string>{"Alice", "Bob"});
  CHECK(e.worlds.size() == 16);
  // Bob observes every timed copy of inB and rcdB.
  REQUIRE(e.obs.size() == 2);
  CHECK(e.obs[1].size() == 10);
  // Alice observes nothing in the one-time pad protocol.
  Evs otp = oracle_evs(load_data("otp3.mck"), 6);
  CHECK(otp.obs[0].empty());
}

TEST_CASE("streamed and materialized oracle agree") {
  OracleOptions forced;
  forced.force_materialize = true;
  for (const char* name : {"dc3.mck", "otp3.mck", "msg3.mck"}) {
    CAPTURE(name);
    CheckedSystem sys = load_data(name);
    for (const auto& spec : sys.specs) {
      OracleResult fast = oracle_check(sys, spec);
      OracleResult slow = oracle_check(sys, spec, forced);
      CHECK(fast.streamed);
      CHECK_FALSE(slow.streamed);
      CHECK(fast.holds == slow.holds);
      CHECK(fast.worlds == slow.worlds);
    }
  }
}
