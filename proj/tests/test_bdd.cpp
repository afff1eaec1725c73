#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "epiveri/bdd.hpp"
#include "epiveri/checker.hpp"
#include "epiveri/diag.hpp"
#include "testutil.hpp"

using namespace epiveri;
using namespace epiveri::testutil;

namespace {

const std::vector<std::string> kNames{"a", "b", "c", "d", "e"};

BddRef build(BddManager& mgr, const CExprPtr& e) {
  switch (e->kind) {
    case CExpr::Kind::Const:
      return mgr.constant(e->cval);
    case CExpr::Kind::Var:
      return mgr.var(kNames[static_cast<size_t>(e->var)]);
    case CExpr::Kind::Not:
      return mgr.negate(build(mgr, e->lhs));
    case CExpr::Kind::Bin:
      return mgr.apply(e->op, build(mgr, e->lhs), build(mgr, e->rhs));
  }
  return mgr.constant(false);
}

// f's value at the point encoded by bits, bit i giving kNames[i].
bool eval_at(BddManager& mgr, BddRef f, int nv, uint32_t bits) {
  BddRef point = mgr.constant(true);
  for (int i = 0; i < nv; ++i) {
    BddRef lit = mgr.var(kNames[static_cast<size_t>(i)]);
    if (!((bits >> i) & 1)) lit = mgr.negate(lit);
    point = mgr.apply(BoolOp::And, point, lit);
  }
  return mgr.apply(BoolOp::And, f, point) != mgr.constant(false);
}

std::vector<bool> truth_table(BddManager& mgr, BddRef f, int nv) {
  std::vector<bool> out;
  for (uint32_t bits = 0; bits < (1u << nv); ++bits)
    out.push_back(eval_at(mgr, f, nv, bits));
  return out;
}

std::vector<bool> brute_table(const CExprPtr& e, int nv) {
  std::vector<bool> out;
  for (uint32_t bits = 0; bits < (1u << nv); ++bits) {
    uint8_t point[8] = {};
    for (int i = 0; i < nv; ++i) point[i] = (bits >> i) & 1;
    out.push_back(e->eval_bool(point));
  }
  return out;
}

}  // namespace

TEST_CASE("variables and constants are canonical") {
  BddManager mgr(kNames);
  CHECK(mgr.num_vars() == 5);
  CHECK(mgr.var_name(2) == "c");
  CHECK(mgr.level_of("d") == 3);
  CHECK(mgr.has_var("e"));
  CHECK_FALSE(mgr.has_var("z"));
  CHECK(mgr.constant(true) == mgr.constant(true));
  CHECK(mgr.constant(true) != mgr.constant(false));
  CHECK(mgr.var("a") == mgr.var("a"));
  CHECK(mgr.var("a") != mgr.var("b"));

  try {
    BddManager dup({"a", "b", "a"});
    FAIL("expected a duplicate-name error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DuplicateName);
  }
  try {
    (void)mgr.var("nosuch");
    FAIL("expected an unknown-variable error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownVariable);
  }
}

TEST_CASE("refs from different managers refuse to mix") {
  BddManager one(kNames);
  BddManager two(kNames);
  try {
    (void)one.apply(BoolOp::And, one.constant(true), two.constant(true));
    FAIL("expected a manager-mismatch error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ManagerMismatch);
  }
}

TEST_CASE("apply matches brute-force truth tables") {
  std::mt19937_64 rng(test_seed() ^ 0xbddULL);
  for (int round = 0; round < 300; ++round) {
    int nv = 2 + static_cast<int>(rng() % 4);
    BddManager mgr(kNames);
    CExprPtr x = random_cexpr(rng, nv, 5);
    CExprPtr y = random_cexpr(rng, nv, 5);
    BddRef fx = build(mgr, x);
    BddRef fy = build(mgr, y);
    REQUIRE(truth_table(mgr, fx, nv) == brute_table(x, nv));
    // Equal functions share one node, different functions never do.
    CHECK((fx == fy) == (brute_table(x, nv) == brute_table(y, nv)));
    // Double negation is the identity on canonical refs.
    CHECK(mgr.negate(mgr.negate(fx)) == fx);
    mgr.audit();
  }
}

TEST_CASE("quantification matches the brute-force disjunction") {
  std::mt19937_64 rng(test_seed() ^ 0xe715ULL);
  for (int round = 0; round < 200; ++round) {
    int nv = 3 + static_cast<int>(rng() % 3);
    BddManager mgr(kNames);
    CExprPtr x = random_cexpr(rng, nv, 5);
    CExprPtr y = random_cexpr(rng, nv, 4);
    BddRef fx = build(mgr, x);
    BddRef fy = build(mgr, y);
    std::vector<std::string> set;
    uint32_t mask = static_cast<uint32_t>(rng()) & ((1u << nv) - 1);
    for (int i = 0; i < nv; ++i)
      if ((mask >> i) & 1) set.push_back(kNames[static_cast<size_t>(i)]);

    BddRef ex = mgr.exists(fx, set);
    auto table = brute_table(x, nv);
    for (uint32_t bits = 0; bits < (1u << nv); ++bits) {
      bool want = false;
      // All ways of rewriting the quantified bits.
      for (uint32_t sub = mask;; sub = (sub - 1) & mask) {
        want = want || table[(bits & ~mask) | sub];
        if (sub == 0) break;
      }
      REQUIRE(eval_at(mgr, ex, nv, bits) == want);
    }
    for (const auto& name : set) {
      auto sup = mgr.support(ex);
      CHECK_FALSE(std::count(sup.begin(), sup.end(), name));
    }
    // The fused form agrees with quantifying the plain conjunction.
    CHECK(mgr.and_exists(fx, fy, set) ==
          mgr.exists(mgr.apply(BoolOp::And, fx, fy), set));
    mgr.audit();
  }
}

TEST_CASE("support reports exactly the essential variables") {
  std::mt19937_64 rng(test_seed() ^ 0x50bULL);
  for (int round = 0; round < 100; ++round) {
    int nv = 2 + static_cast<int>(rng() % 4);
    BddManager mgr(kNames);
    CExprPtr x = random_cexpr(rng, nv, 5);
    BddRef fx = build(mgr, x);
    auto table = brute_table(x, nv);
    std::vector<std::string> want;
    for (int i = 0; i < nv; ++i) {
      bool depends = false;
      for (uint32_t bits = 0; bits < (1u << nv); ++bits)
        depends = depends || (table[bits] != table[bits ^ (1u << i)]);
      if (depends) want.push_back(kNames[static_cast<size_t>(i)]);
    }
    REQUIRE(mgr.support(fx) == want);
  }
}

TEST_CASE("renaming substitutes variables") {
  BddManager mgr(kNames);
  BddRef f = mgr.apply(BoolOp::Xor, mgr.var("a"), mgr.var("c"));
  BddRef g = mgr.rename(f, {{"a", "b"}, {"c", "d"}});
  CHECK(g == mgr.apply(BoolOp::Xor, mgr.var("b"), mgr.var("d")));
  // Mappings outside the support are ignored.
  CHECK(mgr.rename(f, {{"a", "b"}, {"e", "a"}}) ==
        mgr.apply(BoolOp::Xor, mgr.var("b"), mgr.var("c")));
  CHECK(mgr.rename(f, {}) == f);

  // Swapping the order of the support is rejected.
  try {
    (void)mgr.rename(f, {{"a", "e"}});
    FAIL("expected an order conflict");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OrderConflict);
  }
  // So is mapping two support variables onto one.
  try {
    (void)mgr.rename(mgr.apply(BoolOp::And, mgr.var("a"), mgr.var("b")),
                     {{"a", "c"}, {"b", "c"}});
    FAIL("expected an order conflict");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OrderConflict);
  }
}

TEST_CASE("model counting matches enumeration") {
  std::mt19937_64 rng(test_seed() ^ 0xc0de7ULL);
  for (int round = 0; round < 200; ++round) {
    int nv = 2 + static_cast<int>(rng() % 4);
    BddManager mgr(kNames);
    CExprPtr x = random_cexpr(rng, nv, 5);
    BddRef fx = build(mgr, x);
    auto table = brute_table(x, nv);
    double want = static_cast<double>(std::count(table.begin(), table.end(), true));
    std::vector<std::string> over(kNames.begin(), kNames.begin() + nv);
    REQUIRE(mgr.sat_count(fx, over) == want);
    // Widening the scope doubles the count per extra variable.
    if (nv < 5) {
      std::vector<std::string> wider(kNames.begin(), kNames.begin() + nv + 1);
      REQUIRE(mgr.sat_count(fx, wider) == 2.0 * want);
    }
  }

  BddManager mgr(kNames);
  CHECK(mgr.sat_count(mgr.constant(true), {}) == 1.0);
  CHECK(mgr.sat_count(mgr.constant(false), kNames) == 0.0);
  try {
    (void)mgr.sat_count(mgr.var("c"), {"a", "b"});
    FAIL("expected a scope error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SupportExceedsScope);
  }
}

TEST_CASE("any_sat produces a satisfying path") {
  std::mt19937_64 rng(test_seed() ^ 0xa57ULL);
  BddManager mgr(kNames);
  CHECK_FALSE(mgr.any_sat(mgr.constant(false)).has_value());
  auto empty = mgr.any_sat(mgr.constant(true));
  REQUIRE(empty.has_value());
  CHECK(empty->empty());

  for (int round = 0; round < 200; ++round) {
    int nv = 2 + static_cast<int>(rng() % 4);
    CExprPtr x = random_cexpr(rng, nv, 5);
    BddRef fx = build(mgr, x);
    auto sat = mgr.any_sat(fx);
    auto table = brute_table(x, nv);
    bool satisfiable =
        std::count(table.begin(), table.end(), true) > 0;
    REQUIRE(sat.has_value() == satisfiable);
    if (!satisfiable) continue;
    // Variables the path omits are free: any completion must satisfy f.
    uint32_t fixed = 0, value = 0;
    for (const auto& [name, bit] : *sat) {
      int level = mgr.level_of(name);
      fixed |= 1u << level;
      if (bit) value |= 1u << level;
    }
    for (uint32_t bits = 0; bits < (1u << nv); ++bits) {
      if ((bits & fixed) != value) continue;
      REQUIRE(table[bits]);
    }
  }
}

TEST_CASE("the cache can be dropped between operations") {
  BddManager mgr(kNames);
  BddRef f = mgr.apply(BoolOp::Implies, mgr.var("a"), mgr.var("b"));
  mgr.clear_cache();
  BddRef again = mgr.apply(BoolOp::Implies, mgr.var("a"), mgr.var("b"));
  CHECK(f == again);
  mgr.audit();
}

TEST_CASE("an expired deadline aborts recursive operations") {
  BddManager mgr(kNames);
  BddRef f = mgr.var("a");
  for (int i = 1; i < 5; ++i)
    f = mgr.apply(BoolOp::Xor, f, mgr.var(kNames[static_cast<size_t>(i)]));
  BddRef g = mgr.apply(BoolOp::Iff, mgr.var("b"), mgr.var("d"));
  mgr.set_deadline(std::chrono::steady_clock::now() -
                   std::chrono::milliseconds(1));
  try {
    // The deadline is polled every few thousand recursion steps; redo the
    // same conjunction with a cold cache until a poll lands.
    for (int i = 0; i < 100000; ++i) {
      mgr.clear_cache();
      (void)mgr.apply(BoolOp::And, f, g);
    }
    FAIL("expected the deadline to fire");
  } catch (const DeadlineExceeded& e) {
    CHECK_FALSE(e.where.empty());
  }
  mgr.reset_deadline();
  CHECK(mgr.apply(BoolOp::Or, f, mgr.negate(f)) == mgr.constant(true));
}

TEST_CASE("DOT output names the reachable nodes") {
  BddManager mgr(kNames);
  BddRef f = mgr.apply(BoolOp::And, mgr.var("a"), mgr.var("b"));
  std::string dot = mgr.to_dot(f);
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("a") != std::string::npos);
  CHECK(dot.find("b") != std::string::npos);
}
