#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "epiveri/diag.hpp"
#include "epiveri/structured.hpp"
#include "testutil.hpp"

using namespace epiveri;
using namespace epiveri::testutil;

namespace {

Digraph graph(int n, const std::vector<std::pair<int, int>>& edges) {
  Digraph g;
  for (int i = 0; i < n; ++i) g.add_vertex(std::string(1, char('a' + i)));
  for (auto [u, v] : edges) g.add_edge(u, v);
  return g;
}

// Every nonempty proper subset of w, via bitmasks.
std::vector<std::vector<int>> proper_subsets(const std::vector<int>& w) {
  std::vector<std::vector<int>> out;
  for (uint32_t mask = 0; mask + 1 < (1u << w.size()); ++mask) {
    std::vector<int> sub;
    for (size_t i = 0; i < w.size(); ++i)
      if (mask & (1u << i)) sub.push_back(w[i]);
    out.push_back(sub);
  }
  return out;
}

std::vector<int> minus(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

std::vector<int> cap(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

// The strengthened blocker conditions for u against (k, o).
bool blocks(const Digraph& g, const std::vector<int>& k,
            const std::vector<int>& o, const std::vector<int>& u) {
  if (cap(k, o) != cap(cap(k, o), u)) return false;
  return d_separated(g, minus(k, u), minus(o, u), u);
}

}  // namespace

TEST_CASE("indexed names order by base then numeric index") {
  CHECK(indexed_less("v", "v^0"));
  CHECK(indexed_less("v^0", "v^2"));
  CHECK(indexed_less("v^2", "v^10"));
  CHECK_FALSE(indexed_less("v^10", "v^2"));
  CHECK(indexed_less("a^5", "b^0"));
  CHECK(indexed_less("paid[0]^1", "paid[1]^0"));
  std::vector<std::string> names{"x^10", "x", "w^3", "x^2"};
  std::sort(names.begin(), names.end(), indexed_less);
  CHECK(names == std::vector<std::string>{"w^3", "x", "x^2", "x^10"});
}

TEST_CASE("digraph bookkeeping") {
  Digraph g = graph(3, {{0, 1}, {1, 2}});
  CHECK(g.size() == 3);
  CHECK(g.vertex("b") == 1);
  CHECK(g.has_vertex("c"));
  CHECK_FALSE(g.has_vertex("z"));
  CHECK(g.has_edge(0, 1));
  CHECK_FALSE(g.has_edge(1, 0));
  CHECK(g.parents[2] == std::vector<int>{1});
  CHECK(g.children[0] == std::vector<int>{1});
}

TEST_CASE("ancestor closure") {
  Digraph g = graph(4, {{0, 1}, {1, 2}, {3, 2}});
  CHECK(ancestors(g, {2}) == std::vector<int>{0, 1, 2, 3});
  CHECK(ancestors(g, {1}) == std::vector<int>{0, 1});
  CHECK(ancestors(g, {0}) == std::vector<int>{0});
  CHECK(ancestors(g, {}).empty());
}

TEST_CASE("moralization marries parents") {
  Digraph g = graph(3, {{0, 2}, {1, 2}});
  UGraph m = moralize(g);
  CHECK(m[0] == std::vector<int>{1, 2});
  CHECK(m[1] == std::vector<int>{0, 2});
  CHECK(m[2] == std::vector<int>{0, 1});
}

TEST_CASE("d-separation on the textbook small graphs") {
  // Chain a -> b -> c.
  Digraph chain = graph(3, {{0, 1}, {1, 2}});
  CHECK(d_separated(chain, {0}, {2}, {1}));
  CHECK_FALSE(d_separated(chain, {0}, {2}, {}));

  // Fork a <- b -> c.
  Digraph fork = graph(3, {{1, 0}, {1, 2}});
  CHECK(d_separated(fork, {0}, {2}, {1}));
  CHECK_FALSE(d_separated(fork, {0}, {2}, {}));

  // Collider a -> c <- b with descendant c -> d.
  Digraph coll = graph(4, {{0, 2}, {1, 2}, {2, 3}});
  CHECK(d_separated(coll, {0}, {1}, {}));
  CHECK_FALSE(d_separated(coll, {0}, {1}, {2}));
  CHECK_FALSE(d_separated(coll, {0}, {1}, {3}));
  CHECK(d_separated(coll, {0}, {1}, {}));

  try {
    (void)d_separated(chain, {0, 1}, {1}, {});
    FAIL("expected a disjointness error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonDisjointSets);
  }
}

TEST_CASE("query form tolerates overlapping sets") {
  Digraph chain = graph(3, {{0, 1}, {1, 2}});
  // A shared vertex connects trivially.
  CHECK_FALSE(d_separated_query(chain, {0}, {0}, {}));
  CHECK_FALSE(d_separated_query(chain, {0, 2}, {2}, {1}));
  // Conditioning vertices drop out of both sides first.
  CHECK(d_separated_query(chain, {0, 1}, {2, 1}, {1}));
  CHECK(d_separated_query(chain, {0}, {}, {}));
}

TEST_CASE("minimal blockers on a chain") {
  Digraph chain = graph(4, {{0, 1}, {1, 2}, {2, 3}});
  // k = {a}, o = {c, d}: the first observed vertex on the path blocks.
  CHECK(minimal_blocker(chain, {0}, {2, 3}) == std::vector<int>{2});
  // Observing the formula variable itself keeps it in the blocker.
  CHECK(minimal_blocker(chain, {0, 2}, {2, 3}) == std::vector<int>{2});
  // Nothing to block when the observation set is empty.
  CHECK(minimal_blocker(chain, {0}, {}).empty());
}

TEST_CASE("minimal blockers satisfy the conditions and are minimal") {
  std::mt19937_64 rng(test_seed());
  for (int round = 0; round < 150; ++round) {
    int n = 3 + static_cast<int>(rng() % 4);
    StructuredModel m = random_structured(rng, n);
    std::vector<int> k, o;
    for (int v = 0; v < n; ++v) {
      if (rng() % 3 == 0) k.push_back(v);
      if (rng() & 1) o.push_back(v);
    }
    if (k.empty()) k.push_back(static_cast<int>(rng() % n));
    std::vector<int> w = minimal_blocker(m.g, k, o);
    REQUIRE(cap(w, o) == w);
    REQUIRE(blocks(m.g, k, o, w));
    for (const auto& sub : proper_subsets(w)) REQUIRE_FALSE(blocks(m.g, k, o, sub));
  }
}

TEST_CASE("relevance of plain formulas is their atom set") {
  Digraph chain = graph(4, {{0, 1}, {1, 2}, {2, 3}});
  std::vector<std::vector<int>> obs{{2, 3}};
  CFormulaPtr plain = CFormula::binary(BoolOp::And, CFormula::atom(0),
                                       CFormula::negate(CFormula::atom(1)));
  CHECK(relevance(chain, obs, plain) == std::vector<int>{0, 1});
  // A Knows adds the agent's minimal blocker.
  CFormulaPtr knows = CFormula::knows(0, CFormula::atom(0));
  CHECK(relevance(chain, obs, knows) == std::vector<int>{0, 2});
  CFormulaPtr both = CFormula::binary(BoolOp::Or, knows, CFormula::atom(3));
  CHECK(relevance(chain, obs, both) == std::vector<int>{0, 2, 3});
}

TEST_CASE("removable leaves peel from the outside in") {
  Digraph chain = graph(3, {{0, 1}, {1, 2}});
  CHECK(removable_leaves(chain, {0}) == std::vector<int>{2, 1});
  CHECK(removable_leaves(chain, {1}) == std::vector<int>{2});
  CHECK(removable_leaves(chain, {0, 1, 2}).empty());

  // Interior vertices with surviving children stay.
  Digraph diamond = graph(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  CHECK(removable_leaves(diamond, {3}).empty());
  CHECK(removable_leaves(diamond, {1}) == std::vector<int>{3, 2});

  std::mt19937_64 rng(test_seed() ^ 0x1eafULL);
  for (int round = 0; round < 100; ++round) {
    int n = 3 + static_cast<int>(rng() % 4);
    StructuredModel m = random_structured(rng, n);
    std::vector<int> keep;
    for (int v = 0; v < n; ++v)
      if (rng() & 1) keep.push_back(v);
    std::vector<int> order = removable_leaves(m.g, keep);
    std::vector<uint8_t> gone(n, 0);
    for (int v : order) {
      REQUIRE_FALSE(std::binary_search(keep.begin(), keep.end(), v));
      REQUIRE_FALSE(gone[v]);
      for (int c : m.g.children[v]) REQUIRE(gone[c]);
      gone[v] = 1;
    }
    // Exhaustive: nothing outside keep with all children gone remains.
    for (int v = 0; v < n; ++v) {
      if (gone[v] || std::binary_search(keep.begin(), keep.end(), v)) continue;
      bool childless = true;
      for (int c : m.g.children[v]) childless = childless && gone[c];
      REQUIRE_FALSE(childless);
    }
  }
}

TEST_CASE("structured models validate and join") {
  std::mt19937_64 rng(test_seed() ^ 0xda6ULL);
  for (int round = 0; round < 50; ++round) {
    StructuredModel m = random_structured(rng, 4);
    std::string why;
    REQUIRE(validate_structured(m, &why));
    Relation j = joint(m);
    CHECK(j.vars.size() == 4);
    CHECK_FALSE(j.rows.empty());
  }

  // Constraining a parent breaks validation.
  StructuredModel m = random_structured(rng, 3);
  int child = -1;
  for (int v = 0; v < 3; ++v)
    if (!m.g.parents[v].empty()) child = v;
  if (child >= 0 && m.node[child].rows.size() > 1) {
    m.node[child].rows.pop_back();
    std::string why;
    bool ok = validate_structured(m, &why);
    if (!ok) CHECK(why.find("v") != std::string::npos);
  }
}

TEST_CASE("leaf elimination preserves the marginal joint") {
  std::mt19937_64 rng(test_seed() ^ 0x7ee1ULL);
  for (int round = 0; round < 60; ++round) {
    int n = 3 + static_cast<int>(rng() % 3);
    StructuredModel m = random_structured(rng, n);
    std::vector<int> x;
    for (int v = 0; v < n; ++v)
      if (rng() & 1) x.push_back(v);
    if (x.empty()) x.push_back(0);
    std::vector<std::string> xnames;
    for (int v : x) xnames.push_back(m.g.names[v]);
    std::sort(xnames.begin(), xnames.end());

    StructuredModel lean = leaf_eliminate(m, x);
    std::string why;
    REQUIRE(validate_structured(lean, &why));
    for (const auto& name : xnames) REQUIRE(lean.g.has_vertex(name));
    REQUIRE(marginalize(joint(lean), xnames) == marginalize(joint(m), xnames));
  }
}

TEST_CASE("equality renaming collapses pure copies") {
  // a free, b a pure copy of a, c computed from b.
  StructuredModel m;
  m.g.add_vertex("a");
  m.g.add_vertex("b");
  m.g.add_vertex("c");
  m.g.add_edge(0, 1);
  m.g.add_edge(1, 2);
  Frames frames{{"a", 2}, {"b", 2}, {"c", 2}};
  m.node.resize(3);
  m.node[0].vars = {"a"};
  m.node[0].frame = frames;
  m.node[0].rows = {{0}, {1}};
  m.node[1].vars = {"a", "b"};
  m.node[1].frame = frames;
  m.node[1].rows = {{0, 0}, {1, 1}};
  m.node[2].vars = {"b", "c"};
  m.node[2].frame = frames;
  m.node[2].rows = {{0, 1}, {1, 0}};
  std::string why;
  REQUIRE(validate_structured(m, &why));

  StructuredModel merged = rename_equality(m, 0, 1);
  REQUIRE(validate_structured(merged, &why));
  CHECK(merged.g.size() == 2);
  CHECK(merged.g.has_vertex("b"));
  CHECK(merged.g.has_vertex("c"));
  CHECK_FALSE(merged.g.has_vertex("a"));
  CHECK(joint(merged) == marginalize(joint(m), {"b", "c"}));

  // A non-copy relation refuses to merge.
  StructuredModel bad = m;
  bad.node[1].rows = {{0, 1}, {1, 0}};
  try {
    (void)rename_equality(bad, 0, 1);
    FAIL("expected a precondition violation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PreconditionViolated);
  }
}

TEST_CASE("d-separation is sound for the joint relation") {
  std::mt19937_64 rng(test_seed() ^ 0xd5e9ULL);
  for (int round = 0; round < 50; ++round) {
    StructuredModel m = random_structured(rng, 4);
    Relation j = joint(m);
    for (uint32_t code = 0; code < 81; ++code) {
      uint32_t c = code;
      std::vector<int> x, y, z;
      std::vector<std::string> xn, yn, zn;
      for (int v = 0; v < 4; ++v, c /= 3) {
        switch (c % 3) {
          case 0: break;
          case 1: x.push_back(v); xn.push_back(m.g.names[v]); break;
          case 2: y.push_back(v); yn.push_back(m.g.names[v]); break;
        }
      }
      if (x.empty() || y.empty()) continue;
      // Move a random tail of the unused vertices into z.
      for (int v = 0; v < 4; ++v)
        if (!std::binary_search(x.begin(), x.end(), v) &&
            !std::binary_search(y.begin(), y.end(), v) && (rng() & 1)) {
          z.push_back(v);
          zn.push_back(m.g.names[v]);
        }
      if (d_separated(m.g, x, y, z)) REQUIRE(check_ci(j, xn, yn, zn));
    }
  }
}

TEST_CASE("DOT output boxes the marked vertices") {
  Digraph g = graph(3, {{0, 1}, {1, 2}});
  std::string dot = dot_directed(g, {1});
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("\"b\" [shape=box]") != std::string::npos);
  CHECK(dot.find("\"a\" -> \"b\"") != std::string::npos);
  std::string moral = dot_moralized(graph(3, {{0, 2}, {1, 2}}), {});
  CHECK(moral.find("graph") != std::string::npos);
  CHECK(moral.find("\"a\" -- \"b\"") != std::string::npos);
}
