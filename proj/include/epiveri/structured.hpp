#pragma once

#include <string>
#include <vector>

#include "epiveri/checker.hpp"
#include "epiveri/relation.hpp"

namespace epiveri {

// Directed graph over named vertices. Vertex names are indexed variables
// like "paid[0]^2"; deterministic output orders them by (base name, index).
struct Digraph {
  std::vector<std::string> names;
  std::unordered_map<std::string, int> index;
  std::vector<std::vector<int>> parents;
  std::vector<std::vector<int>> children;

  int size() const { return static_cast<int>(names.size()); }
  int add_vertex(const std::string& name);
  int vertex(const std::string& name) const;
  bool has_vertex(const std::string& name) const;
  void add_edge(int u, int v);
  bool has_edge(int u, int v) const;
};

// Orders "base^index" names by base, then numeric index; names without an
// index suffix come before indexed copies of the same base.
bool indexed_less(const std::string& a, const std::string& b);

// Undirected adjacency, one sorted neighbour list per vertex of the graph
// it was built from.
using UGraph = std::vector<std::vector<int>>;

// x together with every vertex that can reach x along directed edges.
std::vector<int> ancestors(const Digraph& g, const std::vector<int>& x);

// Drops edge directions and marries parents of a common child.
UGraph moralize(const Digraph& g);

// True when every path from x to y in the moralized restriction of g to
// the ancestors of x∪y∪z passes through z. The sets must be pairwise
// disjoint (NonDisjointSets otherwise).
bool d_separated(const Digraph& g, const std::vector<int>& x,
                 const std::vector<int>& y, const std::vector<int>& z);

// d-separation with the sets first made disjoint: conditioning vertices
// drop out of x and y, and a vertex left in both connects them trivially.
bool d_separated_query(const Digraph& g, const std::vector<int>& x,
                       const std::vector<int>& y, const std::vector<int>& z);

// Smallest w ⊆ o with k∩o ⊆ w such that k\w is d-separated from o\w by w:
// the o-vertices first reached from k\o in the moralized ancestral
// restriction to k∪o, together with k∩o. Sorted.
std::vector<int> minimal_blocker(const Digraph& g, const std::vector<int>& k,
                                 const std::vector<int>& o);

// Relevant-vertex set of a formula whose atoms are vertices of g: atoms of
// the formula itself, plus one minimal blocker per Knows against the
// agent's observable vertices. obs[i] holds agent i's observable vertices,
// sorted. Result sorted.
std::vector<int> relevance(const Digraph& g,
                           const std::vector<std::vector<int>>& obs,
                           const CFormulaPtr& f);

// Vertices outside keep that become childless once later removals are
// taken into account, in removal order.
std::vector<int> removable_leaves(const Digraph& g,
                                  const std::vector<int>& keep);

// Concrete DAG-structured model: one relation per vertex over the vertex
// and its parents, leaving the parents unconstrained.
struct StructuredModel {
  Digraph g;
  std::vector<Relation> node;
};

// Join of all node relations.
Relation joint(const StructuredModel& m);

// Checks dom(s_v) = {v} ∪ pa(v) and s_v↓pa(v) = e_pa(v) for every vertex;
// on failure names the offending vertex in *why.
bool validate_structured(const StructuredModel& m, std::string* why = nullptr);

// Removes every leaf outside x, including leaves exposed by earlier
// removals. The joint relation marginalized to x is unchanged.
StructuredModel leaf_eliminate(const StructuredModel& m,
                               const std::vector<int>& x);

// Merges the pure-copy vertex y into x and names the result y: requires
// pa(y) = {x}, equal frames, and s_y the equality relation
// (PreconditionViolated otherwise). x's node relation and edges carry
// over under the new name.
StructuredModel rename_equality(const StructuredModel& m, int x, int y);

// DOT text; boxed vertices render as rectangles (observables of the agent
// under discussion), the rest as ellipses.
std::string dot_directed(const Digraph& g, const std::vector<int>& boxed);
std::string dot_moralized(const Digraph& g, const std::vector<int>& boxed);

}  // namespace epiveri
