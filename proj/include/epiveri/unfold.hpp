#pragma once

#include <string>
#include <vector>

#include "epiveri/checker.hpp"
#include "epiveri/structured.hpp"

namespace epiveri {

// Symbolic execution of a checked system into a DAG over indexed
// variables. Vertex "v^j" holds the j-th value variable v takes on; a
// distinguished "v_init" vertex carries the initial condition; plain
// copies `v := u` create no vertex at all, the indexing simply aliases v
// to u's current vertex.
struct UnfoldedModel {
  enum class NodeKind {
    Free,    // unconstrained: initial value, or rand target
    Assign,  // v ⇔ formula over the parent vertices
    Init,    // index-0 copy of an initial-condition variable
  };

  Digraph g;
  std::vector<NodeKind> kind;
  std::vector<CExprPtr> formula;   // Assign vertices; atoms are vertex ids
  std::vector<int> node_var;       // vertex -> system variable (-1: v_init)
  std::vector<int> node_time;      // time the vertex's value appears
  int v_init = -1;
  int horizon = 0;
  int aliased = 0;                  // copies absorbed by the indexing

  // Current indexing and its per-tick snapshots; gamma[v] is variable v's
  // vertex, snapshots[t] the indexing after t ticks.
  std::vector<int> gamma;
  std::vector<std::vector<int>> snapshots;
};

// Vertices v^0 for every variable plus v_init when an initial condition
// exists; snapshot γ_0 recorded.
UnfoldedModel initial_model(const CheckedSystem& sys);

// One statement: assignments add a vertex wired to the vertices of the
// read variables (or alias the target for a bare copy), rand adds a free
// vertex.
void apply_stmt(UnfoldedModel& m, const CheckedSystem& sys, const CStmt& st);

// Folds apply_stmt over k ticks of the system.
UnfoldedModel unfold(const CheckedSystem& sys, int k);

// Rewrites a spec body whose atoms are system variables at time k into one
// whose atoms are vertices of m.
CFormulaPtr timed_to_indexed(const CFormulaPtr& f, const UnfoldedModel& m,
                             int k);

// Vertices an agent with perfect recall has observed through time k:
// {γ_t(v) : v observable, t ≤ k}, sorted and deduplicated.
std::vector<int> observable_indexed(const CheckedSystem& sys,
                                    const UnfoldedModel& m, int agent, int k);

// Timed-variable spelling of a vertex ("v@t" at its creation time, "init"
// for v_init).
std::string timed_label(const UnfoldedModel& m, const CheckedSystem& sys,
                        int node);

// Explicit relations for every vertex: the validation and brute-force
// bridge, feasible at test scale only.
StructuredModel concretize(const UnfoldedModel& m, const CheckedSystem& sys);

// DOT text of the unfolded graph, vertices labelled with timed names;
// boxed vertices render as rectangles.
std::string dot_unfolded(const UnfoldedModel& m, const CheckedSystem& sys,
                         const std::vector<int>& boxed);

}  // namespace epiveri
