#pragma once

#include <optional>
#include <string>
#include <vector>

#include "epiveri/bdd.hpp"
#include "epiveri/checker.hpp"
#include "epiveri/unfold.hpp"

namespace epiveri {

struct ReductionStats {
  int total_nodes = 0;     // init vertex + one per variable + one per statement
  int kappa_size = 0;      // relevant vertices
  int alias_removed = 0;   // copies absorbed during unfolding
  int leaf_removed = 0;    // vertices deleted by leaf elimination
  int quantified = 0;      // survivors eliminated inside the sweep
  int kept_vars = 0;       // final decision-diagram variable count
  int reduced_vertices = 0;           // survivors, init vertex included
  int reduced_vertices_no_init = 0;   // survivors without the init vertex
  double unfold_ms = 0.0;
  double analyze_ms = 0.0;
  double build_ms = 0.0;
  double check_ms = 0.0;
};

// One kept variable of a counterexample world, in its timed spelling.
// value 1/0 is an assigned bit, -1 a variable the world leaves open.
struct CexEntry {
  std::string name;
  int value = -1;
};

struct Verdict {
  bool holds = true;
  std::vector<CexEntry> counterexample;  // nonempty exactly when !holds
  ReductionStats stats;
};

struct CheckOptions {
  std::optional<double> timeout_seconds;
  // Replaces the computed elimination order on the quantified variables
  // (indexed names, a permutation of the default set; BadOrder otherwise).
  // Verdicts must not depend on it.
  std::optional<std::vector<std::string>> order_override;
};

// Relevance analysis of one spec against a system: the unfolded model, the
// spec over vertices, per-agent observable vertices, the protected set κ,
// and the leaf-elimination outcome.
struct Analysis {
  UnfoldedModel model;
  CFormulaPtr phi;                     // atoms are vertex ids
  std::vector<std::vector<int>> obs;   // per agent, sorted vertex ids
  std::vector<int> kappa;              // sorted vertex ids
  std::vector<int> removed;            // leaf removal sequence
  std::vector<uint8_t> alive;          // per vertex, after removals
  double unfold_ms = 0.0;
  double analyze_ms = 0.0;
};

// baseline replaces the d-separation analysis by the coarse protected set
// vars(φ) ∪ ⋃{observables of agents under a Knows}.
Analysis analyze(const CheckedSystem& sys, const CheckedSpec& spec,
                 bool baseline);

// Surviving dependency graph under the original vertex names. boxed_out,
// when given, receives the κ vertices renumbered into the new graph.
Digraph reduced_graph(const Analysis& a, std::vector<int>* boxed_out = nullptr);

Verdict check_optimized(const CheckedSystem& sys, const CheckedSpec& spec,
                        const CheckOptions& opt = {});
Verdict check_baseline(const CheckedSystem& sys, const CheckedSpec& spec,
                       const CheckOptions& opt = {});

// {w ∈ worlds : every worlds-world agreeing with w on obs satisfies
// phi_set}, computed as worlds ∧ ¬∃primed(worlds′ ∧ Eq_obs ∧ ¬phi_set′).
// The manager must hold a primed copy name+"'" directly below every
// support variable of worlds and every obs variable.
BddRef eval_knows(BddManager& man, BddRef worlds,
                  const std::vector<std::string>& obs, BddRef phi_set);

// JSON document with keys "holds", "counterexample" (object of timed name
// to bit or null, or null when the spec holds) and "stats"; extra fields
// are merged at the top level.
std::string verdict_json(
    const Verdict& v,
    const std::vector<std::pair<std::string, std::string>>& extra = {});

}  // namespace epiveri
