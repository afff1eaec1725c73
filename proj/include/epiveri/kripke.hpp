#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "epiveri/ast.hpp"

namespace epiveri {

// Worlds as explicit variable assignments; agent i cannot tell two worlds
// apart when they agree on every variable in obs[i].
struct Evs {
  std::vector<std::string> vars;
  std::vector<std::string> agents;
  std::vector<std::vector<int>> obs;  // per agent, sorted indices into vars
  std::vector<std::vector<uint8_t>> worlds;  // each of size vars.size()
};

// Worlds as opaque ids 0..n-1 with explicit equivalence classes.
struct Kripke {
  std::vector<std::string> atoms;
  std::vector<std::string> agents;
  int num_worlds = 0;
  std::vector<std::vector<uint8_t>> val;      // per world, size atoms.size()
  std::vector<std::vector<int>> eqclass;      // per agent, class id per world
};

// Maps a formula atom to a variable index; lets callers rebase atom names
// (e.g. append a time suffix) without rewriting the formula.
using AtomResolver = std::function<int(const NameRef&)>;

// Resolver matching pretty-printed references against names exactly.
AtomResolver name_resolver(const std::vector<std::string>& names);

bool eval(const Kripke& m, int world, const FormulaPtr& f);
bool eval(const Kripke& m, int world, const FormulaPtr& f,
          const AtomResolver& atoms);
bool eval(const Evs& m, int world, const FormulaPtr& f);
bool eval(const Evs& m, int world, const FormulaPtr& f,
          const AtomResolver& atoms);

bool models(const Kripke& m, const FormulaPtr& f);
bool models(const Evs& m, const FormulaPtr& f);

Kripke ks_of(const Evs& e);

// Rebuilds an epistemic variable structure from an arbitrary finite Kripke
// structure, adding one proposition per equivalence class ("sim.<agent>.<c>",
// the only observables) and one per world ("world.<w>").
Evs vs_of(const Kripke& m);

// Checks the atomic/forth/back clauses for the relation r between worlds of
// a and b, over the named variables u.
bool is_bisimulation(const Kripke& a, const Kripke& b,
                     const std::vector<std::pair<int, int>>& r,
                     const std::vector<std::string>& u);
// Additionally requires the projections of r to cover all worlds.
bool is_total_bisimulation(const Kripke& a, const Kripke& b,
                           const std::vector<std::pair<int, int>>& r,
                           const std::vector<std::string>& u);

// Projects worlds onto x (names not present are dropped) and intersects
// every observable set with x.
Evs marginalize_evs(const Evs& e, const std::vector<std::string>& x);

}  // namespace epiveri
