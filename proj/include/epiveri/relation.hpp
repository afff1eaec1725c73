#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace epiveri {

// Value count per variable; a variable with frame size m takes the values
// 0 .. m-1. Boolean variables have size 2; the init pseudo-variable of the
// unfolded models is the one place a larger frame shows up.
using Frames = std::map<std::string, int>;

// A set of total assignments over a variable set. Variables are kept
// sorted and rows canonically ordered so equal structures compare equal.
struct Relation {
  std::vector<std::string> vars;
  Frames frame;
  std::vector<std::vector<uint32_t>> rows;

  bool operator==(const Relation& o) const {
    return vars == o.vars && rows == o.rows;
  }
  bool operator!=(const Relation& o) const { return !(*this == o); }
};

// Full relation over x: every assignment. identity({}) is the neutral
// one-empty-row structure.
Relation identity(const std::vector<std::string>& x, const Frames& frames);

// Natural join; rows agreeing on the shared variables merge.
Relation combine(const Relation& s, const Relation& t);

// Left fold of combine; the neutral structure for an empty set.
Relation combine_all(const std::vector<Relation>& s);

// Projection onto x (variables outside dom(s) ignored), rows deduplicated.
Relation marginalize(const Relation& s, const std::vector<std::string>& x);

// Projection dropping the single variable x.
Relation eliminate(const Relation& s, const std::string& x);

// Joins the structures whose domain contains x, eliminates x from that
// join, and keeps the rest untouched. When no domain contains x the set is
// returned unchanged.
std::vector<Relation> fuse(std::vector<Relation> s, const std::string& x);

// Eliminates the variables of order one fusion step at a time and joins
// what remains; equal to marginalize(combine_all(s), x) for every order.
// order must be a permutation of dom(s) \ x.
Relation fusion_marginal(std::vector<Relation> s,
                         const std::vector<std::string>& x,
                         const std::vector<std::string>& order);

// Elimination order for the variables outside x: greedy minimum degree on
// the interaction graph (variables adjacent when they share a domain),
// with fill-in edges between the neighbours of an eliminated variable and
// ties broken by name.
std::vector<std::string> elimination_order(
    const std::vector<std::vector<std::string>>& domains,
    const std::vector<std::string>& x);

// Conditional independence x ⊥ y | z in s: for every two rows agreeing on
// z there is a row matching the first on x∪z and the second on y∪z.
bool check_ci(const Relation& s, const std::vector<std::string>& x,
              const std::vector<std::string>& y,
              const std::vector<std::string>& z);

}  // namespace epiveri
