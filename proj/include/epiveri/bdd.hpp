#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "epiveri/ast.hpp"

namespace epiveri {

class BddManager;

// Canonical handle: two refs from one manager are equal exactly when the
// functions are equal.
struct BddRef {
  uint32_t id = 0;
  const BddManager* owner = nullptr;

  bool operator==(const BddRef& o) const {
    return id == o.id && owner == o.owner;
  }
  bool operator!=(const BddRef& o) const { return !(*this == o); }
};

// Thrown when a manager passes its cooperative deadline; deliberately not
// an Error so timeouts are distinguishable from contract violations.
struct DeadlineExceeded {
  std::string where;
};

// Reduced ordered binary decision diagrams over a fixed variable order.
// No garbage collection and no complement edges: a manager lives for one
// check and is then discarded.
class BddManager {
 public:
  explicit BddManager(const std::vector<std::string>& order);

  int num_vars() const { return static_cast<int>(names_.size()); }
  const std::string& var_name(int level) const { return names_[level]; }
  int level_of(const std::string& name) const;
  bool has_var(const std::string& name) const;

  BddRef constant(bool b) const;
  BddRef var(const std::string& name);
  BddRef apply(BoolOp op, BddRef f, BddRef g);
  BddRef negate(BddRef f);
  BddRef exists(BddRef f, const std::vector<std::string>& vars);
  // ∃vars (f ∧ g) without materializing the conjunction.
  BddRef and_exists(BddRef f, BddRef g, const std::vector<std::string>& vars);
  // Variable-to-variable substitution; the mapping must be injective and
  // preserve the variable order on support(f) (OrderConflict otherwise).
  BddRef rename(BddRef f,
                const std::vector<std::pair<std::string, std::string>>& map);

  // Exact model count over the given variables (SupportExceedsScope when
  // f depends on anything else).
  double sat_count(BddRef f, const std::vector<std::string>& over);
  // One satisfying assignment; variables the path leaves free are omitted.
  std::optional<std::vector<std::pair<std::string, bool>>> any_sat(BddRef f);

  std::vector<std::string> support(BddRef f) const;
  size_t node_count() const { return nodes_.size(); }
  void clear_cache();

  // Cooperative wall-clock deadline, polled inside the recursive
  // operations; reset_deadline removes it.
  void set_deadline(std::chrono::steady_clock::time_point t);
  void reset_deadline();

  // Verifies orderedness, reducedness, and unique-table consistency;
  // throws Internal on violation.
  void audit() const;

  std::string to_dot(BddRef f) const;

 private:
  struct Node {
    uint32_t var;
    uint32_t lo;
    uint32_t hi;
  };
  struct TripleHash {
    size_t operator()(const Node& n) const;
  };
  struct TripleEq {
    bool operator()(const Node& a, const Node& b) const {
      return a.var == b.var && a.lo == b.lo && a.hi == b.hi;
    }
  };
  struct OpKey {
    uint32_t op;
    uint32_t a;
    uint32_t b;
    uint32_t c;
    bool operator==(const OpKey& o) const {
      return op == o.op && a == o.a && b == o.b && c == o.c;
    }
  };
  struct OpKeyHash {
    size_t operator()(const OpKey& k) const;
  };

  static constexpr uint32_t kTermVar = 0xFFFFFFFFu;

  void check_owner(BddRef f) const;
  void tick();
  uint32_t make_node(uint32_t var, uint32_t lo, uint32_t hi);
  uint32_t apply_rec(BoolOp op, uint32_t f, uint32_t g);
  uint32_t exists_rec(uint32_t f, uint32_t set_id);
  uint32_t and_exists_rec(uint32_t f, uint32_t g, uint32_t set_id);
  uint32_t rename_rec(uint32_t f, const std::vector<int>& map,
                      std::unordered_map<uint32_t, uint32_t>& memo);
  uint32_t intern_set(const std::vector<std::string>& vars);
  std::vector<uint8_t> support_mask(uint32_t f) const;

  std::vector<std::string> names_;
  std::unordered_map<std::string, int> level_;
  std::vector<Node> nodes_;
  std::unordered_map<Node, uint32_t, TripleHash, TripleEq> unique_;
  std::unordered_map<OpKey, uint32_t, OpKeyHash> cache_;
  std::vector<std::vector<uint8_t>> sets_;      // quantified level masks
  std::vector<int> set_max_;                    // highest level per set
  std::unordered_map<std::string, uint32_t> set_index_;
  uint64_t steps_ = 0;
  bool has_deadline_ = false;
  std::chrono::steady_clock::time_point deadline_{};
};

}  // namespace epiveri
