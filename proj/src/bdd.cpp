#include "epiveri/bdd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "epiveri/diag.hpp"

namespace epiveri {

namespace {

uint64_t mix64(uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

uint32_t op_code(BoolOp op) {
  switch (op) {
    case BoolOp::And: return 0;
    case BoolOp::Or: return 1;
    case BoolOp::Xor: return 2;
    case BoolOp::Implies: return 3;
    case BoolOp::Iff: return 4;
    case BoolOp::Neg: break;
  }
  throw Error(ErrorKind::Internal, "negation is not a binary operation");
}

constexpr uint32_t kOpExists = 16;
constexpr uint32_t kOpAndExists = 17;

bool commutative(BoolOp op) {
  return op == BoolOp::And || op == BoolOp::Or || op == BoolOp::Xor ||
         op == BoolOp::Iff;
}

bool eval_op(BoolOp op, bool a, bool b) {
  switch (op) {
    case BoolOp::And: return a && b;
    case BoolOp::Or: return a || b;
    case BoolOp::Xor: return a != b;
    case BoolOp::Implies: return !a || b;
    case BoolOp::Iff: return a == b;
    case BoolOp::Neg: break;
  }
  return false;
}

}  // namespace

size_t BddManager::TripleHash::operator()(const Node& n) const {
  return static_cast<size_t>(
      mix64((uint64_t{n.var} << 40) ^ (uint64_t{n.lo} << 20) ^ n.hi));
}

size_t BddManager::OpKeyHash::operator()(const OpKey& k) const {
  return static_cast<size_t>(mix64((uint64_t{k.op} << 56) ^
                                   (uint64_t{k.a} << 34) ^
                                   (uint64_t{k.b} << 12) ^ k.c));
}

BddManager::BddManager(const std::vector<std::string>& order) {
  for (const auto& name : order) {
    auto [it, fresh] = level_.emplace(name, num_vars());
    if (!fresh) {
      throw Error(ErrorKind::DuplicateName,
                  "variable '" + name + "' ordered twice");
    }
    names_.push_back(name);
  }
  nodes_.push_back(Node{kTermVar, 0, 0});  // false
  nodes_.push_back(Node{kTermVar, 1, 1});  // true
}

int BddManager::level_of(const std::string& name) const {
  auto it = level_.find(name);
  if (it == level_.end()) {
    throw Error(ErrorKind::UnknownVariable,
                "variable '" + name + "' is not in the order");
  }
  return it->second;
}

bool BddManager::has_var(const std::string& name) const {
  return level_.count(name) != 0;
}

void BddManager::check_owner(BddRef f) const {
  if (f.owner != this || f.id >= nodes_.size()) {
    throw Error(ErrorKind::ManagerMismatch,
                "ref does not belong to this manager");
  }
}

void BddManager::tick() {
  if ((++steps_ & 0xFFF) == 0 && has_deadline_ &&
      std::chrono::steady_clock::now() > deadline_) {
    throw DeadlineExceeded{"bdd operation"};
  }
}

void BddManager::set_deadline(std::chrono::steady_clock::time_point t) {
  has_deadline_ = true;
  deadline_ = t;
}

void BddManager::reset_deadline() { has_deadline_ = false; }

void BddManager::clear_cache() { cache_.clear(); }

uint32_t BddManager::make_node(uint32_t var, uint32_t lo, uint32_t hi) {
  if (lo == hi) return lo;
  Node n{var, lo, hi};
  auto it = unique_.find(n);
  if (it != unique_.end()) return it->second;
  uint32_t id = static_cast<uint32_t>(nodes_.size());
  nodes_.push_back(n);
  unique_.emplace(n, id);
  return id;
}

BddRef BddManager::constant(bool b) const {
  return BddRef{b ? 1u : 0u, this};
}

BddRef BddManager::var(const std::string& name) {
  uint32_t lv = static_cast<uint32_t>(level_of(name));
  return BddRef{make_node(lv, 0, 1), this};
}

uint32_t BddManager::apply_rec(BoolOp op, uint32_t f, uint32_t g) {
  tick();
  switch (op) {
    case BoolOp::And:
      if (f == g) return f;
      if (f == 0 || g == 0) return 0;
      if (f == 1) return g;
      if (g == 1) return f;
      break;
    case BoolOp::Or:
      if (f == g) return f;
      if (f == 1 || g == 1) return 1;
      if (f == 0) return g;
      if (g == 0) return f;
      break;
    case BoolOp::Xor:
      if (f == g) return 0;
      if (f == 0) return g;
      if (g == 0) return f;
      break;
    case BoolOp::Implies:
      if (f == g) return 1;
      if (f == 0 || g == 1) return 1;
      if (f == 1) return g;
      break;
    case BoolOp::Iff:
      if (f == g) return 1;
      if (f == 1) return g;
      if (g == 1) return f;
      break;
    case BoolOp::Neg:
      break;
  }
  if (f <= 1 && g <= 1) return eval_op(op, f == 1, g == 1) ? 1 : 0;
  if (commutative(op) && f > g) std::swap(f, g);
  OpKey key{op_code(op), f, g, 0};
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  uint32_t top = std::min(nodes_[f].var, nodes_[g].var);
  uint32_t f_lo = nodes_[f].var == top ? nodes_[f].lo : f;
  uint32_t f_hi = nodes_[f].var == top ? nodes_[f].hi : f;
  uint32_t g_lo = nodes_[g].var == top ? nodes_[g].lo : g;
  uint32_t g_hi = nodes_[g].var == top ? nodes_[g].hi : g;
  uint32_t r = make_node(top, apply_rec(op, f_lo, g_lo),
                         apply_rec(op, f_hi, g_hi));
  cache_.emplace(key, r);
  return r;
}

BddRef BddManager::apply(BoolOp op, BddRef f, BddRef g) {
  check_owner(f);
  check_owner(g);
  return BddRef{apply_rec(op, f.id, g.id), this};
}

BddRef BddManager::negate(BddRef f) {
  check_owner(f);
  return BddRef{apply_rec(BoolOp::Xor, f.id, 1), this};
}

uint32_t BddManager::intern_set(const std::vector<std::string>& vars) {
  std::vector<std::string> sorted = vars;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::string key;
  for (const auto& v : sorted) {
    key += v;
    key += '\x01';
  }
  auto it = set_index_.find(key);
  if (it != set_index_.end()) return it->second;
  std::vector<uint8_t> mask(names_.size(), 0);
  int max_level = -1;
  for (const auto& v : sorted) {
    int lv = level_of(v);
    mask[lv] = 1;
    max_level = std::max(max_level, lv);
  }
  uint32_t id = static_cast<uint32_t>(sets_.size());
  sets_.push_back(std::move(mask));
  set_max_.push_back(max_level);
  set_index_.emplace(std::move(key), id);
  return id;
}

uint32_t BddManager::exists_rec(uint32_t f, uint32_t set_id) {
  tick();
  if (f <= 1) return f;
  if (static_cast<int>(nodes_[f].var) > set_max_[set_id]) return f;
  OpKey key{kOpExists, f, set_id, 0};
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  uint32_t var = nodes_[f].var;
  uint32_t lo = exists_rec(nodes_[f].lo, set_id);
  uint32_t hi = exists_rec(nodes_[f].hi, set_id);
  uint32_t r = sets_[set_id][var] ? apply_rec(BoolOp::Or, lo, hi)
                                  : make_node(var, lo, hi);
  cache_.emplace(key, r);
  return r;
}

BddRef BddManager::exists(BddRef f, const std::vector<std::string>& vars) {
  check_owner(f);
  if (vars.empty()) return f;
  return BddRef{exists_rec(f.id, intern_set(vars)), this};
}

uint32_t BddManager::and_exists_rec(uint32_t f, uint32_t g, uint32_t set_id) {
  tick();
  if (f == 0 || g == 0) return 0;
  if (f == 1 && g == 1) return 1;
  if (f == 1) return exists_rec(g, set_id);
  if (g == 1) return exists_rec(f, set_id);
  if (f > g) std::swap(f, g);
  uint32_t top = std::min(nodes_[f].var, nodes_[g].var);
  if (static_cast<int>(top) > set_max_[set_id]) {
    return apply_rec(BoolOp::And, f, g);
  }
  OpKey key{kOpAndExists, f, g, set_id};
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  uint32_t f_lo = nodes_[f].var == top ? nodes_[f].lo : f;
  uint32_t f_hi = nodes_[f].var == top ? nodes_[f].hi : f;
  uint32_t g_lo = nodes_[g].var == top ? nodes_[g].lo : g;
  uint32_t g_hi = nodes_[g].var == top ? nodes_[g].hi : g;
  uint32_t lo = and_exists_rec(f_lo, g_lo, set_id);
  uint32_t r;
  if (sets_[set_id][top]) {
    if (lo == 1) {
      r = 1;  // disjunction already saturated
    } else {
      r = apply_rec(BoolOp::Or, lo, and_exists_rec(f_hi, g_hi, set_id));
    }
  } else {
    r = make_node(top, lo, and_exists_rec(f_hi, g_hi, set_id));
  }
  cache_.emplace(key, r);
  return r;
}

BddRef BddManager::and_exists(BddRef f, BddRef g,
                              const std::vector<std::string>& vars) {
  check_owner(f);
  check_owner(g);
  if (vars.empty()) return apply(BoolOp::And, f, g);
  return BddRef{and_exists_rec(f.id, g.id, intern_set(vars)), this};
}

uint32_t BddManager::rename_rec(uint32_t f, const std::vector<int>& map,
                                std::unordered_map<uint32_t, uint32_t>& memo) {
  tick();
  if (f <= 1) return f;
  auto it = memo.find(f);
  if (it != memo.end()) return it->second;
  uint32_t lo = rename_rec(nodes_[f].lo, map, memo);
  uint32_t hi = rename_rec(nodes_[f].hi, map, memo);
  uint32_t r = make_node(static_cast<uint32_t>(map[nodes_[f].var]), lo, hi);
  memo.emplace(f, r);
  return r;
}

BddRef BddManager::rename(
    BddRef f, const std::vector<std::pair<std::string, std::string>>& map) {
  check_owner(f);
  std::vector<int> full(names_.size());
  for (size_t i = 0; i < full.size(); ++i) full[i] = static_cast<int>(i);
  std::vector<uint8_t> is_target(names_.size(), 0);
  for (const auto& [from, to] : map) {
    int a = level_of(from);
    int b = level_of(to);
    full[a] = b;
    if (is_target[b]++) {
      throw Error(ErrorKind::OrderConflict,
                  "two variables rename to '" + to + "'");
    }
  }
  // The relabeled levels must keep the order of f's support, and no two
  // support variables may collapse.
  std::vector<uint8_t> seen = support_mask(f.id);
  int prev = -1;
  for (size_t lv = 0; lv < seen.size(); ++lv) {
    if (!seen[lv]) continue;
    if (full[lv] <= prev) {
      throw Error(ErrorKind::OrderConflict,
                  "renaming does not preserve the variable order at '" +
                      names_[lv] + "'");
    }
    prev = full[lv];
  }
  std::unordered_map<uint32_t, uint32_t> memo;
  return BddRef{rename_rec(f.id, full, memo), this};
}

std::vector<uint8_t> BddManager::support_mask(uint32_t f) const {
  std::vector<uint8_t> seen(names_.size(), 0);
  std::vector<uint8_t> visited(nodes_.size(), 0);
  std::vector<uint32_t> stack{f};
  while (!stack.empty()) {
    uint32_t id = stack.back();
    stack.pop_back();
    if (id <= 1 || visited[id]) continue;
    visited[id] = 1;
    seen[nodes_[id].var] = 1;
    stack.push_back(nodes_[id].lo);
    stack.push_back(nodes_[id].hi);
  }
  return seen;
}

std::vector<std::string> BddManager::support(BddRef f) const {
  check_owner(f);
  std::vector<uint8_t> seen = support_mask(f.id);
  std::vector<std::string> out;
  for (size_t lv = 0; lv < seen.size(); ++lv) {
    if (seen[lv]) out.push_back(names_[lv]);
  }
  return out;
}

double BddManager::sat_count(BddRef f, const std::vector<std::string>& over) {
  check_owner(f);
  std::vector<int> rank(names_.size(), -1);
  std::vector<std::string> sorted = over;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<int> levels;
  for (const auto& v : sorted) levels.push_back(level_of(v));
  std::sort(levels.begin(), levels.end());
  for (size_t i = 0; i < levels.size(); ++i) {
    rank[levels[i]] = static_cast<int>(i);
  }
  for (const auto& v : support(f)) {
    if (rank[level_of(v)] < 0) {
      throw Error(ErrorKind::SupportExceedsScope,
                  "count scope is missing variable '" + v + "'");
    }
  }
  int total = static_cast<int>(levels.size());
  auto rank_of = [&](uint32_t id) {
    return id <= 1 ? total : rank[nodes_[id].var];
  };
  std::unordered_map<uint32_t, double> memo;
  // count(n) = models over the scope variables ranked at or below n's.
  auto count = [&](auto&& self, uint32_t id) -> double {
    if (id == 0) return 0.0;
    if (id == 1) return 1.0;
    auto it = memo.find(id);
    if (it != memo.end()) return it->second;
    const Node& n = nodes_[id];
    double lo = self(self, n.lo) * std::ldexp(1.0, rank_of(n.lo) - rank[n.var] - 1);
    double hi = self(self, n.hi) * std::ldexp(1.0, rank_of(n.hi) - rank[n.var] - 1);
    double r = lo + hi;
    memo.emplace(id, r);
    return r;
  };
  return count(count, f.id) * std::ldexp(1.0, rank_of(f.id));
}

std::optional<std::vector<std::pair<std::string, bool>>> BddManager::any_sat(
    BddRef f) {
  check_owner(f);
  if (f.id == 0) return std::nullopt;
  std::vector<std::pair<std::string, bool>> out;
  uint32_t cur = f.id;
  while (cur > 1) {
    const Node& n = nodes_[cur];
    if (n.lo != 0) {
      out.emplace_back(names_[n.var], false);
      cur = n.lo;
    } else {
      out.emplace_back(names_[n.var], true);
      cur = n.hi;
    }
  }
  return out;
}

void BddManager::audit() const {
  if (nodes_.size() < 2 || unique_.size() != nodes_.size() - 2) {
    throw Error(ErrorKind::Internal, "unique table out of sync");
  }
  for (uint32_t id = 2; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    if (n.var >= names_.size()) {
      throw Error(ErrorKind::Internal, "node with unknown variable");
    }
    if (n.lo >= nodes_.size() || n.hi >= nodes_.size()) {
      throw Error(ErrorKind::Internal, "dangling child reference");
    }
    if (n.lo == n.hi) {
      throw Error(ErrorKind::Internal, "redundant node survived reduction");
    }
    if (nodes_[n.lo].var <= n.var || nodes_[n.hi].var <= n.var) {
      throw Error(ErrorKind::Internal, "variable order violated");
    }
    auto it = unique_.find(n);
    if (it == unique_.end() || it->second != id) {
      throw Error(ErrorKind::Internal, "duplicate node triple");
    }
  }
}

std::string BddManager::to_dot(BddRef f) const {
  check_owner(f);
  std::ostringstream os;
  os << "digraph bdd {\n";
  os << "  n0 [label=\"0\" shape=box];\n";
  os << "  n1 [label=\"1\" shape=box];\n";
  std::vector<uint8_t> seen(nodes_.size(), 0);
  std::vector<uint32_t> stack{f.id};
  while (!stack.empty()) {
    uint32_t id = stack.back();
    stack.pop_back();
    if (id <= 1 || seen[id]) continue;
    seen[id] = 1;
    const Node& n = nodes_[id];
    os << "  n" << id << " [label=\"" << names_[n.var] << "\"];\n";
    os << "  n" << id << " -> n" << n.lo << " [style=dashed];\n";
    os << "  n" << id << " -> n" << n.hi << ";\n";
    stack.push_back(n.lo);
    stack.push_back(n.hi);
  }
  os << "}\n";
  return os.str();
}

}  // namespace epiveri
