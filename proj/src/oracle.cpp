#include "epiveri/oracle.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <unordered_map>

#include "epiveri/diag.hpp"

namespace epiveri {

void transpose64(uint64_t a[64]) {
  uint64_t m = 0x00000000FFFFFFFFULL;
  for (int j = 32; j != 0; j >>= 1, m ^= m << j) {
    for (int k = 0; k < 64; k = (k + j + 1) & ~j) {
      uint64_t t = (a[k] ^ (a[k + j] >> j)) & m;
      a[k] ^= t;
      a[k + j] ^= t << j;
    }
  }
}

namespace {

bool system_has_rand(const CheckedSystem& sys) {
  for (const auto& ag : sys.agents) {
    for (const auto& action : ag.actions) {
      for (const auto& st : action) {
        if (st.is_rand) return true;
      }
    }
  }
  for (const auto& st : sys.env) {
    if (st.is_rand) return true;
  }
  return false;
}

std::vector<std::pair<std::string, uint8_t>> witness_of_run(
    const CheckedSystem& sys, const Run& run) {
  std::vector<std::pair<std::string, uint8_t>> out;
  for (size_t t = 0; t < run.size(); ++t) {
    for (int v = 0; v < sys.num_vars(); ++v) {
      out.emplace_back(timed_name(sys, v, static_cast<int>(t)), run[t][v]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------
// Materialized evaluation: truth vectors over the deduplicated run set.

class MaterialEval {
 public:
  MaterialEval(const CheckedSystem& sys, int k, std::vector<Run> runs)
      : sys_(sys), k_(k), runs_(std::move(runs)) {}

  const std::vector<uint8_t>& truth(const CFormulaPtr& f) {
    auto it = memo_.find(f.get());
    if (it != memo_.end()) return it->second;
    std::vector<uint8_t> out(runs_.size(), 0);
    switch (f->kind) {
      case CFormula::Kind::Const:
        std::fill(out.begin(), out.end(), f->cval ? 1 : 0);
        break;
      case CFormula::Kind::Atom:
        for (size_t w = 0; w < runs_.size(); ++w) {
          out[w] = runs_[w][k_][f->var];
        }
        break;
      case CFormula::Kind::Not: {
        const auto& a = truth(f->lhs);
        for (size_t w = 0; w < runs_.size(); ++w) out[w] = !a[w];
        break;
      }
      case CFormula::Kind::Bin: {
        const auto& a = truth(f->lhs);
        const auto& b = truth(f->rhs);
        for (size_t w = 0; w < runs_.size(); ++w) {
          bool x = a[w], y = b[w], r = false;
          switch (f->op) {
            case BoolOp::And: r = x && y; break;
            case BoolOp::Or: r = x || y; break;
            case BoolOp::Xor: r = x != y; break;
            case BoolOp::Implies: r = !x || y; break;
            case BoolOp::Iff: r = x == y; break;
            case BoolOp::Neg: r = !x; break;
          }
          out[w] = r;
        }
        break;
      }
      case CFormula::Kind::Knows: {
        const auto& a = truth(f->lhs);
        const auto& cls = classes(f->agent);
        std::unordered_map<int, uint8_t> all;
        for (size_t w = 0; w < runs_.size(); ++w) {
          auto [it2, fresh] = all.emplace(cls[w], 1);
          (void)fresh;
          it2->second = static_cast<uint8_t>(it2->second && a[w]);
        }
        for (size_t w = 0; w < runs_.size(); ++w) out[w] = all[cls[w]];
        break;
      }
    }
    return memo_.emplace(f.get(), std::move(out)).first->second;
  }

  size_t worlds() const { return runs_.size(); }
  const Run& run(size_t w) const { return runs_[w]; }

 private:
  // Equivalence class per world: worlds sharing every observation of the
  // agent up to time k_ land in the same class.
  const std::vector<int>& classes(int agent) {
    auto it = eqclass_.find(agent);
    if (it != eqclass_.end()) return it->second;
    const auto& obs = sys_.agents[agent].observable;
    std::vector<int> cls(runs_.size(), 0);
    std::map<std::vector<uint8_t>, int> seen;
    std::vector<uint8_t> key((static_cast<size_t>(k_) + 1) * obs.size());
    for (size_t w = 0; w < runs_.size(); ++w) {
      size_t j = 0;
      for (int t = 0; t <= k_; ++t) {
        for (int v : obs) key[j++] = runs_[w][t][v];
      }
      auto [it2, fresh] = seen.emplace(key, static_cast<int>(seen.size()));
      (void)fresh;
      cls[w] = it2->second;
    }
    return eqclass_.emplace(agent, std::move(cls)).first->second;
  }

  const CheckedSystem& sys_;
  int k_;
  std::vector<Run> runs_;
  std::unordered_map<int, std::vector<int>> eqclass_;
  std::unordered_map<const CFormula*, std::vector<uint8_t>> memo_;
};

OracleResult check_material(const CheckedSystem& sys, const CheckedSpec& spec,
                            const OracleOptions& opts) {
  RunLimits limits{opts.max_initial_states};
  MaterialEval ev(sys, spec.time, generate_runs(sys, spec.time, limits));
  OracleResult res;
  res.worlds = ev.worlds();
  const auto& t = ev.truth(spec.body);
  for (size_t w = 0; w < t.size(); ++w) {
    if (!t[w]) {
      res.holds = false;
      res.witness = witness_of_run(sys, ev.run(w));
      break;
    }
  }
  return res;
}

// ---------------------------------------------------------------------
// Streamed evaluation for rand-free systems. Initial states are numbered
// g = a * 2^F + free_bits, where a indexes the satisfying assignments of
// the initial condition and F counts the unconstrained variables; 64
// consecutive states run together, one per bit of a machine word.

constexpr int kMaxObsWords = 4;

struct ObsKey {
  std::array<uint64_t, kMaxObsWords> w{};
  bool operator==(const ObsKey& o) const { return w == o.w; }
};

struct ObsKeyHash {
  size_t operator()(const ObsKey& k) const {
    uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (uint64_t x : k.w) {
      x ^= h;
      x *= 0xff51afd7ed558ccdULL;
      x ^= x >> 33;
      h = x;
    }
    return static_cast<size_t>(h);
  }
};

struct KnowsNode {
  const CFormula* node = nullptr;
  int agent = 0;
  int depth = 0;  // 1 = innermost
  std::unordered_map<ObsKey, uint8_t, ObsKeyHash> classes;
};

class StreamEval {
 public:
  StreamEval(const CheckedSystem& sys, const CheckedSpec& spec,
             const OracleOptions& opts)
      : sys_(sys), spec_(spec) {
    RunLimits limits{opts.max_initial_states};
    total_ = count_initial_states(sys, limits);
    assigns_ = init_assignments(sys);
    std::vector<uint8_t> constrained(static_cast<size_t>(sys.num_vars()), 0);
    for (int v : sys.init_vars) constrained[v] = 1;
    for (int v = 0; v < sys.num_vars(); ++v) {
      if (!constrained[v]) free_vars_.push_back(v);
    }
    free_bits_ = free_vars_.size();
    k_ = spec.time;
    for (int t = 0; t < k_; ++t) ticks_.push_back(sys.tick_statements(t));
    snaps_.assign(static_cast<size_t>(k_) + 1,
                  std::vector<uint64_t>(sys.num_vars(), 0));
    collect_knows(spec.body);
    for (const auto& nd : knows_) {
      if (!obs_positions_.count(nd.agent)) {
        std::vector<std::pair<int, int>> pos;
        for (int t = 0; t <= k_; ++t) {
          for (int v : sys.agents[nd.agent].observable) pos.emplace_back(t, v);
        }
        if (pos.size() > 64 * kMaxObsWords) {
          throw Error(ErrorKind::ExplosionGuard,
                      "observation history of agent '" +
                          sys.agents[nd.agent].name + "' exceeds " +
                          std::to_string(64 * kMaxObsWords) + " bits");
        }
        obs_positions_.emplace(nd.agent, std::move(pos));
      }
    }
  }

  OracleResult run() {
    OracleResult res;
    res.streamed = true;
    res.worlds = total_;
    int depth = cformula_k_depth(spec_.body);
    for (int h = 1; h <= depth; ++h) {
      for (uint64_t base = 0; base < total_; base += 64) {
        simulate_batch(base);
        extract_keys(base);
        for (auto& nd : knows_) {
          if (nd.depth != h) continue;
          uint64_t w = eval_word(nd.node->lhs.get());
          const auto& keys = keys_.at(nd.agent);
          int valid = lanes(base);
          for (int l = 0; l < valid; ++l) {
            auto [it, fresh] = nd.classes.try_emplace(keys[l], 1);
            (void)fresh;
            it->second &= static_cast<uint8_t>((w >> l) & 1);
          }
        }
      }
    }
    for (uint64_t base = 0; base < total_; base += 64) {
      simulate_batch(base);
      extract_keys(base);
      uint64_t w = eval_word(spec_.body.get());
      int valid = lanes(base);
      uint64_t mask = valid == 64 ? ~uint64_t{0} : (uint64_t{1} << valid) - 1;
      if ((w & mask) == mask) continue;
      int lane = 0;
      while ((w >> lane) & 1) ++lane;
      res.holds = false;
      res.witness = witness_of_run(sys_, replay(base + lane));
      return res;
    }
    return res;
  }

 private:
  int lanes(uint64_t base) const {
    return static_cast<int>(std::min<uint64_t>(64, total_ - base));
  }

  void collect_knows(const CFormulaPtr& f) {
    if (!f) return;
    if (f->kind == CFormula::Kind::Knows && !knows_index_.count(f.get())) {
      knows_index_.emplace(f.get(), knows_.size());
      knows_.push_back(
          KnowsNode{f.get(), f->agent, cformula_k_depth(f), {}});
    }
    collect_knows(f->lhs);
    collect_knows(f->rhs);
  }

  // Decomposes the global state index and writes the lane's initial values.
  void fill_lane_scalar(uint64_t g, State& s) const {
    for (auto [v, b] : assigns_[g >> free_bits_]) s[v] = b;
    for (size_t j = 0; j < free_bits_; ++j) {
      s[free_vars_[j]] = static_cast<uint8_t>((g >> j) & 1);
    }
  }

  void simulate_batch(uint64_t base) {
    auto& w = snaps_[0];
    std::fill(w.begin(), w.end(), 0);
    static constexpr uint64_t kPattern[6] = {
        0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
        0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
    if (free_bits_ >= 6) {
      // One init assignment covers the whole batch; the six low free bits
      // sweep the lanes.
      for (auto [v, b] : assigns_[base >> free_bits_]) {
        w[v] = b ? ~uint64_t{0} : 0;
      }
      for (size_t j = 0; j < free_bits_; ++j) {
        if (j < 6) {
          w[free_vars_[j]] = kPattern[j];
        } else {
          w[free_vars_[j]] = ((base >> j) & 1) ? ~uint64_t{0} : 0;
        }
      }
    } else {
      int valid = lanes(base);
      State s(static_cast<size_t>(sys_.num_vars()), 0);
      for (int l = 0; l < valid; ++l) {
        fill_lane_scalar(base + l, s);
        for (int v = 0; v < sys_.num_vars(); ++v) {
          w[v] |= static_cast<uint64_t>(s[v]) << l;
        }
      }
    }
    for (int t = 0; t < k_; ++t) {
      snaps_[t + 1] = snaps_[t];
      auto& cur = snaps_[t + 1];
      for (const auto& st : ticks_[t]) {
        cur[st.target] = st.value->eval_lanes(cur.data());
      }
    }
  }

  // Packs each lane's observation history into an ObsKey. transpose64
  // leaves lane l's bits in word 63-l with reversed bit positions; the
  // layout only needs to be the same for every batch, not readable.
  void extract_keys(uint64_t base) {
    (void)base;
    for (auto& [agent, pos] : obs_positions_) {
      auto& keys = keys_[agent];
      size_t chunks = (pos.size() + 63) / 64;
      for (auto& key : keys) key.w.fill(0);
      uint64_t rows[64];
      for (size_t c = 0; c < chunks; ++c) {
        for (size_t j = 0; j < 64; ++j) {
          size_t p = c * 64 + j;
          rows[j] = p < pos.size() ? snaps_[pos[p].first][pos[p].second] : 0;
        }
        transpose64(rows);
        for (int l = 0; l < 64; ++l) keys[l].w[c] = rows[63 - l];
      }
    }
  }

  uint64_t eval_word(const CFormula* f) {
    switch (f->kind) {
      case CFormula::Kind::Const:
        return f->cval ? ~uint64_t{0} : 0;
      case CFormula::Kind::Atom:
        return snaps_[k_][f->var];
      case CFormula::Kind::Not:
        return ~eval_word(f->lhs.get());
      case CFormula::Kind::Bin: {
        uint64_t a = eval_word(f->lhs.get());
        uint64_t b = eval_word(f->rhs.get());
        switch (f->op) {
          case BoolOp::And: return a & b;
          case BoolOp::Or: return a | b;
          case BoolOp::Xor: return a ^ b;
          case BoolOp::Implies: return ~a | b;
          case BoolOp::Iff: return ~(a ^ b);
          case BoolOp::Neg: return ~a;
        }
        return 0;
      }
      case CFormula::Kind::Knows: {
        const auto& nd = knows_[knows_index_.at(f)];
        const auto& keys = keys_.at(nd.agent);
        uint64_t w = 0;
        for (int l = 0; l < 64; ++l) {
          auto it = nd.classes.find(keys[l]);
          if (it != nd.classes.end() && it->second) {
            w |= uint64_t{1} << l;
          }
        }
        return w;
      }
    }
    return 0;
  }

  Run replay(uint64_t g) const {
    State s(static_cast<size_t>(sys_.num_vars()), 0);
    fill_lane_scalar(g, s);
    Run run{s};
    for (int t = 0; t < k_; ++t) {
      run.push_back(exec_code(run.back(), ticks_[t]).front());
    }
    return run;
  }

  const CheckedSystem& sys_;
  const CheckedSpec& spec_;
  int k_ = 0;
  uint64_t total_ = 0;
  std::vector<std::vector<std::pair<int, uint8_t>>> assigns_;
  std::vector<int> free_vars_;
  size_t free_bits_ = 0;
  std::vector<std::vector<CStmt>> ticks_;
  std::vector<std::vector<uint64_t>> snaps_;
  std::vector<KnowsNode> knows_;
  std::unordered_map<const CFormula*, size_t> knows_index_;
  std::unordered_map<int, std::vector<std::pair<int, int>>> obs_positions_;
  std::unordered_map<int, std::array<ObsKey, 64>> keys_;
};

}  // namespace

Evs oracle_evs(const CheckedSystem& sys, int k, const RunLimits& limits) {
  Evs e;
  int n = sys.num_vars();
  for (int t = 0; t <= k; ++t) {
    for (int v = 0; v < n; ++v) e.vars.push_back(timed_name(sys, v, t));
  }
  for (const auto& ag : sys.agents) {
    e.agents.push_back(ag.name);
    std::vector<int> obs;
    for (int t = 0; t <= k; ++t) {
      for (int v : ag.observable) obs.push_back(t * n + v);
    }
    e.obs.push_back(std::move(obs));
  }
  for (const auto& run : generate_runs(sys, k, limits)) {
    std::vector<uint8_t> row;
    row.reserve(e.vars.size());
    for (const auto& s : run) row.insert(row.end(), s.begin(), s.end());
    e.worlds.push_back(std::move(row));
  }
  return e;
}

OracleResult oracle_check(const CheckedSystem& sys, const CheckedSpec& spec,
                          const OracleOptions& opts) {
  if (opts.force_materialize || system_has_rand(sys)) {
    return check_material(sys, spec, opts);
  }
  return StreamEval(sys, spec, opts).run();
}

}  // namespace epiveri
