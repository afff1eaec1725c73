#include "epiveri/runs.hpp"

#include <algorithm>

#include "epiveri/diag.hpp"

namespace epiveri {

namespace {

void sort_unique(std::vector<State>& states) {
  std::sort(states.begin(), states.end());
  states.erase(std::unique(states.begin(), states.end()), states.end());
}

}  // namespace

std::vector<State> exec_code(const State& s, const std::vector<CStmt>& code) {
  std::vector<State> cur{s};
  for (const auto& st : code) {
    if (st.is_rand) {
      size_t n = cur.size();
      cur.reserve(2 * n);
      for (size_t i = 0; i < n; ++i) {
        State copy = cur[i];
        cur[i][st.target] = 0;
        copy[st.target] = 1;
        cur.push_back(std::move(copy));
      }
    } else {
      for (auto& state : cur) {
        state[st.target] = st.value->eval_bool(state.data()) ? 1 : 0;
      }
    }
  }
  sort_unique(cur);
  return cur;
}

std::vector<State> tick(const State& s, int t, const CheckedSystem& sys) {
  return exec_code(s, sys.tick_statements(t));
}

std::vector<std::vector<std::pair<int, uint8_t>>> init_assignments(
    const CheckedSystem& sys) {
  std::vector<std::vector<std::pair<int, uint8_t>>> out;
  const auto& vars = sys.init_vars;
  if (!sys.init) {
    out.emplace_back();
    return out;
  }
  if (vars.size() > 28) {
    throw Error(ErrorKind::ExplosionGuard,
                "initial condition ranges over " +
                    std::to_string(vars.size()) +
                    " variables; enumeration refused");
  }
  State probe(static_cast<size_t>(sys.num_vars()), 0);
  uint64_t combos = uint64_t{1} << vars.size();
  for (uint64_t bits = 0; bits < combos; ++bits) {
    for (size_t j = 0; j < vars.size(); ++j) {
      probe[vars[j]] = static_cast<uint8_t>((bits >> j) & 1);
    }
    if (!sys.init->eval_bool(probe.data())) continue;
    std::vector<std::pair<int, uint8_t>> a;
    a.reserve(vars.size());
    for (size_t j = 0; j < vars.size(); ++j) {
      a.emplace_back(vars[j], static_cast<uint8_t>((bits >> j) & 1));
    }
    out.push_back(std::move(a));
  }
  if (out.empty()) {
    throw Error(ErrorKind::UnsatisfiableInit,
                "initial condition is unsatisfiable");
  }
  return out;
}

uint64_t count_initial_states(const CheckedSystem& sys,
                              const RunLimits& limits) {
  uint64_t sat = init_assignments(sys).size();
  size_t free_bits = static_cast<size_t>(sys.num_vars()) - sys.init_vars.size();
  if (free_bits > 60 || sat > (limits.max_initial_states >> free_bits)) {
    throw Error(ErrorKind::ExplosionGuard,
                "initial state count exceeds the cap of " +
                    std::to_string(limits.max_initial_states));
  }
  return sat << free_bits;
}

std::vector<State> initial_states(const CheckedSystem& sys,
                                  const RunLimits& limits) {
  uint64_t total = count_initial_states(sys, limits);
  auto assignments = init_assignments(sys);
  std::vector<int> free_vars;
  {
    std::vector<uint8_t> constrained(static_cast<size_t>(sys.num_vars()), 0);
    for (int v : sys.init_vars) constrained[v] = 1;
    for (int v = 0; v < sys.num_vars(); ++v) {
      if (!constrained[v]) free_vars.push_back(v);
    }
  }
  std::vector<State> out;
  out.reserve(static_cast<size_t>(total));
  State base(static_cast<size_t>(sys.num_vars()), 0);
  for (const auto& a : assignments) {
    for (auto [v, b] : a) base[v] = b;
    uint64_t combos = uint64_t{1} << free_vars.size();
    for (uint64_t bits = 0; bits < combos; ++bits) {
      for (size_t j = 0; j < free_vars.size(); ++j) {
        base[free_vars[j]] = static_cast<uint8_t>((bits >> j) & 1);
      }
      out.push_back(base);
    }
  }
  sort_unique(out);
  return out;
}

std::vector<Run> generate_runs(const CheckedSystem& sys, int k,
                               const RunLimits& limits) {
  std::vector<Run> runs;
  for (auto& s0 : initial_states(sys, limits)) {
    runs.push_back(Run{std::move(s0)});
  }
  for (int t = 0; t < k; ++t) {
    auto stmts = sys.tick_statements(t);
    std::vector<Run> next;
    next.reserve(runs.size());
    for (auto& r : runs) {
      auto succ = exec_code(r.back(), stmts);
      for (size_t i = 0; i + 1 < succ.size(); ++i) {
        Run copy = r;
        copy.push_back(std::move(succ[i]));
        next.push_back(std::move(copy));
      }
      r.push_back(std::move(succ.back()));
      next.push_back(std::move(r));
    }
    runs = std::move(next);
  }
  std::sort(runs.begin(), runs.end());
  runs.erase(std::unique(runs.begin(), runs.end()), runs.end());
  return runs;
}

}  // namespace epiveri
