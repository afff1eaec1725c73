#pragma once

#include <cstdint>
#include <vector>

#include "epiveri/checker.hpp"

namespace epiveri {

// Total assignment, one byte per variable id of the checked system.
using State = std::vector<uint8_t>;
// States s_0 .. s_k of one run; s_0 satisfies the initial condition.
using Run = std::vector<State>;

struct RunLimits {
  uint64_t max_initial_states = uint64_t{1} << 24;
};

// All terminal states of running code from s: assignments update in
// sequence, each rand doubles the branch set. Sorted, deduplicated.
std::vector<State> exec_code(const State& s, const std::vector<CStmt>& code);

// One synchronous step at time t: every agent's action t in declared
// order, then the environment transitions.
std::vector<State> tick(const State& s, int t, const CheckedSystem& sys);

// Every assignment satisfying the initial condition, with all variables it
// does not mention free. Sorted. Throws UnsatisfiableInit when no
// assignment qualifies and ExplosionGuard past limits.max_initial_states.
std::vector<State> initial_states(const CheckedSystem& sys,
                                  const RunLimits& limits = {});

// Satisfying assignments of the initial condition restricted to
// sys.init_vars, each as (variable id, value) pairs in id order. The
// building block behind initial_states that streaming callers use to avoid
// materializing the free combinations.
std::vector<std::vector<std::pair<int, uint8_t>>> init_assignments(
    const CheckedSystem& sys);

// Number of initial states without materializing them; same guards.
uint64_t count_initial_states(const CheckedSystem& sys,
                              const RunLimits& limits = {});

// All runs of k ticks (k + 1 states each). Sorted, deduplicated.
std::vector<Run> generate_runs(const CheckedSystem& sys, int k,
                               const RunLimits& limits = {});

}  // namespace epiveri
