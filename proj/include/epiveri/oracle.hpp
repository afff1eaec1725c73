#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "epiveri/checker.hpp"
#include "epiveri/kripke.hpp"
#include "epiveri/runs.hpp"

namespace epiveri {

// Brute-force reference checker. Systems without rand are evaluated by a
// bit-sliced sweep over initial states, 64 runs per batch, without ever
// materializing the run set; systems with rand fall back to materialized
// run enumeration.

struct OracleOptions {
  uint64_t max_initial_states = uint64_t{1} << 24;
  bool force_materialize = false;
};

struct OracleResult {
  bool holds = true;
  uint64_t worlds = 0;
  bool streamed = false;
  // Failing world as (timed name, value) pairs, empty when the spec holds.
  std::vector<std::pair<std::string, uint8_t>> witness;
};

// Epistemic structure of all length-k runs: variables are the timed copies
// v@0 .. v@k of every system variable, worlds are the deduplicated runs,
// and agent i observes every timed copy of its observable set.
Evs oracle_evs(const CheckedSystem& sys, int k, const RunLimits& limits = {});

OracleResult oracle_check(const CheckedSystem& sys, const CheckedSpec& spec,
                          const OracleOptions& opts = {});

// Transposes the 64x64 bit matrix in place, reading each word's bits most
// significant first: bit j of word i moves to bit 63-i of word 63-j.
// Exposed for tests.
void transpose64(uint64_t a[64]);

}  // namespace epiveri
