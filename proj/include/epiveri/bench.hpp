#pragma once

#include <optional>
#include <string>
#include <vector>

namespace epiveri {

struct BenchSpec {
  std::string family;
  int size_lo = 3;
  int size_hi = 3;
  std::vector<std::string> algos{"ci", "baseline"};  // ci | baseline | oracle
  std::optional<std::string> spec_label;
  int repetitions = 3;
  double timeout_seconds = 300.0;
  bool parallel = false;
};

// One aggregated measurement: the minimum wall time over the completed
// repetitions of (family, size, algo). A run past the timeout is censored:
// verdict "timeout", seconds = the timeout, and no larger size is tried
// for that algorithm. kept_vars/total_vars come from the reduction stats
// (zero for the oracle, which has none).
struct BenchRow {
  std::string family;
  int size = 0;
  std::string algo;
  int runs = 0;
  double seconds = 0.0;
  std::string verdict;  // holds | fails | timeout | guard
  int kept_vars = 0;
  int total_vars = 0;
};

std::vector<BenchRow> run_bench(const BenchSpec& b);

// CSV document: family,size,algo,run,seconds,verdict,kept_vars,total_vars.
std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace epiveri
