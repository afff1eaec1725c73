#include "epiveri/bench.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <future>
#include <limits>
#include <thread>

#include "epiveri/checker.hpp"
#include "epiveri/diag.hpp"
#include "epiveri/generators.hpp"
#include "epiveri/oracle.hpp"
#include "epiveri/parser.hpp"
#include "epiveri/pipeline.hpp"

namespace epiveri {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

// Runs every repetition of one (family, size, algo) cell and aggregates the
// minimum. A timed-out repetition censors the whole cell: the result is
// deterministic, so the remaining repetitions would time out as well.
BenchRow run_cell(const BenchSpec& b, const std::string& algo, int size) {
  BenchRow row;
  row.family = b.family;
  row.size = size;
  row.algo = algo;

  std::string text = generate_family(b.family, size);
  CheckedSystem sys = check_script(parse_script(text, b.family));
  const CheckedSpec& spec = sys.specs[select_spec(sys, b.spec_label)];

  CheckOptions opts;
  opts.timeout_seconds = b.timeout_seconds;
  OracleOptions oracle_opts;
  oracle_opts.max_initial_states = uint64_t{1} << 34;

  double best = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < b.repetitions; ++rep) {
    auto start = std::chrono::steady_clock::now();
    try {
      if (algo == "oracle") {
        OracleResult r = oracle_check(sys, spec, oracle_opts);
        double elapsed = seconds_since(start);
        if (elapsed > b.timeout_seconds) throw DeadlineExceeded{"oracle"};
        row.verdict = r.holds ? "holds" : "fails";
        best = std::min(best, elapsed);
      } else {
        Verdict v = algo == "baseline" ? check_baseline(sys, spec, opts)
                                       : check_optimized(sys, spec, opts);
        row.verdict = v.holds ? "holds" : "fails";
        row.kept_vars = v.stats.kept_vars;
        row.total_vars = v.stats.total_nodes;
        best = std::min(best, seconds_since(start));
      }
    } catch (const DeadlineExceeded&) {
      row.runs = rep + 1;
      row.seconds = b.timeout_seconds;
      row.verdict = "timeout";
      return row;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ExplosionGuard) throw;
      row.runs = rep + 1;
      row.seconds = seconds_since(start);
      row.verdict = "guard";
      return row;
    }
    row.runs = rep + 1;
  }
  row.seconds = best;
  return row;
}

bool censored(const BenchRow& row) {
  return row.verdict == "timeout" || row.verdict == "guard";
}

std::vector<BenchRow> run_parallel(const BenchSpec& b) {
  int sizes = b.size_hi - b.size_lo + 1;
  std::vector<std::vector<std::optional<BenchRow>>> cells(
      b.algos.size(), std::vector<std::optional<BenchRow>>(sizes));
  // Per-algo cutoff: once a size is censored, larger sizes are skipped.
  std::vector<std::atomic<int>> cutoff(b.algos.size());
  for (auto& c : cutoff) c.store(std::numeric_limits<int>::max());

  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<size_t> next{0};
  size_t total = b.algos.size() * static_cast<size_t>(sizes);
  auto worker = [&] {
    for (;;) {
      size_t at = next.fetch_add(1);
      if (at >= total) return;
      size_t ai = at / sizes;
      int si = static_cast<int>(at % sizes);
      int size = b.size_lo + si;
      if (size > cutoff[ai].load()) continue;
      BenchRow row = run_cell(b, b.algos[ai], size);
      if (censored(row)) {
        int prev = cutoff[ai].load();
        while (size < prev && !cutoff[ai].compare_exchange_weak(prev, size)) {
        }
      }
      cells[ai][si] = std::move(row);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<BenchRow> rows;
  for (size_t ai = 0; ai < b.algos.size(); ++ai)
    for (int si = 0; si < sizes; ++si) {
      if (b.size_lo + si > cutoff[ai].load()) break;
      if (cells[ai][si]) rows.push_back(std::move(*cells[ai][si]));
    }
  return rows;
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchSpec& b) {
  if (b.size_lo > b.size_hi || b.repetitions < 1 || b.algos.empty())
    throw Error(ErrorKind::BadParams, "empty benchmark");
  for (const auto& algo : b.algos)
    if (algo != "ci" && algo != "baseline" && algo != "oracle")
      throw Error(ErrorKind::BadParams, "unknown algorithm '" + algo + "'");
  if (b.parallel) return run_parallel(b);

  std::vector<BenchRow> rows;
  for (const auto& algo : b.algos)
    for (int size = b.size_lo; size <= b.size_hi; ++size) {
      rows.push_back(run_cell(b, algo, size));
      if (censored(rows.back())) break;
    }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = "family,size,algo,run,seconds,verdict,kept_vars,total_vars\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%d,%s,%d,%.6f,%s,%d,%d\n",
                  r.family.c_str(), r.size, r.algo.c_str(), r.runs, r.seconds,
                  r.verdict.c_str(), r.kept_vars, r.total_vars);
    out += buf;
  }
  return out;
}

}  // namespace epiveri
