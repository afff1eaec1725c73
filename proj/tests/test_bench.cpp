#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <sstream>

#include "epiveri/bench.hpp"
#include "epiveri/diag.hpp"
#include "testutil.hpp"

using namespace epiveri;

namespace {

BenchSpec small_dc() {
  BenchSpec b;
  b.family = "dc";
  b.size_lo = 3;
  b.size_hi = 4;
  b.algos = {"ci", "baseline", "oracle"};
  b.repetitions = 2;
  return b;
}

const BenchRow* find(const std::vector<BenchRow>& rows, int size,
                     const std::string& algo) {
  for (const auto& r : rows)
    if (r.size == size && r.algo == algo) return &r;
  return nullptr;
}

}  // namespace

TEST_CASE("a small sweep measures every cell once") {
  std::vector<BenchRow> rows = run_bench(small_dc());
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) {
    CHECK(r.family == "dc");
    CHECK(r.runs == 2);
    CHECK(r.verdict == "holds");
    CHECK(r.seconds >= 0.0);
    if (r.algo == "oracle") {
      CHECK(r.kept_vars == 0);
      CHECK(r.total_vars == 0);
    } else {
      CHECK(r.kept_vars > 0);
      CHECK(r.total_vars > r.kept_vars);
    }
  }
  // Cells come grouped per algorithm in size order.
  CHECK(rows[0].algo == "ci");
  CHECK(rows[0].size == 3);
  CHECK(rows[1].size == 4);
  CHECK(rows[2].algo == "baseline");

  const BenchRow* ci3 = find(rows, 3, "ci");
  const BenchRow* base3 = find(rows, 3, "baseline");
  REQUIRE(ci3 != nullptr);
  REQUIRE(base3 != nullptr);
  CHECK(ci3->kept_vars == 7);
  CHECK(ci3->total_vars == 25);
  CHECK(base3->kept_vars == 12);
  // The analysis never keeps more than the baseline.
  const BenchRow* ci4 = find(rows, 4, "ci");
  const BenchRow* base4 = find(rows, 4, "baseline");
  CHECK(ci4->kept_vars <= base4->kept_vars);
  CHECK(ci4->total_vars == base4->total_vars);
}

TEST_CASE("CSV output carries one line per cell") {
  BenchSpec b = small_dc();
  b.algos = {"ci"};
  b.repetitions = 1;
  std::vector<BenchRow> rows = run_bench(b);
  std::string csv = bench_csv(rows);
  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "family,size,algo,run,seconds,verdict,kept_vars,total_vars");
  int body = 0;
  while (std::getline(in, line)) {
    ++body;
    CHECK(line.find("dc,") == 0);
    CHECK(std::count(line.begin(), line.end(), ',') == 7);
    // Seconds carry fixed six-digit precision.
    size_t dot = line.find('.');
    REQUIRE(dot != std::string::npos);
    CHECK(line.find(',', dot) == dot + 7);
  }
  CHECK(body == 2);
  CHECK(csv.find("dc,3,ci,1,") != std::string::npos);
}

TEST_CASE("a timed-out size censors the rest of the sweep") {
  BenchSpec b;
  b.family = "twophase";
  b.size_lo = 3;
  b.size_hi = 6;
  b.algos = {"ci"};
  b.repetitions = 3;
  b.timeout_seconds = 1e-9;
  std::vector<BenchRow> rows = run_bench(b);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].size == 3);
  CHECK(rows[0].verdict == "timeout");
  CHECK(rows[0].seconds == 1e-9);
  // The first repetition already decides; later ones are skipped.
  CHECK(rows[0].runs == 1);
}

TEST_CASE("oracle explosion reports a guarded cell") {
  BenchSpec b;
  b.family = "dc";
  b.size_lo = 9;
  b.size_hi = 12;
  b.algos = {"oracle"};
  b.repetitions = 2;
  std::vector<BenchRow> rows = run_bench(b);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].size == 9);
  CHECK(rows[0].verdict == "guard");
  CHECK(rows[0].runs == 1);
}

TEST_CASE("bad parameters are rejected up front") {
  BenchSpec b = small_dc();
  b.algos = {"ci", "quantum"};
  try {
    (void)run_bench(b);
    FAIL("expected a bad-params error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BadParams);
  }

  b = small_dc();
  b.size_lo = 5;
  b.size_hi = 3;
  try {
    (void)run_bench(b);
    FAIL("expected a bad-params error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BadParams);
  }

  b = small_dc();
  b.family = "nosuch";
  try {
    (void)run_bench(b);
    FAIL("expected a bad-params error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BadParams);
  }
}

TEST_CASE("parallel execution reproduces the sequential cells") {
  BenchSpec b = small_dc();
  b.repetitions = 1;
  std::vector<BenchRow> seq = run_bench(b);
  b.parallel = true;
  std::vector<BenchRow> par = run_bench(b);
  REQUIRE(par.size() == seq.size());
  for (size_t i = 0; i < seq.size(); ++i) {
    CHECK(par[i].family == seq[i].family);
    CHECK(par[i].size == seq[i].size);
    CHECK(par[i].algo == seq[i].algo);
    CHECK(par[i].verdict == seq[i].verdict);
    CHECK(par[i].kept_vars == seq[i].kept_vars);
    CHECK(par[i].total_vars == seq[i].total_vars);
  }
}

TEST_CASE("a failing spec shows up as a failing verdict") {
  BenchSpec b;
  b.family = "ot";
  b.size_lo = 3;
  b.size_hi = 3;
  b.algos = {"ci", "oracle"};
  b.spec_label = "Single";
  b.repetitions = 1;
  std::vector<BenchRow> rows = run_bench(b);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].verdict == "fails");
  CHECK(rows[1].verdict == "fails");
}
