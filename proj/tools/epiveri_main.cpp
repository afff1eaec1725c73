#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "epiveri/bench.hpp"
#include "epiveri/checker.hpp"
#include "epiveri/diag.hpp"
#include "epiveri/generators.hpp"
#include "epiveri/oracle.hpp"
#include "epiveri/parser.hpp"
#include "epiveri/pipeline.hpp"
#include "epiveri/structured.hpp"

namespace {

using namespace epiveri;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::BadParams, "cannot read '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::BadParams, "cannot write '" + path + "'");
  out << text;
}

CheckedSystem load(const std::string& path) {
  return check_script(parse_script(read_file(path), path));
}

std::string spec_display(const CheckedSystem& sys, int idx) {
  const CheckedSpec& spec = sys.specs[idx];
  if (spec.label) return *spec.label;
  return sys.specs.size() == 1 ? spec.keyword
                               : spec.keyword + " #" + std::to_string(idx + 1);
}

// Spec indices a command operates on: the labeled one, or all of them.
std::vector<int> selected_specs(const CheckedSystem& sys,
                                const std::optional<std::string>& label) {
  if (label) return {select_spec(sys, label)};
  if (sys.specs.empty())
    throw Error(ErrorKind::BadParams, "script has no specifications");
  std::vector<int> all(sys.specs.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return all;
}

void print_verdict(const std::string& name, const Verdict& v) {
  const ReductionStats& s = v.stats;
  std::printf("%s: %s\n", name.c_str(), v.holds ? "holds" : "FAILS");
  std::printf("  variables: %d total, %d kept, %d aliased, %d leaves removed, %d quantified\n",
              s.total_nodes, s.kept_vars, s.alias_removed, s.leaf_removed,
              s.quantified);
  std::printf("  time: unfold %.1f ms, analyze %.1f ms, build %.1f ms, check %.1f ms\n",
              s.unfold_ms, s.analyze_ms, s.build_ms, s.check_ms);
  if (!v.holds) {
    std::printf("  counterexample:\n");
    for (const auto& e : v.counterexample)
      std::printf("    %s = %s\n", e.name.c_str(),
                  e.value < 0 ? "any" : (e.value ? "true" : "false"));
  }
}

void write_dots(const CheckedSystem& sys, const CheckedSpec& spec,
                bool baseline, const std::string& prefix, bool quiet) {
  Analysis a = analyze(sys, spec, baseline);
  write_file(prefix + ".unfolded.dot", dot_directed(a.model.g, a.kappa));
  write_file(prefix + ".moralized.dot", dot_moralized(a.model.g, a.kappa));
  std::vector<int> boxed;
  Digraph reduced = reduced_graph(a, &boxed);
  write_file(prefix + ".reduced.dot", dot_directed(reduced, boxed));
  if (!quiet)
    std::printf("wrote %s.{unfolded,moralized,reduced}.dot\n", prefix.c_str());
}

int cmd_check(const std::string& file, const std::optional<std::string>& label,
              const std::string& algo, bool json_out,
              const std::string& dot_prefix) {
  CheckedSystem sys = load(file);
  std::vector<int> indices = selected_specs(sys, label);
  bool baseline = algo == "baseline";

  bool all_hold = true;
  nlohmann::json arr = nlohmann::json::array();
  for (int idx : indices) {
    Verdict v = baseline ? check_baseline(sys, sys.specs[idx], {})
                         : check_optimized(sys, sys.specs[idx], {});
    all_hold = all_hold && v.holds;
    std::string name = spec_display(sys, idx);
    if (json_out)
      arr.push_back(nlohmann::json::parse(
          verdict_json(v, {{"spec", name}, {"algo", algo}})));
    else
      print_verdict(name, v);
  }
  if (json_out)
    std::printf("%s\n", (indices.size() == 1 ? arr[0] : arr).dump(2).c_str());
  if (!dot_prefix.empty())
    write_dots(sys, sys.specs[indices[0]], baseline, dot_prefix, json_out);
  return all_hold ? 0 : 1;
}

int cmd_oracle(const std::string& file, const std::optional<std::string>& label,
               uint64_t max_states) {
  CheckedSystem sys = load(file);
  OracleOptions opts;
  opts.max_initial_states = max_states;
  bool all_hold = true;
  for (int idx : selected_specs(sys, label)) {
    OracleResult r = oracle_check(sys, sys.specs[idx], opts);
    all_hold = all_hold && r.holds;
    std::printf("%s: %s (%llu worlds, %s)\n", spec_display(sys, idx).c_str(),
                r.holds ? "holds" : "FAILS",
                static_cast<unsigned long long>(r.worlds),
                r.streamed ? "streamed" : "materialized");
    for (const auto& [name, bit] : r.witness)
      std::printf("    %s = %s\n", name.c_str(), bit ? "true" : "false");
  }
  return all_hold ? 0 : 1;
}

int cmd_graph(const std::string& file, const std::string& stage) {
  CheckedSystem sys = load(file);
  if (sys.specs.empty() && stage == "reduced")
    throw Error(ErrorKind::BadParams,
                "the reduced stage needs a specification");
  std::vector<int> kappa;
  std::optional<Analysis> a;
  UnfoldedModel bare;
  if (!sys.specs.empty()) {
    a = analyze(sys, sys.specs[select_spec(sys, std::nullopt)], false);
    kappa = a->kappa;
  } else {
    bare = unfold(sys, sys.horizon);
  }
  const Digraph& g = a ? a->model.g : bare.g;
  if (stage == "unfolded") {
    std::printf("%s", dot_directed(g, kappa).c_str());
  } else if (stage == "moralized") {
    std::printf("%s", dot_moralized(g, kappa).c_str());
  } else {
    std::vector<int> boxed;
    Digraph reduced = reduced_graph(*a, &boxed);
    std::printf("%s", dot_directed(reduced, boxed).c_str());
  }
  return 0;
}

int cmd_bench(const BenchSpec& spec, const std::string& csv_path) {
  std::vector<BenchRow> rows = run_bench(spec);
  std::printf("%-10s %5s %-9s %4s %12s %-8s %5s %6s\n", "family", "size",
              "algo", "runs", "seconds", "verdict", "kept", "total");
  for (const auto& r : rows)
    std::printf("%-10s %5d %-9s %4d %12.6f %-8s %5d %6d\n", r.family.c_str(),
                r.size, r.algo.c_str(), r.runs, r.seconds, r.verdict.c_str(),
                r.kept_vars, r.total_vars);
  if (!csv_path.empty()) {
    write_file(csv_path, bench_csv(rows));
    std::printf("wrote %s\n", csv_path.c_str());
  }
  return 0;
}

int cmd_gen(const std::string& family, int size, const std::string& out) {
  std::string text = generate_family(family, size);
  if (out.empty())
    std::printf("%s", text.c_str());
  else
    write_file(out, text);
  return 0;
}

// "A..B" or a single size.
void parse_sizes(const std::string& text, int& lo, int& hi) {
  size_t dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      lo = hi = std::stoi(text);
    } else {
      lo = std::stoi(text.substr(0, dots));
      hi = std::stoi(text.substr(dots + 2));
    }
  } catch (const std::exception&) {
    throw Error(ErrorKind::BadParams, "bad --sizes '" + text + "'");
  }
  if (lo > hi)
    throw Error(ErrorKind::BadParams, "bad --sizes '" + text + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"epistemic model checker for straightline multi-agent programs"};
  app.require_subcommand(1);

  std::string file, label, algo = "ci", dot_prefix, stage = "unfolded";
  bool json_out = false;
  auto* check = app.add_subcommand("check", "verify the specifications of a script");
  check->add_option("file", file, "script file")->required();
  check->add_option("--spec", label, "specification label (default: all)");
  check->add_option("--algo", algo, "ci or baseline")
      ->check(CLI::IsMember({"ci", "baseline"}));
  check->add_flag("--json", json_out, "machine-readable verdict and stats");
  check->add_option("--dot", dot_prefix,
                    "write PREFIX.{unfolded,moralized,reduced}.dot");

  uint64_t max_states = uint64_t{1} << 34;
  auto* oracle = app.add_subcommand("oracle", "brute-force reference check");
  oracle->add_option("file", file, "script file")->required();
  oracle->add_option("--spec", label, "specification label (default: all)");
  oracle->add_option("--max-states", max_states,
                     "initial-state explosion guard");

  auto* graph = app.add_subcommand("graph", "print the model as DOT");
  graph->add_option("file", file, "script file")->required();
  graph->add_option("--stage", stage, "unfolded, moralized or reduced")
      ->check(CLI::IsMember({"unfolded", "moralized", "reduced"}));

  BenchSpec bspec;
  std::string sizes, csv_path;
  auto* bench = app.add_subcommand("bench", "benchmark a protocol family");
  bench->add_option("--family", bspec.family, "dc, otp, ot, msg or twophase")
      ->required();
  bench->add_option("--sizes", sizes, "size range A..B")->required();
  bench->add_option("--algo", bspec.algos,
                    "ci, baseline or oracle (default: ci baseline)");
  bench->add_option("--spec", label, "specification label (default: first)");
  bench->add_option("--reps", bspec.repetitions, "repetitions per size")
      ->check(CLI::PositiveNumber);
  bench->add_option("--timeout", bspec.timeout_seconds, "seconds per run")
      ->check(CLI::PositiveNumber);
  bench->add_option("--csv", csv_path, "write rows as CSV");
  bench->add_flag("--parallel", bspec.parallel, "run cells concurrently");

  std::string family, out_path;
  int size = 0;
  auto* gen = app.add_subcommand("gen", "print a generated protocol script");
  gen->add_option("--family", family, "dc, otp, ot, msg or twophase")
      ->required();
  gen->add_option("--size", size, "instance size")->required();
  gen->add_option("-o,--out", out_path, "output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  std::optional<std::string> label_opt;
  if (!label.empty()) label_opt = label;
  try {
    if (check->parsed())
      return cmd_check(file, label_opt, algo, json_out, dot_prefix);
    if (oracle->parsed()) return cmd_oracle(file, label_opt, max_states);
    if (graph->parsed()) return cmd_graph(file, stage);
    if (bench->parsed()) {
      parse_sizes(sizes, bspec.size_lo, bspec.size_hi);
      bspec.spec_label = label_opt;
      return cmd_bench(bspec, csv_path);
    }
    if (gen->parsed()) return cmd_gen(family, size, out_path);
  } catch (const DeadlineExceeded& e) {
    std::fprintf(stderr, "error: deadline exceeded in %s\n", e.where.c_str());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
