// Acceptance criteria, one pass/fail line each. Tolerances are pinned here.
//
//   czek_acceptance            run every criterion
//   czek_acceptance --only N   run criterion N; exit 77 when it is skipped
//
// Criteria 1-3 and 7 use the digitized 13-skull data when CZEK_REFERENCE_DATA
// names a directory holding skulls13.csv and skulls13.meta (plus
// tabelle2.csv for criterion 2). Otherwise 1, 3 and 7 run on the synthetic
// fixture and 2 is skipped.

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "czek/dataset.hpp"
#include "czek/experiments.hpp"
#include "czek/matrix_compare.hpp"
#include "czek/random.hpp"
#include "czek/seriation.hpp"
#include "czek_cli/commands.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace czek;

namespace {

// --- pinned tolerances -----------------------------------------------------
constexpr double kC1MaxSeconds = 1.0;
constexpr double kC2RelativeTolerance = 0.04;
constexpr double kC2MaxExceedingFraction = 0.10;  // "all but a few cells"
constexpr double kC3ExactMaxSeconds = 1.0;
constexpr double kC3PipelineMaxSeconds = 5.0;
constexpr int kC3RandomPermutations = 1000;
constexpr double kC3Slack = 1e-9;
constexpr int kC4Instances = 100;
constexpr double kC4MaxSeconds = 30.0;
constexpr int kC5Instances = 50;
constexpr int kC5Seeds = 5;
constexpr double kC5Gap = 0.02;
constexpr double kC5MaxSeconds = 60.0;
constexpr std::size_t kC7TargetSetups = 96;
constexpr double kC7MaxSeconds = 120.0;
constexpr std::size_t kC7ReferenceNotInterior = 65;

enum class Status { pass, fail, skip };

struct Outcome {
  Status status;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct DataSource {
  std::string table;
  std::string meta;
  bool real = false;
  std::string name() const { return real ? "reference data" : "synthetic fixture"; }
};

std::optional<fs::path> reference_dir() {
  const char* env = std::getenv("CZEK_REFERENCE_DATA");
  if (!env || !*env) return std::nullopt;
  const fs::path dir(env);
  if (!fs::exists(dir / "skulls13.csv") || !fs::exists(dir / "skulls13.meta")) return std::nullopt;
  return dir;
}

DataSource data_source() {
  if (const auto dir = reference_dir())
    return {(*dir / "skulls13.csv").string(), (*dir / "skulls13.meta").string(), true};
  const fs::path f = CZEK_FIXTURE_DIR;
  return {(f / "skulls13.csv").string(), (f / "skulls13.meta").string(), false};
}

fs::path scratch(const std::string& name) {
  auto p = fs::path(CZEK_SCRATCH_DIR) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

SetupSpec czekanowski_setup() {
  SetupSpec s;
  s.distance = "dd";
  s.variable_set = "paper27";
  return s;
}

DistanceMatrix dd_matrix(const ObservationTable& t) {
  const auto s = czekanowski_setup();
  return setup_matrix(prepare_table(t, s), s, default_registry(), {});
}

// --- criteria ----------------------------------------------------------------

Outcome c1() {
  // Percentages as printed. Kannstatt is printed as 18.6, which no count out
  // of 27 rounds to (5/27 = 18.5%); the fixture is built with 5 missing, so
  // only a real-data run is held to the printed figure.
  const auto src = data_source();
  const std::vector<std::pair<std::string, std::string>> expected{
      {"Spy I", "7.4%"},       {"Spy II", "14.8%"},      {"Krapina C", "40.7%"},
      {"Krapina D", "59.3%"},  {"Neandertal", "0.0%"},   {"Gibraltar", "48.1%"},
      {"Pithecanthropus", "22.2%"}, {"Kannstatt", src.real ? "18.6%" : "18.5%"},
      {"Galey Hill", "55.6%"}, {"Brunn", "55.6%"},       {"Brüx", "0.0%"},
      {"Egisheim", "66.7%"},   {"Nowosiółka", "0.0%"}};
  Stopwatch sw;
  std::ostringstream out, err;
  const int code = cli::run({"inspect", "--table", src.table, "--meta", src.meta, "--variable-set", "paper27"},
                            out, err);
  const double secs = sw.seconds();
  if (code != 0) return {Status::fail, "inspect exited " + std::to_string(code) + ": " + err.str()};

  std::vector<std::string> wrong;
  const std::string text = out.str();
  for (const auto& [label, pct] : expected) {
    std::istringstream lines(text);
    std::string line;
    bool ok = false;
    while (std::getline(lines, line)) {
      if (line.rfind("  " + label + " ", 0) != 0) continue;
      ok = line.size() >= pct.size() && line.compare(line.size() - pct.size(), pct.size(), pct) == 0 &&
           line[line.size() - pct.size() - 1] == ' ';
    }
    if (!ok) wrong.push_back(label);
  }
  const bool overall = text.find("= 29.9%") != std::string::npos;
  const bool fast = secs < kC1MaxSeconds;
  const bool pass = wrong.empty() && overall && fast;
  std::string detail = fmt::format("{}: 13 per-skull percentages {}, overall 29.9% {}, {:.3f} s (< {} s)",
                                   src.name(), wrong.empty() ? "match" : "MISMATCH", overall ? "matches" : "MISSING",
                                   secs, kC1MaxSeconds);
  for (const auto& w : wrong) detail += "; wrong: " + w;
  return {pass ? Status::pass : Status::fail, detail};
}

Outcome c2() {
  const auto dir = reference_dir();
  if (!dir || !fs::exists(*dir / "tabelle2.csv"))
    return {Status::skip,
            "needs CZEK_REFERENCE_DATA with skulls13.csv, skulls13.meta and tabelle2.csv "
            "(companion data unreachable from this build)"};
  const auto table = load_table((*dir / "skulls13.csv").string(), (*dir / "skulls13.meta").string());
  const auto ours = dd_matrix(table);
  const auto reference = load_matrix((*dir / "tabelle2.csv").string());
  std::vector<std::pair<std::string, std::string>> excluded;
  for (const char* gh : {"Galey Hill", "Galley Hill"})
    if (ours.find_label(gh)) excluded.emplace_back("Neandertal", gh);
  const auto c = compare_matrices(ours, reference, kC2RelativeTolerance, excluded);
  std::string hist;
  for (std::size_t b = 0; b < c.histogram.size(); ++b)
    hist += fmt::format("{}{:.0f}%:{}", b ? " " : "", 100 * c.bin_edges[b], c.histogram[b]);
  const bool pass = c.exceeding_fraction() <= kC2MaxExceedingFraction;
  return {pass ? Status::pass : Status::fail,
          fmt::format("{} of {} cells differ by >= {:.0f}% ({:.1f}%, allowed {:.0f}%); histogram [{}]",
                      c.exceeding, c.compared, 100 * kC2RelativeTolerance, 100 * c.exceeding_fraction(),
                      100 * kC2MaxExceedingFraction, hist)};
}

Outcome c3() {
  const auto src = data_source();
  const auto table = load_table(src.table, src.meta);
  const auto m = dd_matrix(table);
  Stopwatch sw;
  const auto exact = solve_exact(m);
  const double exact_secs = sw.seconds();

  bool beats_all = exact.objective <= path_length(Permutation::identity(m.size()), m) + kC3Slack;
  Rng rng(20240101);
  for (int k = 0; k < kC3RandomPermutations; ++k)
    beats_all = beats_all &&
                exact.objective <= path_length(Permutation(random_order(m.size(), rng)), m) + kC3Slack;

  const auto out_dir = scratch("acceptance_c3");
  Stopwatch pw;
  std::ostringstream out, err;
  const int code = cli::run({"pipeline", "--table", src.table, "--meta", src.meta, "--variable-set", "paper27",
                             "--out-dir", out_dir.string()},
                            out, err);
  const double pipe_secs = pw.seconds();
  const bool artifacts = fs::exists(out_dir / "diagram.svg") && fs::exists(out_dir / "diagram.txt");
  const bool pass = m.size() == 13 && exact_secs < kC3ExactMaxSeconds && beats_all && code == 0 && artifacts &&
                    pipe_secs < kC3PipelineMaxSeconds;
  return {pass ? Status::pass : Status::fail,
          fmt::format("{}: n={}, exact {:.3f} s (< {} s), objective {:.6g} <= identity and {} random "
                      "permutations: {}; pipeline exit {} in {:.3f} s (< {} s)",
                      src.name(), m.size(), exact_secs, kC3ExactMaxSeconds, exact.objective,
                      kC3RandomPermutations, beats_all ? "yes" : "NO", code, pipe_secs, kC3PipelineMaxSeconds)};
}

Outcome c4() {
  std::mt19937_64 gen(4444);
  Stopwatch sw;
  int mismatches = 0;
  for (int t = 0; t < kC4Instances; ++t) {
    const std::size_t n = 4 + static_cast<std::size_t>(t % 5);
    // Integer weights keep every path sum exact, so equality is exact.
    const auto w = oracle::random_weights(n, gen, true, 1000.0);
    const auto brute = oracle::brute_force(w, n);
    if (solve_exact(oracle::matrix(w, n)).objective != brute.best) ++mismatches;
  }
  const double secs = sw.seconds();
  const bool pass = mismatches == 0 && secs < kC4MaxSeconds;
  return {pass ? Status::pass : Status::fail,
          fmt::format("{} instances, n in 4..8, {} mismatches against n!/2 enumeration, {:.2f} s (< {} s)",
                      kC4Instances, mismatches, secs, kC4MaxSeconds)};
}

Outcome c5() {
  std::mt19937_64 gen(5555);
  Stopwatch sw;
  int within = 0;
  double worst = 0.0;
  for (int t = 0; t < kC5Instances; ++t) {
    const std::size_t n = 10 + static_cast<std::size_t>(t % 7);
    const auto m = oracle::matrix(oracle::random_weights(n, gen, false), n);
    const double exact = solve_exact(m).objective;
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < kC5Seeds; ++s)
      best = std::min(best, solve_anneal(m, static_cast<std::uint64_t>(1000 * t + s)).objective);
    const double gap = (best - exact) / exact;
    worst = std::max(worst, gap);
    within += gap <= kC5Gap;
  }
  const double secs = sw.seconds();
  const bool pass = within == kC5Instances && secs < kC5MaxSeconds;
  return {pass ? Status::pass : Status::fail,
          fmt::format("{}/{} instances (n in 10..16) within {:.0f}% of exact, worst gap {:.3f}%, {:.2f} s (< {} s)",
                      within, kC5Instances, 100 * kC5Gap, 100 * worst, secs, kC5MaxSeconds)};
}

Outcome c6() {
  doctest::Context ctx;
  std::ostringstream log;
  ctx.setCout(&log);
  ctx.addFilter("test-suite", "properties");
  ctx.setOption("no-version", true);
  ctx.setOption("no-intro", true);
  Stopwatch sw;
  const int rc = ctx.run();
  const std::string text = log.str();
  const auto summary = text.find("[doctest] test cases:");
  std::string line = summary == std::string::npos ? "" : text.substr(summary);
  line = line.substr(0, line.find('\n'));
  if (rc != 0) std::cerr << text;
  return {rc == 0 ? Status::pass : Status::fail,
          fmt::format("property suite, no external data: {} ({:.2f} s)", line, sw.seconds())};
}

Outcome c7() {
  const auto src = data_source();
  const auto cfg = load_grid_config((fs::path(CZEK_FIXTURE_DIR) / "grid96.conf").string());
  const auto table = load_table(src.table, src.meta);
  const auto out_dir = scratch("acceptance_c7");
  Stopwatch sw;
  const auto run = run_grid(table, cfg, default_registry(), out_dir, std::max(1u, std::thread::hardware_concurrency()));
  const double secs = sw.seconds();
  const auto s = summarize(run.reports);
  const std::size_t runnable = run.expansion.setups.size();
  const std::size_t errors = s.by_category.at("error");
  const bool pass = runnable == kC7TargetSetups && errors == 0 && secs < kC7MaxSeconds;
  return {pass ? Status::pass : Status::fail,
          fmt::format("{}: {} setups expanded (target {}), {} skipped, {} errors, {:.2f} s (< {} s); "
                      "focal not interior_own_group in {} of {} (reference: {} of 96, classified by hand, "
                      "exact agreement not expected)",
                      src.name(), runnable, kC7TargetSetups, run.expansion.skipped.size(), errors, secs,
                      kC7MaxSeconds, s.not_interior_own_group, runnable, kC7ReferenceNotInterior)};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria{
    {"missingness audit", c1},      {"distance table replication", c2}, {"exact seriation at n=13", c3},
    {"exact vs enumeration", c4},   {"annealing quality", c5},          {"property suite", c6},
    {"setup grid", c7},
};

}  // namespace

int main(int argc, char** argv) {
  std::optional<std::size_t> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      only = std::stoul(argv[++i]);
    } else {
      std::cerr << "usage: czek_acceptance [--only N]\n";
      return 2;
    }
  }
  if (only && (*only < 1 || *only > kCriteria.size())) {
    std::cerr << "criterion must be 1.." << kCriteria.size() << "\n";
    return 2;
  }

  int failed = 0, skipped = 0, ran = 0;
  for (std::size_t k = 0; k < kCriteria.size(); ++k) {
    if (only && *only != k + 1) continue;
    ++ran;
    Outcome o;
    try {
      o = kCriteria[k].second();
    } catch (const std::exception& e) {
      o = {Status::fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIP";
    std::cout << fmt::format("[{}] criterion {} ({}): {}\n", tag, k + 1, kCriteria[k].first, o.detail);
    failed += o.status == Status::fail;
    skipped += o.status == Status::skip;
  }
  if (failed) return 1;
  if (skipped == ran) return 77;
  return 0;
}
