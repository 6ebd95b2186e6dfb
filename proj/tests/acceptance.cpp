// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
//
// usage: acceptance <path-to-ctxkit-cli> [work-dir]

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ctxkit/ctxkit.hpp"

namespace fs = std::filesystem;
using namespace ctxkit;
using io::json;

namespace {

// Tolerances pinned here, one block per criterion.
constexpr double kAlphaThetaPaperTol = 1e-4;    // 1: SDP vs quoted 3.3177 / 2.1099
constexpr double kThetaClosedFormTol = 1e-9;    // 1: SDP vs closed forms
constexpr double kThetaProductTol = 1e-6;       // 1: theta * theta-bar vs 7
constexpr double kBoundsRuntimeSec = 10.0;      // 1
constexpr double kPredictRuntimeSec = 1.0;      // 2
constexpr double kEdgeOrthTol = 1e-10;          // 3
constexpr double kUnitNormTol = 1e-12;          // 3
constexpr double kRealizationVsSdpTol = 1e-5;   // 3
constexpr double kSErrorMatchTol = 5e-4;        // 4: reported vs quoted S error
constexpr double kChileEpsilonCap = 0.0089;     // 4
constexpr double kProductSevenTol = 1e-4;       // 5
constexpr double kFactorizationTol = 1e-12;     // 5
constexpr double kSpreadRelTol = 0.15;          // 6
constexpr double kExceedFraction = 0.99;        // 6
constexpr double kStatsRuntimeSec = 60.0;       // 6

std::string g_cli;
fs::path g_work;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

int run_cli(const std::string& args) {
  const std::string cmd = quote(g_cli) + " " + args + " 2>" + quote((g_work / "stderr.txt").string());
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

void write_json(const fs::path& p, const json& j) {
  std::ofstream out(p, std::ios::binary);
  out << j.dump(2) << "\n";
}

double num(const json& j) { return io::read_number(j, ""); }

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto c7 = cycle_graph(7);
  const auto c7bar = complement(c7);
  const auto prod = or_product(c7, c7bar);
  const int a1 = independence_number(c7), a2 = independence_number(c7bar), a3 = independence_number(prod);
  o.require(a1 == 3 && a2 == 2 && a3 == 6, "alpha values");

  ThetaOptions opt;
  opt.tol = 1e-10;
  const double t1 = lovasz_theta(c7, opt).theta;
  const double t2 = lovasz_theta(c7bar, opt).theta;
  o.require(std::abs(t1 - 3.3177) <= kAlphaThetaPaperTol, "theta(C7) vs 3.3177");
  o.require(std::abs(t2 - 2.1099) <= kAlphaThetaPaperTol, "theta(C7bar) vs 2.1099");
  const double d1 = std::abs(t1 - odd_cycle_theta_closed_form(7, false));
  const double d2 = std::abs(t2 - odd_cycle_theta_closed_form(7, true));
  o.require(d1 <= kThetaClosedFormTol && d2 <= kThetaClosedFormTol, "theta vs closed forms");
  o.require(std::abs(t1 * t2 - 7.0) <= kThetaProductTol, "theta product vs 7");
  const double elapsed = seconds_since(t0);
  o.require(elapsed < kBoundsRuntimeSec, "runtime");
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "alpha=%d/%d/%d theta=%.6f/%.6f |closed-form diff|=%.1e/%.1e product=%.9f (%.2fs)", a1, a2,
                a3, t1, t2, d1, d2, t1 * t2, elapsed);
  o.detail << buf;
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  struct Case {
    const char* name;
    double row;
    double sum;
  };
  for (const Case c : {Case{"C7", 0.474, 3.318}, Case{"C7bar", 0.301, 2.110}}) {
    const fs::path out = g_work / (std::string("predict_") + c.name + ".json");
    o.require(run_cli(std::string("predict --inequality ") + c.name + " --out " + quote(out.string())) == 0,
              std::string("predict ") + c.name);
    const json t = read_json(out);
    double sum = 0.0;
    int rows = 0;
    for (const auto& ctx : t["contexts"]) {
      const double p = num(ctx["target_probability"]);
      sum += p;
      ++rows;
      o.require(std::lround(p * 1000) == std::lround(c.row * 1000), std::string(c.name) + " row at 3 dp");
    }
    o.require(rows == 7, "seven rows");
    o.require(std::lround(sum * 1000) == std::lround(c.sum * 1000), std::string(c.name) + " sum at 3 dp");
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s rows %.3f sum %.3f; ", c.name, num(t["contexts"][0]["target_probability"]),
                  sum);
    o.detail << buf;
  }
  const double elapsed = seconds_since(t0);
  o.require(elapsed < kPredictRuntimeSec, "runtime");
  char buf[32];
  std::snprintf(buf, sizeof buf, "(%.2fs)", elapsed);
  o.detail << buf;
  return o;
}

Outcome criterion3() {
  Outcome o;
  for (auto ineq : {Inequality::c7, Inequality::c7bar}) {
    const auto r = build_realization(ineq);
    const auto d = orthonormality_defect(r);
    o.require(d.max_edge_overlap <= kEdgeOrthTol, "edge orthogonality");
    o.require(d.max_norm_deviation <= kUnitNormTol && d.state_norm_deviation <= kUnitNormTol, "unit norms");
    const auto t = ideal_table(r, ineq);
    const double s = evaluate_S(t).value;
    const double theta = lovasz_theta(exclusivity_graph(ineq), 1e-9).theta;
    o.require(std::abs(s - theta) <= kRealizationVsSdpTol, "S vs SDP optimum");
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s max|<a|b>|=%.1e max||v|-1|=%.1e |S-theta|=%.1e; ", to_string(ineq).c_str(),
                  d.max_edge_overlap, d.max_norm_deviation, std::abs(s - theta));
    o.detail << buf;
  }
  return o;
}

// Count file whose target probabilities are `targets` and whose uniform
// per-context total N makes the quadrature S error equal `s_error`. Other
// marginals follow the neighbouring rows' targets, shifted by `shift[i]`
// and capped so each context stays normalizable.
json synthesize_counts(Inequality ineq, const std::array<double, 7>& targets, double s_error,
                       const std::array<double, 7>& shift) {
  double var_sum = 0.0;
  for (double p : targets) var_sum += p * (1 - p);
  const double n = std::round(var_sum / (s_error * s_error));
  const auto contexts = inequality_contexts(ineq);
  json rows = json::array();
  for (int i = 0; i < 7; ++i) {
    const Context& c = contexts[i];
    json outcomes = json::object();
    long long used = 0;
    for (std::size_t s = 0; s < c.measurements.size(); ++s) {
      const int m = c.measurements[s];
      double p = s == 0 ? targets[i] : targets[m - 1];
      if (s == 1) p += shift[i];
      // Table II has 0.488 + 0.513 > 1 in row (6,7): leave room for "rest".
      if (s > 0) p = std::min(p, 1.0 - targets[i] - 0.01);
      const long long k = std::llround(p * n);
      outcomes[std::to_string(m)] = k;
      used += k;
    }
    const long long rest = static_cast<long long>(n) - used;
    if (ineq == Inequality::c7) {
      outcomes["rest"] = rest;
    } else {
      outcomes["rest1"] = rest / 2;
      outcomes["rest2"] = rest - rest / 2;
    }
    rows.push_back({{"measurements", c.measurements}, {"target", c.target_string()}, {"outcomes", outcomes}});
  }
  return {{"inequality", to_string(ineq)},
          {"contexts", rows},
          {"meta", {{"inferred_totals", true}, {"total_per_context", static_cast<long long>(n)}}}};
}

Outcome criterion4() {
  Outcome o;
  struct Paper {
    const char* name;
    Inequality ineq;
    std::array<double, 7> rows;
    double s;
    double s_err;
  };
  const std::array<Paper, 4> tables{{
      {"I", Inequality::c7, {0.488, 0.455, 0.486, 0.467, 0.478, 0.476, 0.462}, 3.313, 0.003},
      {"II", Inequality::c7, {0.462, 0.479, 0.458, 0.482, 0.449, 0.488, 0.513}, 3.332, 0.011},
      {"III", Inequality::c7bar, {0.296, 0.306, 0.308, 0.295, 0.304, 0.309, 0.291}, 2.108, 0.003},
      {"IV", Inequality::c7bar, {0.317, 0.330, 0.315, 0.281, 0.261, 0.286, 0.327}, 2.118, 0.011},
  }};
  const std::array<double, 7> no_shift{};
  for (const auto& t : tables) {
    const fs::path in = g_work / (std::string("table_") + t.name + "_counts.json");
    const fs::path out = g_work / (std::string("table_") + t.name + "_report.json");
    write_json(in, synthesize_counts(t.ineq, t.rows, t.s_err, no_shift));
    o.require(run_cli("analyze --in " + quote(in.string()) + " --out " + quote(out.string())) == 0,
              std::string("analyze Table ") + t.name);
    const json r = read_json(out);
    const double s = num(r["S"]), err = num(r["S_error"]);
    o.require(std::abs(s - t.s) <= t.s_err, std::string("Table ") + t.name + " S within quoted error");
    o.require(std::abs(err - t.s_err) <= kSErrorMatchTol, std::string("Table ") + t.name + " S error");
    o.require(r["inferred_totals"] == true, "inferred totals flagged");
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s: S=%.3f+-%.3f; ", t.name, s, err);
    o.detail << buf;
  }

  // Chile C7 with context-dependent marginals pushing epsilon up to the cap.
  std::array<double, 7> shift{};
  for (int i = 0; i < 7; ++i) shift[i] = (i % 2 ? -1 : 1) * 0.0025;
  const fs::path in = g_work / "table_I_shifted_counts.json";
  const fs::path out = g_work / "table_I_shifted_report.json";
  write_json(in, synthesize_counts(Inequality::c7, tables[0].rows, tables[0].s_err, shift));
  o.require(run_cli("analyze --in " + quote(in.string()) + " --out " + quote(out.string())) == 0, "analyze shifted");
  for (const auto& path : {g_work / "table_I_report.json", out}) {
    const json r = read_json(path);
    const double eps = num(r["epsilon"]["value"]);
    o.require(eps <= kChileEpsilonCap, "Chile epsilon cap");
    o.require(r["verdicts"]["mnchv"]["verdict"] == "exceeds", "exceeds MNCHV");
    o.require(r["verdicts"]["qlm"]["verdict"] == "exceeds", "exceeds QLM");
    char buf[128];
    std::snprintf(buf, sizeof buf, "Chile eps=%.4f z(mnchv)=%.1f z(qlm)=%.1f; ", eps,
                  num(r["verdicts"]["mnchv"]["significance"]), num(r["verdicts"]["qlm"]["significance"]));
    o.detail << buf;
  }

  // Property checks on epsilon.
  for (auto ineq : {Inequality::c7, Inequality::c7bar}) {
    const auto real = build_realization(ineq);
    const auto ideal = ideal_table(real, ineq);
    o.require(epsilon_for(ideal).epsilon == 0.0, "ideal epsilon 0");
    o.require(epsilon_for(apply_noise(ideal, VectorJitter{0.0}, &real, 3)).epsilon == 0.0, "jitter 0 epsilon 0");
  }
  auto bar = ideal_table(build_c7bar_realization(), Inequality::c7bar);
  const double delta = 0.004;
  auto& row = bar.rows[2];
  row.outcome_probabilities[row.context.slot(5)] += delta;
  row.outcome_probabilities.back() -= delta;
  const double eps_delta = epsilon_c7bar(bar).epsilon;
  o.require(std::abs(eps_delta - delta) <= 1e-15, "single-marginal epsilon response");
  char buf[64];
  std::snprintf(buf, sizeof buf, "eps(delta=%.3f)=%.6f", delta, eps_delta);
  o.detail << buf;
  return o;
}

Outcome criterion5() {
  Outcome o;
  const fs::path a = g_work / "predict_C7.json", b = g_work / "predict_C7bar.json";
  if (!fs::exists(a)) run_cli("predict --inequality C7 --out " + quote(a.string()));
  if (!fs::exists(b)) run_cli("predict --inequality C7bar --out " + quote(b.string()));
  const fs::path out = g_work / "product_ideal.json";
  o.require(run_cli("combine --in " + quote(a.string()) + " " + quote(b.string()) + " --out " + quote(out.string())) ==
                0,
            "combine");
  const double s = num(read_json(out)["S"]);
  o.require(std::abs(s - 7.0) <= kProductSevenTol, "ideal product near 7");
  o.require(s <= 7.0 + 1e-9, "ideal product <= 7");

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    auto ta = ideal_table(build_c7_realization(), Inequality::c7);
    auto tb = ideal_table(build_c7bar_realization(), Inequality::c7bar);
    for (auto* t : {&ta, &tb})
      for (auto& r : t->rows) {
        for (double& p : r.outcome_probabilities) p = u(rng);
        const double total = std::accumulate(r.outcome_probabilities.begin(), r.outcome_probabilities.end(), 0.0);
        for (double& p : r.outcome_probabilities) p /= total;
      }
    const double lhs = product_sum(ta, tb);
    const double rhs = evaluate_S(ta).value * evaluate_S(tb).value;
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  o.require(worst <= kFactorizationTol, "49-term factorization");
  char buf[128];
  std::snprintf(buf, sizeof buf, "ideal product S=%.9f max|sum49 - S_A*S_B|=%.1e over 100 pairs", s, worst);
  o.detail << buf;
  return o;
}

Outcome criterion6() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto ideal = ideal_table(build_c7_realization(), Inequality::c7);
  const GraphBounds bounds = graph_bounds(cycle_graph(7));
  const int runs = 1000;
  std::vector<double> s(runs), err(runs);
  int exceed = 0;
  for (int i = 0; i < runs; ++i) {
    const auto report = make_report(sample_counts(ideal, 1e6, static_cast<std::uint64_t>(i)), bounds, qlm_bound_c7());
    s[i] = report.S;
    err[i] = report.S_error;
    const auto& nchv = report.check("nchv");
    if (nchv.significance >= 3.0) ++exceed;
  }
  const double mean = std::accumulate(s.begin(), s.end(), 0.0) / runs;
  double var = 0.0;
  for (double x : s) var += (x - mean) * (x - mean);
  const double spread = std::sqrt(var / (runs - 1));
  const double reported = std::accumulate(err.begin(), err.end(), 0.0) / runs;
  const double rel = std::abs(spread - reported) / reported;
  o.require(rel <= kSpreadRelTol, "empirical spread vs reported error");
  o.require(exceed >= kExceedFraction * runs, "fraction exceeding NCHV at 3 sigma");
  const double elapsed = seconds_since(t0);
  o.require(elapsed < kStatsRuntimeSec, "runtime");
  char buf[200];
  std::snprintf(buf, sizeof buf, "sd(S)=%.6f mean S_error=%.6f (rel diff %.1f%%) exceed NCHV at 3 sigma: %d/%d (%.2fs)",
                spread, reported, 100 * rel, exceed, runs, elapsed);
  o.detail << buf;
  return o;
}

// predict -> simulate -> analyze -> combine -> report, all through the CLI.
std::vector<std::pair<std::string, std::string>> run_pipeline(const fs::path& dir, int seed) {
  fs::create_directories(dir);
  auto p = [&](const char* name) { return quote((dir / name).string()); };
  const std::string s = std::to_string(seed);
  run_cli("bounds --inequality product --out " + p("bounds.json"));
  run_cli("predict --inequality C7 --out " + p("ideal_c7.json") + " --realization-out " + p("real_c7.json"));
  run_cli("predict --inequality C7bar --out " + p("ideal_c7bar.json") + " --realization-out " + p("real_c7bar.json"));
  run_cli("simulate --realization " + p("real_c7.json") + " --noise jitter:0.02 --mean-counts 1e6 --seed " + s +
          " --out " + p("counts_c7.json"));
  run_cli("simulate --inequality C7bar --noise depolarizing:0.97 --mean-counts 1e5 --seed " + s + " --out " +
          p("counts_c7bar.json"));
  run_cli("analyze --in " + p("counts_c7.json") + " --out " + p("report_c7.json"));
  run_cli("analyze --in " + p("counts_c7bar.json") + " --out " + p("report_c7bar.json"));
  run_cli("combine --in " + p("counts_c7.json") + " " + p("counts_c7bar.json") + " --out " + p("product.json"));
  run_cli("combine --in " + p("report_c7.json") + " " + p("report_c7bar.json") + " --out " +
          p("product_from_reports.json"));
  run_cli("report --in " + p("counts_c7.json") + " --out " + p("table_c7.md"));
  std::vector<std::pair<std::string, std::string>> files;
  for (const char* name : {"bounds.json", "ideal_c7.json", "real_c7.json", "ideal_c7bar.json", "real_c7bar.json",
                           "counts_c7.json", "counts_c7bar.json", "report_c7.json", "report_c7bar.json",
                           "product.json", "product_from_reports.json", "table_c7.md"})
    files.emplace_back(name, fs::exists(dir / name) ? slurp(dir / name) : std::string());
  return files;
}

Outcome criterion7() {
  Outcome o;
  const auto a = run_pipeline(g_work / "run_a", 17);
  const auto b = run_pipeline(g_work / "run_b", 17);
  const auto c = run_pipeline(g_work / "run_c", 18);
  int identical = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    o.require(!a[i].second.empty(), a[i].first + " produced");
    if (a[i].second == b[i].second) ++identical;
    else o.require(false, a[i].first + " differs between equal-seed runs");
  }
  o.require(a[5].second != c[5].second, "different seed changes counts");
  o.detail << identical << "/" << a.size() << " outputs byte-identical across equal-seed runs";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <ctxkit-cli> [work-dir]\n";
    return 2;
  }
  g_cli = argv[1];
  g_work = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "ctxkit_acceptance";
  fs::remove_all(g_work);
  fs::create_directories(g_work);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"bound reproduction", criterion1},   {"table theory columns", criterion2},
      {"vector certification", criterion3}, {"experimental-column ingestion", criterion4},
      {"product combination", criterion5},  {"statistical soundness", criterion6},
      {"determinism", criterion7},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
              << "): " << o.detail.str() << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
