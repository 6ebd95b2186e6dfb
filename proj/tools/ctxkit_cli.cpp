// ctxkit: bounds, ideal predictions, simulation and MNCHV analysis for the
// S(C7), S(C7bar) and S(C7 x C7bar) noncontextuality inequalities.
//
// Exit status: 0 success, 2 validation/usage error, 3 SDP non-convergence.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "ctxkit/ctxkit.hpp"

namespace {

using ctxkit::io::json;

constexpr int kExitValidation = 2;
constexpr int kExitConvergence = 3;

struct Common {
  std::string out;
  std::string format = "json";
  double tol = 1e-7;
  double feasibility_tol = 1e-8;
  double gap_tol = 1e-7;
  double sigma = 3.0;
};

std::string read_text(const std::string& path) {
  if (path.empty() || path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ctxkit::ValidationError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ctxkit::ValidationError("cannot write '" + path + "'");
  out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

ctxkit::ThetaOptions theta_options(const Common& c) {
  ctxkit::ThetaOptions o;
  o.tol = c.tol;
  o.sdp.feasibility_tol = c.feasibility_tol;
  o.sdp.gap_tol = c.gap_tol;
  return o;
}

ctxkit::ReportOptions report_options(const Common& c) {
  ctxkit::ReportOptions o;
  o.sigma_threshold = c.sigma;
  return o;
}

void require_format(const Common& c) {
  if (c.format != "json" && c.format != "markdown")
    throw ctxkit::InvalidArgument("--format must be json or markdown");
}

json holes_to_json(const std::vector<std::vector<int>>& holes) {
  json a = json::array();
  for (const auto& h : holes) {
    json s = json::array();
    for (int v : h) s.push_back(v + 1);
    a.push_back(s);
  }
  return a;
}

// ---------------------------------------------------------------------------

int run_bounds(const Common& c, const std::string& inequality, const std::string& graph_file, int hole_len) {
  require_format(c);
  using namespace ctxkit;
  ExclusivityGraph g;
  std::optional<double> closed_form, qlm, exclusivity;
  std::string name;
  if (!graph_file.empty()) {
    g = io::graph_from_json(io::parse_document(read_text(graph_file), graph_file));
    name = graph_file;
  } else if (inequality == "product") {
    g = or_product(cycle_graph(7), complement(cycle_graph(7)));
    closed_form = product_quantum_bound();
    exclusivity = kExclusivityBoundProduct;
    name = "product";
  } else {
    const Inequality q = parse_inequality(inequality);
    g = exclusivity_graph(q);
    closed_form = odd_cycle_theta_closed_form(7, q == Inequality::c7bar);
    if (q == Inequality::c7) qlm = qlm_bound_c7();
    name = to_string(q);
  }
  const int alpha = independence_number(g);
  const ThetaResult theta = lovasz_theta(g, theta_options(c));

  json j{{"graph", name},
         {"n", g.size()},
         {"edges", g.edge_count()},
         {"alpha", alpha},
         {"theta", io::format_number(theta.theta)},
         {"theta_lower", io::format_number(theta.lower)},
         {"theta_upper", io::format_number(theta.upper)},
         {"theta_closed_form", io::number_or_null(closed_form)},
         {"qlm", io::number_or_null(qlm)},
         {"exclusivity", io::number_or_null(exclusivity)}};
  if (qlm) j["qlm_expression"] = kQlmBoundC7Expression;
  if (g.size() <= kHoleSearchCap) {
    const HoleDiagnostic d = classicality_diagnostic(g, hole_len);
    j["odd_holes"] = holes_to_json(d.holes);
    j["odd_antiholes"] = holes_to_json(d.antiholes);
    j["nonclassical_possible"] = d.nonclassical_possible();
  }

  if (c.format == "json") {
    write_text(c.out, dump(j));
  } else {
    char buf[256];
    std::ostringstream md;
    md << "| quantity | value |\n|---|---|\n";
    md << "| graph | " << name << " |\n";
    md << "| alpha (NCHV) | " << alpha << " |\n";
    std::snprintf(buf, sizeof buf, "| theta (SDP) | %.4f |\n", theta.theta);
    md << buf;
    if (closed_form) {
      std::snprintf(buf, sizeof buf, "| theta (closed form) | %.4f |\n", *closed_form);
      md << buf;
    }
    if (qlm) {
      std::snprintf(buf, sizeof buf, "| QLM | %.4f |\n", *qlm);
      md << buf;
    }
    if (exclusivity) {
      std::snprintf(buf, sizeof buf, "| E-principle | %.4f |\n", *exclusivity);
      md << buf;
    }
    write_text(c.out, md.str());
  }
  return 0;
}

int run_predict(const Common& c, const std::string& inequality, const std::string& realization_out) {
  require_format(c);
  using namespace ctxkit;
  const Inequality q = parse_inequality(inequality);
  const VectorRealization r = build_realization(q);
  check_orthonormal_representation(r);
  const ProbabilityTable t = ideal_table(r, q);
  if (!realization_out.empty()) write_text(realization_out, dump(io::realization_to_json(r)));
  write_text(c.out, c.format == "json" ? dump(io::table_to_json(t)) : io::render_table_markdown(t, t));
  return 0;
}

int run_simulate(const Common& c, const std::string& inequality, const std::string& realization_file,
                 const std::string& noise, double mean_counts, std::uint64_t seed) {
  using namespace ctxkit;
  VectorRealization r;
  Inequality q;
  if (!realization_file.empty()) {
    r = io::realization_from_json(io::parse_document(read_text(realization_file), realization_file));
    const auto found = io::realization_inequality(r);
    if (!found) throw InvalidArgument("realization does not match C7 or C7bar");
    q = *found;
    if (!inequality.empty() && parse_inequality(inequality) != q)
      throw InvalidArgument("--inequality disagrees with the realization");
  } else {
    q = parse_inequality(inequality.empty() ? "C7" : inequality);
    r = build_realization(q);
  }
  const NoiseModel model = parse_noise(noise);
  const ProbabilityTable ideal = ideal_table(r, q);
  const ProbabilityTable noisy = apply_noise(ideal, model, &r, seed);
  const ProbabilityTable sampled = sample_counts(noisy, mean_counts, seed);
  json meta{{"seed", seed},
            {"noise", noise.empty() ? "none" : noise},
            {"mean_counts", io::format_number(mean_counts)},
            {"generator", "philox4x32-10"}};
  write_text(c.out, dump(io::counts_to_json(sampled, meta)));
  return 0;
}

int run_analyze(const Common& c, const std::string& in) {
  require_format(c);
  using namespace ctxkit;
  const ProbabilityTable t = io::table_from_json(io::parse_document(read_text(in), in), in);
  const AnalysisReport r = analyze_table(t, theta_options(c), report_options(c));
  write_text(c.out, c.format == "json" ? dump(io::report_to_json(r)) : io::render_report_markdown(r));
  return 0;
}

int run_combine(const Common& c, const std::vector<std::string>& inputs) {
  require_format(c);
  using namespace ctxkit;
  if (inputs.size() != 2) throw InvalidArgument("combine needs exactly two --in files");
  std::vector<ProbabilityTable> tables;
  std::vector<AnalysisReport> reports;
  for (const auto& path : inputs) {
    const json j = io::parse_document(read_text(path), path);
    if (j.is_object() && j.contains("S"))
      reports.push_back(io::report_from_json(j));
    else
      tables.push_back(io::table_from_json(j, path));
  }
  AnalysisReport product;
  if (tables.size() == 2) {
    if (tables[0].inequality == Inequality::c7bar) std::swap(tables[0], tables[1]);
    product = combine_product(tables[0], tables[1], report_options(c));
  } else {
    // Mixed or report-only input: reduce tables to reports first.
    for (const auto& t : tables) reports.push_back(analyze_table(t, theta_options(c), report_options(c)));
    if (reports[0].inequality == "C7bar") std::swap(reports[0], reports[1]);
    product = combine_reports(reports[0], reports[1], report_options(c));
  }
  write_text(c.out, c.format == "json" ? dump(io::report_to_json(product)) : io::render_report_markdown(product));
  return 0;
}

int run_report(const Common& c, const std::string& in) {
  using namespace ctxkit;
  const json j = io::parse_document(read_text(in), in);
  if (j.is_object() && j.contains("S")) {
    write_text(c.out, io::render_report_markdown(io::report_from_json(j)));
    return 0;
  }
  const ProbabilityTable t = io::table_from_json(j, in);
  const ProbabilityTable theory = ideal_table(build_realization(t.inequality), t.inequality);
  write_text(c.out, io::render_table_markdown(t, theory));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounds, predictions, simulation and MNCHV analysis for C7 / C7bar noncontextuality tests"};
  app.require_subcommand(1);
  Common common;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", common.out, "Output file (default stdout)");
    sub->add_option("--format", common.format, "json or markdown")->capture_default_str();
    sub->add_option("--tol", common.tol, "Lovasz theta bracket width")->capture_default_str();
    sub->add_option("--feasibility-tol", common.feasibility_tol, "SDP feasibility tolerance")->capture_default_str();
    sub->add_option("--gap-tol", common.gap_tol, "SDP relative duality-gap tolerance")->capture_default_str();
    sub->add_option("--sigma", common.sigma, "Verdict threshold in standard deviations")->capture_default_str();
  };

  std::string inequality;
  std::string graph_file;
  int hole_len = 9;
  auto* bounds = app.add_subcommand("bounds", "Classical, quantum, QLM and E bounds");
  add_common(bounds);
  bounds->add_option("--inequality", inequality, "C7, C7bar or product");
  bounds->add_option("--graph", graph_file, "Graph JSON file instead of a named inequality");
  bounds->add_option("--hole-len", hole_len, "Longest odd hole searched")->capture_default_str();

  std::string realization_out;
  auto* predict = app.add_subcommand("predict", "Ideal quantum probability table");
  add_common(predict);
  predict->add_option("--inequality", inequality, "C7 or C7bar")->required();
  predict->add_option("--realization-out", realization_out, "Also write the realization JSON here");

  std::string realization_file;
  std::string noise = "none";
  double mean_counts = 1e6;
  std::uint64_t seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Synthetic photon-count data");
  add_common(simulate);
  simulate->add_option("--inequality", inequality, "C7 or C7bar (default C7, or from --realization)");
  simulate->add_option("--realization", realization_file, "Realization JSON");
  simulate->add_option("--noise", noise, "none | depolarizing:V | jitter:SIGMA | bias:ROW:OUTCOME:DELTA,...")
      ->capture_default_str();
  simulate->add_option("--mean-counts", mean_counts, "Mean total counts per context")->capture_default_str();
  simulate->add_option("--seed", seed, "RNG seed")->capture_default_str();

  std::vector<std::string> inputs;
  auto* analyze = app.add_subcommand("analyze", "S, epsilon and verdicts for a count file or table");
  add_common(analyze);
  analyze->add_option("--in", inputs, "Input file (default stdin)")->expected(0, 1);

  auto* combine = app.add_subcommand("combine", "Product-inequality report from a C7 and a C7bar input");
  add_common(combine);
  combine->add_option("--in", inputs, "Two table, count or report files")->expected(2)->required();

  auto* report = app.add_subcommand("report", "Markdown rendering of a table, count file or report");
  add_common(report);
  report->add_option("--in", inputs, "Input file (default stdin)")->expected(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  const std::string first_input = inputs.empty() ? "-" : inputs.front();
  try {
    if (*bounds) {
      if (graph_file.empty() && inequality.empty()) throw ctxkit::InvalidArgument("bounds needs --inequality or --graph");
      return run_bounds(common, inequality, graph_file, hole_len);
    }
    if (*predict) return run_predict(common, inequality, realization_out);
    if (*simulate) return run_simulate(common, inequality, realization_file, noise, mean_counts, seed);
    if (*analyze) return run_analyze(common, first_input);
    if (*combine) return run_combine(common, inputs);
    if (*report) return run_report(common, first_input);
  } catch (const ctxkit::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << " (best primal " << e.primal() << ", dual " << e.dual() << ")\n";
    return kExitConvergence;
  } catch (const ctxkit::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
