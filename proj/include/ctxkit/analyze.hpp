#pragma once

// S values, context-dependence corrections (T-distances and epsilon), the
// MNCHV bounds built from them, and verdicts against every bound.

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctxkit/context.hpp"
#include "ctxkit/error.hpp"
#include "ctxkit/exgraph.hpp"
#include "ctxkit/table.hpp"
#include "ctxkit/theta.hpp"

namespace ctxkit {

struct SValue {
  double value = 0.0;
  double error = 0.0;  // 1 sigma, contexts independent
};

inline SValue evaluate_S(const ProbabilityTable& table) {
  SValue s;
  double var = 0.0;
  for (const TableRow* row : canonical_rows(table)) {
    s.value += row->target_probability();
    var += row->std_error * row->std_error;
  }
  s.error = std::sqrt(var);
  return s;
}

/// Total-variation distance between the outcome distributions of
/// measurement m in contexts a and b.
inline double t_distance(const ProbabilityTable& table, int m, const Context& a, const Context& b) {
  if (!a.contains(m) || !b.contains(m))
    throw InvalidArgument("measurement " + std::to_string(m) + " is not in both " + a.name() + " and " + b.name());
  const double pa = table.row(a).marginal(m);
  const double pb = table.row(b).marginal(m);
  const double tv = 0.5 * (std::abs(pa - pb) + std::abs((1.0 - pa) - (1.0 - pb)));
  if (std::abs(tv - std::abs(pa - pb)) > 1e-12)
    throw std::logic_error("binary T-distance reduction failed for measurement " + std::to_string(m));
  return tv;
}

struct TTerm {
  int measurement;
  Context first;
  Context second;
  double value;
};

struct EpsilonBreakdown {
  std::vector<TTerm> terms;
  double epsilon = 0.0;      // half the sum of all terms
  double nchv_bound = 0.0;
  double mnchv_bound = 0.0;  // nchv_bound + epsilon
};

namespace detail {

inline EpsilonBreakdown finish_epsilon(std::vector<TTerm> terms, double nchv) {
  EpsilonBreakdown e;
  double sum = 0.0;
  for (const auto& t : terms) sum += t.value;
  e.terms = std::move(terms);
  e.epsilon = 0.5 * sum;
  e.nchv_bound = nchv;
  e.mnchv_bound = nchv + e.epsilon;
  return e;
}

inline Context context_starting_at(Inequality ineq, int first) {
  return inequality_contexts(ineq)[static_cast<std::size_t>(wrap7(first) - 1)];
}

}  // namespace detail

/// Measurement j is compared between contexts {j-1, j} and {j, j+1}.
inline EpsilonBreakdown epsilon_c7(const ProbabilityTable& table) {
  if (table.inequality != Inequality::c7) throw InvalidArgument("epsilon_c7 needs a C7 table");
  require_complete(table);
  std::vector<TTerm> terms;
  for (int j = 1; j <= 7; ++j) {
    const Context before = detail::context_starting_at(Inequality::c7, j - 1);
    const Context after = detail::context_starting_at(Inequality::c7, j);
    terms.push_back({j, before, after, t_distance(table, j, before, after)});
  }
  return detail::finish_epsilon(std::move(terms), 3.0);
}

/// Measurement k sits in {k-4,k-2,k}, {k-2,k,k+2} and {k,k+2,k+4}; all
/// three pairwise T-distances enter.
inline EpsilonBreakdown epsilon_c7bar(const ProbabilityTable& table) {
  if (table.inequality != Inequality::c7bar) throw InvalidArgument("epsilon_c7bar needs a C7bar table");
  require_complete(table);
  std::vector<TTerm> terms;
  for (int k = 1; k <= 7; ++k) {
    const Context c1 = detail::context_starting_at(Inequality::c7bar, k - 4);
    const Context c2 = detail::context_starting_at(Inequality::c7bar, k - 2);
    const Context c3 = detail::context_starting_at(Inequality::c7bar, k);
    terms.push_back({k, c1, c2, t_distance(table, k, c1, c2)});
    terms.push_back({k, c1, c3, t_distance(table, k, c1, c3)});
    terms.push_back({k, c2, c3, t_distance(table, k, c2, c3)});
  }
  return detail::finish_epsilon(std::move(terms), 2.0);
}

inline EpsilonBreakdown epsilon_for(const ProbabilityTable& table) {
  return table.inequality == Inequality::c7 ? epsilon_c7(table) : epsilon_c7bar(table);
}

// ---------------------------------------------------------------------------
// Reports

enum class Verdict { exceeds, consistent, below };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::exceeds: return "exceeds";
    case Verdict::consistent: return "consistent";
    case Verdict::below: return "below";
  }
  return "consistent";
}

struct ReportOptions {
  double sigma_threshold = 3.0;
  double equality_tol = 1e-6;  // used only when S has zero error
};

/// One-sided z-score of S against a bound. With zero error the score is 0
/// inside equality_tol and infinite outside it.
inline double significance(double s, double bound, double error, double equality_tol) {
  if (error > 0.0) return (s - bound) / error;
  const double diff = s - bound;
  if (std::abs(diff) <= equality_tol) return 0.0;
  return diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

inline Verdict verdict_for(double z, double threshold) {
  if (z >= threshold) return Verdict::exceeds;
  if (z <= -threshold) return Verdict::below;
  return Verdict::consistent;
}

struct BoundCheck {
  std::string name;  // nchv | mnchv | qlm | quantum | exclusivity
  double bound = 0.0;
  double significance = 0.0;
  Verdict verdict = Verdict::consistent;
};

struct ReportBounds {
  double nchv = 0.0;
  double mnchv = 0.0;
  std::optional<double> qlm;
  double quantum = 0.0;
  std::optional<double> exclusivity;
};

struct AnalysisReport {
  std::string inequality;  // C7 | C7bar | product
  double S = 0.0;
  double S_error = 0.0;
  ReportBounds bounds;
  EpsilonBreakdown epsilon;
  std::string epsilon_formula;
  std::vector<BoundCheck> verdicts;
  ReportOptions options;
  bool inferred_totals = false;

  const BoundCheck& check(const std::string& name) const {
    for (const auto& v : verdicts)
      if (v.name == name) return v;
    throw InvalidArgument("report has no bound '" + name + "'");
  }
  bool has_check(const std::string& name) const {
    for (const auto& v : verdicts)
      if (v.name == name) return true;
    return false;
  }
};

namespace detail {

inline void fill_verdicts(AnalysisReport& r) {
  auto add = [&](const std::string& name, double bound) {
    const double z = significance(r.S, bound, r.S_error, r.options.equality_tol);
    r.verdicts.push_back({name, bound, z, verdict_for(z, r.options.sigma_threshold)});
  };
  r.verdicts.clear();
  add("nchv", r.bounds.nchv);
  add("mnchv", r.bounds.mnchv);
  if (r.bounds.qlm) add("qlm", *r.bounds.qlm);
  add("quantum", r.bounds.quantum);
  if (r.bounds.exclusivity) add("exclusivity", *r.bounds.exclusivity);
}

}  // namespace detail

inline constexpr const char* kEpsilonFormulaC7 = "epsilon = 1/2 * sum_j T(j in {j-1,j}, j in {j,j+1})";
inline constexpr const char* kEpsilonFormulaC7bar =
    "epsilon = 1/2 * sum_k [T(c1,c2) + T(c1,c3) + T(c2,c3)], c1={k-4,k-2,k}, c2={k-2,k,k+2}, c3={k,k+2,k+4}";
inline constexpr const char* kEpsilonFormulaProduct =
    "epsilon = (3 + epsilon_C7) * (2 + epsilon_C7bar) - 6 (independent factor MNCHV bounds)";

/// Full report for a C7 or C7bar table. `qlm` must be empty for C7bar, whose
/// local-measurement maximum is unknown.
inline AnalysisReport make_report(const ProbabilityTable& table, const GraphBounds& bounds,
                                  std::optional<double> qlm = std::nullopt,
                                  std::optional<double> e_bound = std::nullopt,
                                  const ReportOptions& options = {}) {
  if (table.inequality == Inequality::c7bar && qlm)
    throw InvalidArgument("no QLM bound is known for C7bar");
  const SValue s = evaluate_S(table);
  AnalysisReport r;
  r.inequality = to_string(table.inequality);
  r.S = s.value;
  r.S_error = s.error;
  r.epsilon = epsilon_for(table);
  r.epsilon_formula = table.inequality == Inequality::c7 ? kEpsilonFormulaC7 : kEpsilonFormulaC7bar;
  r.bounds.nchv = bounds.alpha;
  r.bounds.mnchv = bounds.alpha + r.epsilon.epsilon;
  r.bounds.qlm = qlm;
  r.bounds.quantum = bounds.theta;
  r.bounds.exclusivity = e_bound;
  r.options = options;
  r.inferred_totals = table.source.inferred_totals;
  detail::fill_verdicts(r);
  return r;
}

/// Report with the standard bounds of the table's inequality: alpha and
/// theta of its exclusivity graph, and the QLM bound for C7.
inline AnalysisReport analyze_table(const ProbabilityTable& table, const ThetaOptions& theta = {},
                                    const ReportOptions& options = {}) {
  const ExclusivityGraph g = exclusivity_graph(table.inequality);
  const GraphBounds b = graph_bounds(g, theta);
  std::optional<double> qlm;
  if (table.inequality == Inequality::c7) qlm = qlm_bound_c7();
  return make_report(table, b, qlm, std::nullopt, options);
}

// ---------------------------------------------------------------------------
// Product inequality

inline AnalysisReport product_report(double s_a, double err_a, double eps_a, double s_b, double err_b,
                                     double eps_b, double quantum_bound, const ReportOptions& options) {
  AnalysisReport r;
  r.inequality = "product";
  r.S = s_a * s_b;
  r.S_error = std::sqrt(std::pow(s_b * err_a, 2) + std::pow(s_a * err_b, 2));
  const double mnchv = (3.0 + eps_a) * (2.0 + eps_b);
  r.epsilon.epsilon = mnchv - 6.0;
  r.epsilon.nchv_bound = 6.0;
  r.epsilon.mnchv_bound = mnchv;
  r.epsilon_formula = kEpsilonFormulaProduct;
  r.bounds.nchv = 6.0;
  r.bounds.mnchv = mnchv;
  r.bounds.quantum = quantum_bound;
  r.bounds.exclusivity = kExclusivityBoundProduct;
  r.options = options;
  detail::fill_verdicts(r);
  return r;
}

inline double product_quantum_bound() {
  return odd_cycle_theta_closed_form(7, false) * odd_cycle_theta_closed_form(7, true);
}

/// Sum over the 49 product contexts of P_A(j-context) * P_B(k-context),
/// for statistically independent experiments.
inline double product_sum(const ProbabilityTable& a, const ProbabilityTable& b) {
  double sum = 0.0;
  for (const TableRow* ra : canonical_rows(a))
    for (const TableRow* rb : canonical_rows(b)) sum += ra->target_probability() * rb->target_probability();
  return sum;
}

/// Combines a C7 table and an independent C7bar table into the product report.
inline AnalysisReport combine_product(const ProbabilityTable& a, const ProbabilityTable& b,
                                      const ReportOptions& options = {},
                                      double quantum_bound = product_quantum_bound()) {
  if (a.inequality != Inequality::c7 || b.inequality != Inequality::c7bar)
    throw InvalidArgument("combine_product needs a C7 table and a C7bar table");
  const SValue sa = evaluate_S(a);
  const SValue sb = evaluate_S(b);
  const double sum49 = product_sum(a, b);
  AnalysisReport r = product_report(sa.value, sa.error, epsilon_c7(a).epsilon, sb.value, sb.error,
                                    epsilon_c7bar(b).epsilon, quantum_bound, options);
  if (std::abs(sum49 - r.S) > 1e-12 * std::max(1.0, std::abs(r.S)))
    throw std::logic_error("49-term product sum disagrees with S_A * S_B");
  r.inferred_totals = a.source.inferred_totals || b.source.inferred_totals;
  return r;
}

/// Same combination from two single-inequality reports (no tables at hand).
inline AnalysisReport combine_reports(const AnalysisReport& a, const AnalysisReport& b,
                                      const ReportOptions& options = {},
                                      double quantum_bound = product_quantum_bound()) {
  if (a.inequality != "C7" || b.inequality != "C7bar")
    throw InvalidArgument("combine_reports needs a C7 report and a C7bar report");
  AnalysisReport r = product_report(a.S, a.S_error, a.epsilon.epsilon, b.S, b.S_error, b.epsilon.epsilon,
                                    quantum_bound, options);
  r.inferred_totals = a.inferred_totals || b.inferred_totals;
  return r;
}

}  // namespace ctxkit
