// Bounds for C7, the ideal table from the qutrit realization, and one
// noisy simulated run pushed through the MNCHV analysis.

#include <cstdio>

#include "ctxkit/ctxkit.hpp"

int main() {
  using namespace ctxkit;

  const ExclusivityGraph c7 = cycle_graph(7);
  const GraphBounds bounds = graph_bounds(c7);
  std::printf("alpha(C7) = %d, theta(C7) = %.6f, QLM = %.4f\n", bounds.alpha, bounds.theta, qlm_bound_c7());

  const VectorRealization r = build_c7_realization();
  const ProbabilityTable ideal = ideal_table(r, Inequality::c7);
  std::printf("%s\n", io::render_table_markdown(ideal, ideal).c_str());

  const ProbabilityTable noisy = apply_noise(ideal, VectorJitter{0.02}, &r, 7);
  const ProbabilityTable counts = sample_counts(noisy, 1e5, 7);
  const AnalysisReport report = make_report(counts, bounds, qlm_bound_c7());
  std::printf("%s", io::render_report_markdown(report).c_str());
  return 0;
}
