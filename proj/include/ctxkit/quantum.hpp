#pragma once

// Explicit optimal realizations for S(C7) and S(C7bar), and ideal
// probability tables derived from them. All vectors are real.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctxkit/context.hpp"
#include "ctxkit/error.hpp"
#include "ctxkit/exgraph.hpp"
#include "ctxkit/table.hpp"

namespace ctxkit {

/// A pure state and one unit vector per vertex of `graph`, with vectors of
/// exclusive events orthogonal. vectors[v] belongs to vertex v (label v+1).
struct VectorRealization {
  ExclusivityGraph graph;
  Eigen::VectorXd state;
  std::vector<Eigen::VectorXd> vectors;

  int dim() const { return static_cast<int>(state.size()); }

  const Eigen::VectorXd& vector(int label) const {
    auto v = graph.vertex_of(std::to_string(label));
    if (!v) throw InvalidArgument("realization has no measurement " + std::to_string(label));
    return vectors[*v];
  }
};

/// Qutrit realization reaching theta(C7).
inline VectorRealization build_c7_realization() {
  const double c = std::cos(std::numbers::pi / 7);
  const double polar = std::acos(std::sqrt(c / (1.0 + c)));
  VectorRealization r{cycle_graph(7), Eigen::VectorXd::Unit(3, 0), {}};
  for (int j = 1; j <= 7; ++j) {
    const double azimuth = 6.0 * std::numbers::pi * j / 7.0;
    Eigen::VectorXd u(3);
    u << std::cos(polar), std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth);
    r.vectors.push_back(std::move(u));
  }
  return r;
}

/// Five-dimensional realization reaching theta of the complement of C7.
inline VectorRealization build_c7bar_realization() {
  const double c = std::cos(std::numbers::pi / 7);
  const double s = std::sin(std::numbers::pi / 7);
  const double polar = std::acos(std::sqrt((1.0 + c) / (7.0 * c)));
  const double split = std::acos(2.0 * s * std::sqrt(2.0 * c / (-1.0 + 6.0 * c)));
  VectorRealization r{complement(cycle_graph(7)), Eigen::VectorXd::Unit(5, 0), {}};
  for (int k = 1; k <= 7; ++k) {
    const double inner = 2.0 * std::numbers::pi * 2.0 * k / 7.0;
    const double outer = 2.0 * std::numbers::pi * k / 7.0;
    Eigen::VectorXd v(5);
    v << std::cos(polar),
        std::sin(polar) * std::cos(split) * std::cos(inner),
        std::sin(polar) * std::cos(split) * std::sin(inner),
        std::sin(polar) * std::sin(split) * std::cos(outer),
        std::sin(polar) * std::sin(split) * std::sin(outer);
    r.vectors.push_back(std::move(v));
  }
  return r;
}

inline VectorRealization build_realization(Inequality ineq) {
  return ineq == Inequality::c7 ? build_c7_realization() : build_c7bar_realization();
}

struct OrthonormalityDefect {
  double max_norm_deviation = 0.0;  // max | |v| - 1 |
  double max_edge_overlap = 0.0;    // max |<a|b>| over edges
  double state_norm_deviation = 0.0;
};

inline OrthonormalityDefect orthonormality_defect(const VectorRealization& r) {
  OrthonormalityDefect d;
  d.state_norm_deviation = std::abs(r.state.norm() - 1.0);
  for (const auto& v : r.vectors) d.max_norm_deviation = std::max(d.max_norm_deviation, std::abs(v.norm() - 1.0));
  for (const auto& e : r.graph.edges())
    d.max_edge_overlap = std::max(d.max_edge_overlap, std::abs(r.vectors[e.a].dot(r.vectors[e.b])));
  return d;
}

inline constexpr double kEdgeOrthogonalityTol = 1e-10;
inline constexpr double kUnitNormTol = 1e-12;

/// Throws InvalidArgument unless r is an orthonormal representation of its graph.
inline void check_orthonormal_representation(const VectorRealization& r) {
  if (r.graph.size() != static_cast<int>(r.vectors.size()))
    throw InvalidArgument("realization has " + std::to_string(r.vectors.size()) +
                          " vectors for a graph on " + std::to_string(r.graph.size()) + " vertices");
  for (const auto& v : r.vectors)
    if (v.size() != r.state.size()) throw InvalidArgument("vector dimension differs from state dimension");
  const auto d = orthonormality_defect(r);
  if (d.max_norm_deviation > kUnitNormTol || d.state_norm_deviation > kUnitNormTol)
    throw InvalidArgument("realization vectors are not unit within 1e-12");
  if (d.max_edge_overlap > kEdgeOrthogonalityTol)
    throw InvalidArgument("realization violates edge orthogonality within 1e-10");
}

namespace detail {

inline void require_compatible(const VectorRealization& r, const Context& c) {
  if (c.target.size() != c.measurements.size())
    throw InvalidArgument("context " + c.name() + " target length mismatch");
  for (std::size_t i = 0; i < c.measurements.size(); ++i) {
    for (std::size_t j = i + 1; j < c.measurements.size(); ++j) {
      const int a = c.measurements[i], b = c.measurements[j];
      const auto va = r.graph.vertex_of(std::to_string(a));
      const auto vb = r.graph.vertex_of(std::to_string(b));
      if (!va || !vb) throw InvalidArgument("context " + c.name() + " names an unknown measurement");
      if (!r.graph.adjacent(*va, *vb) ||
          std::abs(r.vectors[*va].dot(r.vectors[*vb])) > kEdgeOrthogonalityTol)
        throw IncompatibleContext("measurements " + std::to_string(a) + " and " + std::to_string(b) +
                                  " in context " + c.name() + " are not exclusive");
    }
  }
}

}  // namespace detail

/// <state| prod_slots (bit ? P_m : 1 - P_m) |state>, P_m = |v_m><v_m|.
/// The operator product is formed explicitly and checked against the
/// rank-1 shortcut valid for mutually orthogonal projectors.
inline double context_probability(const VectorRealization& r, const Context& c) {
  detail::require_compatible(r, c);
  const int d = r.dim();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd op = eye;
  for (std::size_t i = 0; i < c.measurements.size(); ++i) {
    const Eigen::VectorXd& v = r.vector(c.measurements[i]);
    const Eigen::MatrixXd proj = v * v.transpose();
    op = op * (c.target[i] ? proj : Eigen::MatrixXd(eye - proj));
  }
  const double general = r.state.dot(op * r.state);

  int ones = 0;
  double shortcut = 1.0;
  for (std::size_t i = 0; i < c.measurements.size(); ++i) {
    const double overlap = std::pow(r.vector(c.measurements[i]).dot(r.state), 2);
    if (c.target[i]) {
      ++ones;
      shortcut = overlap;
    }
  }
  if (ones >= 2) {
    shortcut = 0.0;
  } else if (ones == 0) {
    for (int m : c.measurements) shortcut -= std::pow(r.vector(m).dot(r.state), 2);
  }
  if (std::abs(general - shortcut) > 1e-12)
    throw std::logic_error("projector product disagrees with rank-1 reduction in context " + c.name());
  return general;
}

/// Completes the context vectors to an orthonormal basis of R^d (Gram-Schmidt
/// over the standard basis, keeping the largest residual each time).
inline std::vector<Eigen::VectorXd> complete_basis(const std::vector<Eigen::VectorXd>& vectors, int d) {
  std::vector<Eigen::VectorXd> basis = vectors;
  while (static_cast<int>(basis.size()) < d) {
    Eigen::VectorXd best;
    double best_norm = -1.0;
    for (int i = 0; i < d; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Unit(d, i);
      for (const auto& b : basis) e -= b.dot(e) * b;
      for (const auto& b : basis) e -= b.dot(e) * b;
      if (e.norm() > best_norm + 1e-12) {
        best_norm = e.norm();
        best = e;
      }
    }
    basis.push_back(best / best_norm);
  }
  return basis;
}

/// One table row from an explicit orthonormal measurement basis whose
/// leading vectors belong to the context's measurements.
inline TableRow row_from_basis(const Context& c, const std::vector<Eigen::VectorXd>& basis,
                               const Eigen::VectorXd& state) {
  TableRow row;
  row.context = c;
  row.outcome_labels = outcome_labels(c, static_cast<int>(state.size()));
  double total = 0.0;
  for (const auto& b : basis) {
    row.outcome_probabilities.push_back(std::pow(b.dot(state), 2));
    total += row.outcome_probabilities.back();
  }
  for (double& p : row.outcome_probabilities) p /= total;
  return row;
}

/// Ideal quantum table: the seven contexts of `ineq`, each with the full
/// d-outcome distribution of its completed measurement basis.
inline ProbabilityTable ideal_table(const VectorRealization& r, Inequality ineq) {
  if (r.dim() != dimension(ineq) || !(r.graph == exclusivity_graph(ineq)))
    throw InvalidArgument("realization does not match inequality " + to_string(ineq));
  ProbabilityTable t;
  t.inequality = ineq;
  t.source.kind = TableSource::Kind::ideal;
  for (const auto& c : inequality_contexts(ineq)) {
    detail::require_compatible(r, c);
    std::vector<Eigen::VectorXd> vs;
    for (int m : c.measurements) vs.push_back(r.vector(m));
    TableRow row = row_from_basis(c, complete_basis(vs, r.dim()), r.state);
    // Measurement outcomes straight from the vectors: no context dependence.
    for (std::size_t i = 0; i < c.measurements.size(); ++i)
      row.outcome_probabilities[i] = std::pow(r.vector(c.measurements[i]).dot(r.state), 2);
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace ctxkit
