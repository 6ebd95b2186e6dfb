#pragma once

// Lovász number of an exclusivity graph:
//   theta(G) = max <J, X>  s.t.  X psd, tr X = 1, X_ij = 0 for every edge ij.

#include <Eigen/Dense>

#include <string>

#include "ctxkit/error.hpp"
#include "ctxkit/exgraph.hpp"
#include "ctxkit/sdp.hpp"

namespace ctxkit {

inline constexpr int kDefaultThetaCap = 100;

struct ThetaOptions {
  double tol = 1e-7;  // absolute width of the returned [lower, upper] bracket
  sdp::Options sdp{};
  int max_vertices = kDefaultThetaCap;
};

struct ThetaResult {
  double theta = 0.0;  // midpoint of [lower, upper]
  double lower = 0.0;  // <J, X> at the primal certificate
  double upper = 0.0;  // dual objective
  Eigen::MatrixXd certificate;
  int iterations = 0;
};

struct GraphBounds {
  int alpha = 0;
  double theta = 0.0;
  Eigen::MatrixXd theta_certificate;
};

/// Builds the Lovász SDP in the solver's minimization form (C = -J).
inline sdp::Problem lovasz_problem(const ExclusivityGraph& g) {
  const int n = g.size();
  sdp::Problem p;
  p.cost = -Eigen::MatrixXd::Ones(n, n);
  p.constraints.push_back(sdp::SparseSymMatrix::identity(n));
  for (const auto& e : g.edges()) {
    sdp::SparseSymMatrix a;
    a.add(e.a, e.b, 1.0);
    p.constraints.push_back(std::move(a));
  }
  p.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.constraints.size()));
  p.rhs(0) = 1.0;
  return p;
}

inline ThetaResult lovasz_theta(const ExclusivityGraph& g, const ThetaOptions& options = {}) {
  const int n = g.size();
  if (n > options.max_vertices)
    throw SizeLimitError("lovasz theta: n=" + std::to_string(n) + " exceeds SDP cap " +
                         std::to_string(options.max_vertices));
  if (!(options.tol > 0)) throw InvalidArgument("lovasz theta: tol must be positive");

  const sdp::Problem problem = lovasz_problem(g);

  // Strictly feasible start: X = I/n, and y0 = -(n+1) gives Z = (n+1)I - J > 0.
  sdp::StartingPoint start;
  start.x = Eigen::MatrixXd::Identity(n, n) / n;
  start.y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(problem.constraints.size()));
  start.y(0) = -(n + 1.0);
  start.z = (n + 1.0) * Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Ones(n, n);

  sdp::Options sdp_options = options.sdp;
  sdp_options.absolute_gap_tol = options.tol;
  const sdp::Solution sol = sdp::solve(problem, sdp_options, start);

  ThetaResult r;
  r.lower = -sol.primal_objective;
  r.upper = -sol.dual_objective;
  r.theta = 0.5 * (r.lower + r.upper);
  r.certificate = sol.x;
  r.iterations = sol.iterations;
  return r;
}

inline ThetaResult lovasz_theta(const ExclusivityGraph& g, double tol) {
  ThetaOptions o;
  o.tol = tol;
  return lovasz_theta(g, o);
}

inline GraphBounds graph_bounds(const ExclusivityGraph& g, const ThetaOptions& options = {}) {
  ThetaResult t = lovasz_theta(g, options);
  return {independence_number(g), t.theta, std::move(t.certificate)};
}

}  // namespace ctxkit
