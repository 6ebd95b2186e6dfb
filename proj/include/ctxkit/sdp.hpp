#pragma once

// Dense primal-dual interior-point solver for small SDPs in standard form
//
//   (P)  minimize <C, X>  s.t.  <A_i, X> = b_i,  X psd
//   (D)  maximize b'y     s.t.  sum_i y_i A_i + Z = C,  Z psd
//
// Search direction is HKM (X dZ Z^-1 + dX symmetrized) with a Mehrotra
// predictor-corrector step. Constraint matrices are sparse and symmetric;
// the Schur complement M_ij = tr(A_i X A_j Z^-1) is assembled densely and
// Cholesky-factored once per iteration.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ctxkit/error.hpp"

namespace ctxkit::sdp {

/// Symmetric matrix stored as its upper-triangle entries (row <= col).
class SparseSymMatrix {
 public:
  struct Entry {
    int row;
    int col;
    double value;
  };

  SparseSymMatrix() = default;

  void add(int row, int col, double value) {
    if (row > col) std::swap(row, col);
    upper_.push_back({row, col, value});
    full_.push_back({row, col, value});
    if (row != col) full_.push_back({col, row, value});
  }

  static SparseSymMatrix identity(int n) {
    SparseSymMatrix m;
    for (int i = 0; i < n; ++i) m.add(i, i, 1.0);
    return m;
  }

  /// <this, Y> for a dense symmetric Y.
  double inner(const Eigen::MatrixXd& y) const {
    double s = 0.0;
    for (const auto& e : full_) s += e.value * y(e.row, e.col);
    return s;
  }

  /// target += scale * this
  void add_to(Eigen::MatrixXd& target, double scale) const {
    for (const auto& e : full_) target(e.row, e.col) += scale * e.value;
  }

  const std::vector<Entry>& entries() const noexcept { return full_; }
  const std::vector<Entry>& upper_entries() const noexcept { return upper_; }

 private:
  std::vector<Entry> upper_;
  std::vector<Entry> full_;
};

struct Problem {
  Eigen::MatrixXd cost;                     // C, dense symmetric
  std::vector<SparseSymMatrix> constraints; // A_i
  Eigen::VectorXd rhs;                      // b
  int dim() const { return static_cast<int>(cost.rows()); }
};

struct Options {
  double feasibility_tol = 1e-8;
  double gap_tol = 1e-7;           // relative: |p - d| / (1 + |p| + |d|)
  double absolute_gap_tol = 1e300; // optional extra stop on |p - d|
  int max_iterations = 100;
  double step_fraction = 0.95;
};

struct StartingPoint {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Eigen::MatrixXd z;
};

struct Solution {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Eigen::MatrixXd z;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
};

namespace detail {

inline double frob_inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.cwiseProduct(b).sum();
}

// Largest alpha with x + alpha * dx psd, given chol(x) = L L'.
inline double max_step(const Eigen::LLT<Eigen::MatrixXd>& chol, const Eigen::MatrixXd& dx) {
  const Eigen::MatrixXd& l = chol.matrixL();
  Eigen::MatrixXd t = l.triangularView<Eigen::Lower>().solve(dx);
  t = l.triangularView<Eigen::Lower>().solve(t.transpose().eval()).transpose().eval();
  t = (0.5 * (t + t.transpose())).eval();
  const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t, Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .minCoeff();
  return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

}  // namespace detail

class Solver {
 public:
  explicit Solver(const Problem& problem, Options options = {})
      : p_(problem), opt_(options), n_(problem.dim()),
        m_(static_cast<int>(problem.constraints.size())) {
    if (p_.cost.rows() != p_.cost.cols()) throw InvalidArgument("SDP cost matrix is not square");
    if (p_.rhs.size() != m_) throw InvalidArgument("SDP rhs size does not match constraint count");
    if (opt_.feasibility_tol <= 0 || opt_.gap_tol <= 0)
      throw InvalidArgument("SDP tolerances must be positive");
  }

  Solution solve(const std::optional<StartingPoint>& start = std::nullopt) const {
    Eigen::MatrixXd x, z;
    Eigen::VectorXd y;
    if (start) {
      x = start->x;
      y = start->y;
      z = start->z;
    } else {
      // Infeasible start scaled to the data.
      double scale = 1.0 + p_.cost.cwiseAbs().maxCoeff();
      for (int i = 0; i < m_; ++i) scale = std::max(scale, 1.0 + std::abs(p_.rhs(i)));
      x = Eigen::MatrixXd::Identity(n_, n_) * scale;
      z = Eigen::MatrixXd::Identity(n_, n_) * scale;
      y = Eigen::VectorXd::Zero(m_);
    }

    const double b_norm = p_.rhs.norm();
    const double c_norm = p_.cost.norm();
    double best_primal = std::numeric_limits<double>::quiet_NaN();
    double best_dual = std::numeric_limits<double>::quiet_NaN();

    for (int iter = 0; iter <= opt_.max_iterations; ++iter) {
      const Eigen::VectorXd rp = p_.rhs - apply(x);
      const Eigen::MatrixXd rd = p_.cost - adjoint(y) - z;
      const double pobj = detail::frob_inner(p_.cost, x);
      const double dobj = p_.rhs.dot(y);
      const double pinf = rp.norm() / (1.0 + b_norm);
      const double dinf = rd.norm() / (1.0 + c_norm);
      const double gap = std::abs(pobj - dobj);
      best_primal = pobj;
      best_dual = dobj;

      if (pinf <= opt_.feasibility_tol && dinf <= opt_.feasibility_tol &&
          gap / (1.0 + std::abs(pobj) + std::abs(dobj)) <= opt_.gap_tol &&
          gap <= opt_.absolute_gap_tol) {
        return {x, y, z, pobj, dobj, pinf, dinf, iter};
      }
      if (iter == opt_.max_iterations) break;

      const double mu = detail::frob_inner(x, z) / n_;
      Eigen::LLT<Eigen::MatrixXd> chol_x(x);
      Eigen::LLT<Eigen::MatrixXd> chol_z(z);
      if (chol_x.info() != Eigen::Success || chol_z.info() != Eigen::Success) break;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n_, n_);
      const Eigen::MatrixXd zinv = chol_z.solve(eye);

      Eigen::MatrixXd schur = schur_complement(x, zinv);
      Eigen::LLT<Eigen::MatrixXd> chol_m(schur);
      // Near a degenerate optimum M loses rank numerically; retry with a
      // small diagonal shift before giving up.
      for (double shift = 1e-14; chol_m.info() != Eigen::Success && shift <= 1e-6; shift *= 100) {
        const double d = shift * std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
        chol_m.compute(schur + d * Eigen::MatrixXd::Identity(m_, m_));
      }
      if (chol_m.info() != Eigen::Success) break;

      const Eigen::MatrixXd x_rd_zinv = x * rd * zinv;
      const Eigen::VectorXd a_x_rd_zinv = apply(x_rd_zinv);

      // Solves for (dx, dy, dz) given the complementarity target
      // X dZ + dX Z = target  (target = sigma*mu*I - XZ - corrector).
      auto direction = [&](const Eigen::MatrixXd& target_minus, Eigen::MatrixXd& dx,
                           Eigen::VectorXd& dy, Eigen::MatrixXd& dz) {
        // g = (sigma*mu*I - corr) Z^-1 - X
        const Eigen::MatrixXd g = target_minus * zinv - x;
        const Eigen::VectorXd rhs = rp - apply(g) + a_x_rd_zinv;
        dy = chol_m.solve(rhs);
        // Refine against the unshifted M in case the factorization was shifted.
        for (int k = 0; k < 3; ++k) dy += chol_m.solve(rhs - schur * dy);
        dz = rd - adjoint(dy);
        dx = g - x * dz * zinv;
        dx = (0.5 * (dx + dx.transpose())).eval();
      };

      Eigen::MatrixXd dx, dz;
      Eigen::VectorXd dy;
      direction(Eigen::MatrixXd::Zero(n_, n_), dx, dy, dz);
      double ap = std::min(1.0, detail::max_step(chol_x, dx));
      double ad = std::min(1.0, detail::max_step(chol_z, dz));
      const double mu_aff = detail::frob_inner(x + ap * dx, z + ad * dz) / n_;
      const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

      const Eigen::MatrixXd corr = sigma * mu * eye - dx * dz;
      direction(corr, dx, dy, dz);
      ap = std::min(1.0, opt_.step_fraction * detail::max_step(chol_x, dx));
      ad = std::min(1.0, opt_.step_fraction * detail::max_step(chol_z, dz));

      x += ap * dx;
      x = (0.5 * (x + x.transpose())).eval();
      y += ad * dy;
      z += ad * dz;
      z = (0.5 * (z + z.transpose())).eval();
    }
    throw ConvergenceError("SDP did not converge within " + std::to_string(opt_.max_iterations) +
                               " iterations",
                           best_primal, best_dual);
  }

 private:
  Eigen::VectorXd apply(const Eigen::MatrixXd& x) const {
    Eigen::VectorXd out(m_);
    for (int i = 0; i < m_; ++i) out(i) = p_.constraints[i].inner(x);
    return out;
  }

  Eigen::MatrixXd adjoint(const Eigen::VectorXd& y) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_, n_);
    for (int i = 0; i < m_; ++i) p_.constraints[i].add_to(out, y(i));
    return out;
  }

  // M_ij = tr(A_i X A_j W). Column j uses B_j = X A_j W, built from the
  // sparse entries of A_j as a sum of outer products.
  Eigen::MatrixXd schur_complement(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w) const {
    Eigen::MatrixXd schur(m_, m_);
    Eigen::MatrixXd bj(n_, n_);
    for (int j = 0; j < m_; ++j) {
      bj.setZero();
      for (const auto& e : p_.constraints[j].entries())
        bj.noalias() += e.value * x.col(e.row) * w.row(e.col);
      for (int i = j; i < m_; ++i) {
        double s = 0.0;
        // tr(A_i B_j) = sum_{(p,q)} A_i(p,q) B_j(q,p)
        for (const auto& e : p_.constraints[i].entries()) s += e.value * bj(e.col, e.row);
        schur(i, j) = s;
        schur(j, i) = s;
      }
    }
    return schur;
  }

  const Problem& p_;
  Options opt_;
  int n_;
  int m_;
};

inline Solution solve(const Problem& problem, const Options& options = {},
                      const std::optional<StartingPoint>& start = std::nullopt) {
  return Solver(problem, options).solve(start);
}

}  // namespace ctxkit::sdp
