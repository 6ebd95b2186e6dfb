#include <gtest/gtest.h>

#include <Eigen/QR>

#include <cmath>
#include <numbers>
#include <random>

#include "ctxkit/quantum.hpp"
#include "ctxkit/theta.hpp"

using namespace ctxkit;

namespace {

double table_sum(const ProbabilityTable& t) {
  double s = 0.0;
  for (const auto& r : t.rows) s += r.target_probability();
  return s;
}

Eigen::MatrixXd random_orthogonal(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = g(rng);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
}

}  // namespace

TEST(Realization, BothAreOrthonormalRepresentations) {
  for (auto ineq : {Inequality::c7, Inequality::c7bar}) {
    const auto r = build_realization(ineq);
    EXPECT_NO_THROW(check_orthonormal_representation(r));
    const auto d = orthonormality_defect(r);
    EXPECT_LE(d.max_edge_overlap, 1e-10);
    EXPECT_LE(d.max_norm_deviation, 1e-12);
    EXPECT_EQ(r.dim(), dimension(ineq));
  }
}

TEST(Realization, QutritAngleSatisfiesOrthogonalityIdentity) {
  // Adjacent vectors differ in azimuth by 6 pi / 7; orthogonality requires
  // cos^2(polar) + sin^2(polar) cos(6 pi / 7) = 0.
  const double c = std::cos(std::numbers::pi / 7);
  const double cos2 = c / (1 + c);
  EXPECT_NEAR(cos2 + (1 - cos2) * std::cos(6 * std::numbers::pi / 7), 0.0, 1e-15);
}

TEST(Realization, NonAdjacentVectorsAreNotOrthogonal) {
  const auto r = build_c7_realization();
  EXPECT_GT(std::abs(r.vector(1).dot(r.vector(3))), 1e-3);
}

TEST(Realization, BrokenRepresentationIsRejected) {
  auto r = build_c7_realization();
  r.vectors[0](1) += 1e-6;
  r.vectors[0].normalize();
  EXPECT_THROW(check_orthonormal_representation(r), InvalidArgument);
}

TEST(IdealTable, HeptagonValues) {
  const auto t = ideal_table(build_c7_realization(), Inequality::c7);
  ASSERT_EQ(t.rows.size(), 7u);
  for (const auto& row : t.rows) EXPECT_NEAR(row.target_probability(), 0.474, 5e-4);
  EXPECT_NEAR(table_sum(t), 3.318, 5e-4);
}

TEST(IdealTable, ComplementValues) {
  const auto t = ideal_table(build_c7bar_realization(), Inequality::c7bar);
  ASSERT_EQ(t.rows.size(), 7u);
  for (const auto& row : t.rows) EXPECT_NEAR(row.target_probability(), 0.301, 5e-4);
  EXPECT_NEAR(table_sum(t), 2.110, 5e-4);
}

TEST(IdealTable, SumMatchesSdpTheta) {
  EXPECT_NEAR(table_sum(ideal_table(build_c7_realization(), Inequality::c7)),
              lovasz_theta(cycle_graph(7), 1e-9).theta, 1e-5);
  EXPECT_NEAR(table_sum(ideal_table(build_c7bar_realization(), Inequality::c7bar)),
              lovasz_theta(complement(cycle_graph(7)), 1e-9).theta, 1e-5);
}

TEST(IdealTable, RowsAreSymmetricAndNormalized) {
  for (auto ineq : {Inequality::c7, Inequality::c7bar}) {
    const auto t = ideal_table(build_realization(ineq), ineq);
    const double first = t.rows[0].target_probability();
    for (const auto& row : t.rows) {
      EXPECT_NEAR(row.target_probability(), first, 1e-12);
      double s = 0.0;
      for (double p : row.outcome_probabilities) {
        EXPECT_GE(p, -1e-15);
        s += p;
      }
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
  }
}

TEST(IdealTable, MarginalsAreContextIndependent) {
  const auto t = ideal_table(build_c7bar_realization(), Inequality::c7bar);
  for (int m = 1; m <= 7; ++m) {
    double seen = -1.0;
    for (const auto& row : t.rows) {
      if (!row.context.contains(m)) continue;
      if (seen < 0) seen = row.marginal(m);
      EXPECT_EQ(row.marginal(m), seen) << m;
    }
  }
}

TEST(IdealTable, InvariantUnderGlobalRotation) {
  std::mt19937_64 rng(4);
  for (auto ineq : {Inequality::c7, Inequality::c7bar}) {
    const auto r = build_realization(ineq);
    const auto base = ideal_table(r, ineq);
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::MatrixXd q = random_orthogonal(r.dim(), rng);
      VectorRealization rot = r;
      rot.state = q * r.state;
      for (auto& v : rot.vectors) v = q * v;
      const auto t = ideal_table(rot, ineq);
      for (std::size_t i = 0; i < t.rows.size(); ++i)
        EXPECT_NEAR(t.rows[i].target_probability(), base.rows[i].target_probability(), 1e-12);
    }
  }
}

TEST(ContextProbability, ExclusiveClicksAndNoClick) {
  const auto r = build_c7_realization();
  const Context both{{1, 2}, {1, 1}};
  EXPECT_NEAR(context_probability(r, both), 0.0, 1e-15);
  const Context none{{1, 2}, {0, 0}};
  const double p1 = std::pow(r.vector(1).dot(r.state), 2);
  const double p2 = std::pow(r.vector(2).dot(r.state), 2);
  EXPECT_NEAR(context_probability(r, none), 1 - p1 - p2, 1e-12);
  const Context one{{1, 2}, {1, 0}};
  EXPECT_NEAR(context_probability(r, one), p1, 1e-12);
}

TEST(ContextProbability, PatternsSumToOne) {
  const auto r = build_c7bar_realization();
  double s = 0.0;
  for (int bits = 0; bits < 8; ++bits)
    s += context_probability(r, {{1, 3, 5}, {bits & 1, bits >> 1 & 1, bits >> 2 & 1}});
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(ContextProbability, IncompatibleContextThrows) {
  const auto r = build_c7_realization();
  EXPECT_THROW(context_probability(r, {{1, 3}, {1, 0}}), IncompatibleContext);
  EXPECT_THROW(ideal_table(r, Inequality::c7bar), InvalidArgument);
}

TEST(TableRow, JointOfDisallowedPatternIsZero) {
  const auto t = ideal_table(build_c7_realization(), Inequality::c7);
  EXPECT_EQ(t.rows[0].joint({1, 1}), 0.0);
  const auto& row = t.rows[0];
  EXPECT_NEAR(row.joint({0, 0}) + row.joint({1, 0}) + row.joint({0, 1}), 1.0, 1e-12);
}
