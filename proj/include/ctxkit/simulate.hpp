#pragma once

// Synthetic type-3 experiments: every context is one d-outcome projective
// measurement, counts are Poissonian, and probabilities are count ratios.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "ctxkit/context.hpp"
#include "ctxkit/error.hpp"
#include "ctxkit/parallel.hpp"
#include "ctxkit/philox.hpp"
#include "ctxkit/quantum.hpp"
#include "ctxkit/table.hpp"

namespace ctxkit {

struct NoNoise {};

/// p -> v p + (1 - v) / d on every per-context outcome distribution.
struct Depolarizing {
  double visibility = 1.0;
};

/// Independent small rotation of every (measurement, context) vector.
struct VectorJitter {
  double sigma = 0.0;  // radians
};

/// Adds delta to named outcomes, then renormalizes. Keys: 0-based row index
/// (table order), then outcome label.
struct AdditiveBias {
  std::map<int, std::map<std::string, double>> delta;
};

using NoiseModel = std::variant<NoNoise, Depolarizing, VectorJitter, AdditiveBias>;

/// Parses "none", "depolarizing:V", "jitter:SIGMA", or
/// "bias:ROW:OUTCOME:DELTA[,ROW:OUTCOME:DELTA...]" (ROW is 1-based).
inline NoiseModel parse_noise(const std::string& spec) {
  if (spec.empty() || spec == "none") return NoNoise{};
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw InvalidArgument("bad number '" + s + "' in noise spec '" + spec + "'");
    }
  };
  if (kind == "depolarizing") return Depolarizing{number(arg)};
  if (kind == "jitter") return VectorJitter{number(arg)};
  if (kind == "bias") {
    AdditiveBias b;
    std::size_t pos = 0;
    while (pos <= arg.size()) {
      const auto comma = arg.find(',', pos);
      const std::string item = arg.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      const auto c1 = item.find(':');
      const auto c2 = item.find(':', c1 == std::string::npos ? c1 : c1 + 1);
      if (c1 == std::string::npos || c2 == std::string::npos)
        throw InvalidArgument("bias entry '" + item + "' must be ROW:OUTCOME:DELTA");
      const int row = static_cast<int>(number(item.substr(0, c1)));
      b.delta[row - 1][item.substr(c1 + 1, c2 - c1 - 1)] += number(item.substr(c2 + 1));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return b;
  }
  throw InvalidArgument("unknown noise kind '" + kind + "'");
}

namespace detail {

inline void renormalize(std::vector<double>& p) {
  double total = 0.0;
  for (double x : p) total += x;
  if (!(total > 0.0)) throw InvalidArgument("noise left a context with zero total probability");
  for (double& x : p) x /= total;
}

// Rotates v by angle `angle` towards a uniformly random orthogonal direction.
inline Eigen::VectorXd rotate_randomly(const Eigen::VectorXd& v, double angle, Philox4x32& rng) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXd w(v.size());
  double norm = 0.0;
  while (norm < 1e-6) {
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = gauss(rng);
    w -= v.dot(w) * v;
    norm = w.norm();
  }
  return std::cos(angle) * v + std::sin(angle) * (w / norm);
}

// Closest orthonormal set to the columns of `vs` (V (V'V)^{-1/2}).
inline std::vector<Eigen::VectorXd> lowdin(const std::vector<Eigen::VectorXd>& vs) {
  const Eigen::Index d = vs.front().size();
  const Eigen::Index k = static_cast<Eigen::Index>(vs.size());
  Eigen::MatrixXd v(d, k);
  for (Eigen::Index i = 0; i < k; ++i) v.col(i) = vs[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(v.transpose() * v);
  const Eigen::MatrixXd inv_sqrt = eig.eigenvectors() *
                                   eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                   eig.eigenvectors().transpose();
  const Eigen::MatrixXd q = v * inv_sqrt;
  std::vector<Eigen::VectorXd> out;
  for (Eigen::Index i = 0; i < k; ++i) out.emplace_back(q.col(i));
  return out;
}

}  // namespace detail

/// Applies a noise model to every row. `seed` drives vector_jitter only;
/// `realization` is required for vector_jitter.
inline ProbabilityTable apply_noise(const ProbabilityTable& table, const NoiseModel& model,
                                    const VectorRealization* realization = nullptr,
                                    std::uint64_t seed = 0) {
  ProbabilityTable out = table;
  if (std::holds_alternative<NoNoise>(model)) return out;

  if (const auto* dep = std::get_if<Depolarizing>(&model)) {
    const double v = dep->visibility;
    if (!(v >= 0.0 && v <= 1.0))
      throw InvalidArgument("depolarizing visibility " + std::to_string(v) + " outside [0,1]");
    for (auto& row : out.rows) {
      const double d = static_cast<double>(row.outcome_probabilities.size());
      for (double& p : row.outcome_probabilities) p = v * p + (1.0 - v) / d;
      detail::renormalize(row.outcome_probabilities);
      row.counts.reset();
    }
    return out;
  }

  if (const auto* bias = std::get_if<AdditiveBias>(&model)) {
    for (const auto& [index, deltas] : bias->delta) {
      if (index < 0 || index >= static_cast<int>(out.rows.size()))
        throw InvalidArgument("bias row " + std::to_string(index + 1) + " out of range");
      auto& row = out.rows[index];
      for (const auto& [label, delta] : deltas) {
        bool found = false;
        for (std::size_t i = 0; i < row.outcome_labels.size(); ++i) {
          if (row.outcome_labels[i] == label) {
            row.outcome_probabilities[i] = std::max(0.0, row.outcome_probabilities[i] + delta);
            found = true;
          }
        }
        if (!found)
          throw InvalidArgument("bias names unknown outcome '" + label + "' in context " + row.context.name());
      }
      detail::renormalize(row.outcome_probabilities);
      row.counts.reset();
    }
    return out;
  }

  const auto& jitter = std::get<VectorJitter>(model);
  if (!realization) throw InvalidArgument("vector_jitter noise needs a realization");
  if (!(jitter.sigma >= 0.0)) throw InvalidArgument("jitter sigma must be >= 0");
  const ProbabilityTable ideal = ideal_table(*realization, table.inequality);
  if (jitter.sigma == 0.0) {
    out.rows = ideal.rows;
    return out;
  }
  std::vector<TableRow> rows(table.rows.size());
  parallel_for(table.rows.size(), [&](std::size_t i) {
    const Context& c = table.rows[i].context;
    Philox4x32 rng(seed, stream_id(StreamPurpose::jitter, i));
    std::normal_distribution<double> angle(0.0, jitter.sigma);
    std::vector<Eigen::VectorXd> vs;
    for (int m : c.measurements) vs.push_back(detail::rotate_randomly(realization->vector(m), angle(rng), rng));
    vs = detail::lowdin(vs);
    rows[i] = row_from_basis(c, complete_basis(vs, realization->dim()), realization->state);
  });
  out.rows = std::move(rows);
  return out;
}

/// Ratio estimator: outcome probabilities are counts / total; the target's
/// standard error is the binomial sqrt(p(1-p)/N).
inline TableRow row_from_counts(const CountRecord& rec) {
  const std::uint64_t n = rec.total();
  if (n == 0) throw DegenerateRecord("context " + rec.context.name() + " has zero total counts");
  if (rec.counts.size() != rec.outcome_labels.size())
    throw InvalidArgument("context " + rec.context.name() + ": counts and labels differ in length");
  TableRow row;
  row.context = rec.context;
  row.outcome_labels = rec.outcome_labels;
  for (auto k : rec.counts) row.outcome_probabilities.push_back(static_cast<double>(k) / static_cast<double>(n));
  const double p = row.target_probability();
  row.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  row.boundary = p == 0.0 || p == 1.0;
  row.counts = rec;
  return row;
}

inline ProbabilityTable probabilities_from_counts(Inequality ineq, const std::vector<CountRecord>& records,
                                                  TableSource source = {TableSource::Kind::ingested}) {
  ProbabilityTable t;
  t.inequality = ineq;
  t.source = std::move(source);
  for (const auto& rec : records) t.rows.push_back(row_from_counts(rec));
  return t;
}

/// Draws N ~ Poisson(mean_total) per context and splits it multinomially
/// over the context's outcome distribution. Context i uses the Philox
/// stream (seed, counts:i), so results do not depend on thread count.
inline ProbabilityTable sample_counts(const ProbabilityTable& table, double mean_total, std::uint64_t seed) {
  if (!(mean_total > 0.0) || !std::isfinite(mean_total))
    throw InvalidArgument("mean total counts must be positive and finite");
  std::vector<CountRecord> records(table.rows.size());
  parallel_for(table.rows.size(), [&](std::size_t i) {
    const TableRow& row = table.rows[i];
    Philox4x32 rng(seed, stream_id(StreamPurpose::counts, i));
    std::poisson_distribution<std::int64_t> poisson(mean_total);
    std::int64_t remaining = poisson(rng);
    double remaining_p = 1.0;
    CountRecord rec{row.context, row.outcome_labels, {}};
    const std::size_t d = row.outcome_probabilities.size();
    for (std::size_t k = 0; k + 1 < d; ++k) {
      const double p = row.outcome_probabilities[k];
      const double q = remaining_p > 0.0 ? std::clamp(p / remaining_p, 0.0, 1.0) : 0.0;
      std::int64_t n = 0;
      if (remaining > 0 && q > 0.0) n = std::binomial_distribution<std::int64_t>(remaining, q)(rng);
      rec.counts.push_back(static_cast<std::uint64_t>(n));
      remaining -= n;
      remaining_p -= p;
    }
    rec.counts.push_back(static_cast<std::uint64_t>(remaining));
    records[i] = std::move(rec);
  });
  TableSource src;
  src.kind = TableSource::Kind::simulated;
  src.seed = seed;
  return probabilities_from_counts(table.inequality, records, src);
}

}  // namespace ctxkit
