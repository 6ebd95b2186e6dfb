#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ctxkit/context.hpp"
#include "ctxkit/error.hpp"

namespace ctxkit {

/// Photon counts for one d-outcome measurement.
struct CountRecord {
  Context context;
  std::vector<std::string> outcome_labels;
  std::vector<std::uint64_t> counts;

  std::uint64_t total() const { return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}); }

  friend bool operator==(const CountRecord&, const CountRecord&) = default;
};

/// One context of a probability table: the full outcome distribution of
/// its d-outcome measurement plus the standard error of the target entry.
struct TableRow {
  Context context;
  std::vector<std::string> outcome_labels;
  std::vector<double> outcome_probabilities;
  double std_error = 0.0;
  bool boundary = false;  // estimate sits at 0 or 1, where the binomial error degenerates
  std::optional<CountRecord> counts;

  double outcome(std::string_view label) const {
    for (std::size_t i = 0; i < outcome_labels.size(); ++i)
      if (outcome_labels[i] == label) return outcome_probabilities[i];
    throw InvalidArgument("context " + context.name() + " has no outcome '" + std::string(label) + "'");
  }

  /// Click probability of measurement m in this context.
  double marginal(int m) const {
    context.slot(m);
    return outcome(std::to_string(m));
  }

  /// Probability of a joint bit pattern over the context's measurements.
  /// Patterns with two or more clicks are impossible for exclusive
  /// measurements and have probability exactly 0.
  double joint(const std::vector<int>& bits) const {
    if (bits.size() != context.measurements.size())
      throw InvalidArgument("pattern length does not match context " + context.name());
    int ones = 0;
    int which = -1;
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (bits[i]) {
        ++ones;
        which = static_cast<int>(i);
      }
    if (ones >= 2) return 0.0;
    if (ones == 1) return marginal(context.measurements[which]);
    double rest = 0.0;
    for (std::size_t i = context.measurements.size(); i < outcome_probabilities.size(); ++i)
      rest += outcome_probabilities[i];
    return rest;
  }

  double target_probability() const { return joint(context.target); }

  friend bool operator==(const TableRow&, const TableRow&) = default;
};

struct TableSource {
  enum class Kind { ideal, simulated, ingested };
  Kind kind = Kind::ideal;
  std::uint64_t seed = 0;          // simulated
  std::string file;                // ingested
  bool inferred_totals = false;    // count totals reconstructed from quoted errors

  friend bool operator==(const TableSource&, const TableSource&) = default;
};

inline std::string to_string(TableSource::Kind k) {
  switch (k) {
    case TableSource::Kind::ideal: return "ideal";
    case TableSource::Kind::simulated: return "simulated";
    case TableSource::Kind::ingested: return "ingested";
  }
  return "ideal";
}

struct ProbabilityTable {
  Inequality inequality = Inequality::c7;
  std::vector<TableRow> rows;
  TableSource source;

  const TableRow* find(const Context& c) const {
    for (const auto& r : rows)
      if (r.context.measurements == c.measurements) return &r;
    return nullptr;
  }

  const TableRow& row(const Context& c) const {
    if (const TableRow* r = find(c)) return *r;
    throw IncompleteTable("table is missing context " + c.name());
  }

  friend bool operator==(const ProbabilityTable&, const ProbabilityTable&) = default;
};

/// Throws IncompleteTable listing every missing context of the inequality.
inline void require_complete(const ProbabilityTable& t) {
  std::string missing;
  for (const auto& c : inequality_contexts(t.inequality)) {
    if (!t.find(c)) missing += (missing.empty() ? "" : " ") + c.name();
  }
  if (!missing.empty())
    throw IncompleteTable(to_string(t.inequality) + " table is missing contexts: " + missing);
}

/// Rows in canonical order for the table's inequality.
inline std::vector<const TableRow*> canonical_rows(const ProbabilityTable& t) {
  require_complete(t);
  std::vector<const TableRow*> out;
  for (const auto& c : inequality_contexts(t.inequality)) out.push_back(&t.row(c));
  return out;
}

}  // namespace ctxkit
