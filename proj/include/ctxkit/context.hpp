#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "ctxkit/error.hpp"
#include "ctxkit/exgraph.hpp"

namespace ctxkit {

enum class Inequality { c7, c7bar };

inline std::string to_string(Inequality ineq) { return ineq == Inequality::c7 ? "C7" : "C7bar"; }

inline Inequality parse_inequality(std::string_view s) {
  if (s == "C7") return Inequality::c7;
  if (s == "C7bar") return Inequality::c7bar;
  throw InvalidArgument("unknown inequality '" + std::string(s) + "' (expected C7 or C7bar)");
}

/// Hilbert-space dimension of the optimal realization.
inline int dimension(Inequality ineq) { return ineq == Inequality::c7 ? 3 : 5; }

/// NCHV bound (independence number of the exclusivity graph).
inline int nchv_bound(Inequality ineq) { return ineq == Inequality::c7 ? 3 : 2; }

inline ExclusivityGraph exclusivity_graph(Inequality ineq) {
  return ineq == Inequality::c7 ? cycle_graph(7) : complement(cycle_graph(7));
}

/// Cyclic label arithmetic on 1..7.
inline int wrap7(int label) { return ((label - 1) % 7 + 7) % 7 + 1; }

/// A set of jointly performed measurements (1-based labels) and the outcome
/// bits whose probability enters the inequality.
struct Context {
  std::vector<int> measurements;
  std::vector<int> target;

  /// "(1,3,5)"
  std::string name() const {
    std::string s = "(";
    for (std::size_t i = 0; i < measurements.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(measurements[i]);
    }
    return s + ")";
  }

  /// "100"
  std::string target_string() const {
    std::string s;
    for (int b : target) s += b ? '1' : '0';
    return s;
  }

  bool contains(int m) const {
    return std::find(measurements.begin(), measurements.end(), m) != measurements.end();
  }

  /// Slot of measurement m; throws if absent.
  std::size_t slot(int m) const {
    auto it = std::find(measurements.begin(), measurements.end(), m);
    if (it == measurements.end())
      throw InvalidArgument("measurement " + std::to_string(m) + " not in context " + name());
    return static_cast<std::size_t>(it - measurements.begin());
  }

  friend bool operator==(const Context&, const Context&) = default;
};

inline std::vector<int> parse_target(std::string_view bits) {
  std::vector<int> out;
  for (char c : bits) {
    if (c != '0' && c != '1')
      throw InvalidArgument("target '" + std::string(bits) + "' must be a string of 0/1");
    out.push_back(c == '1');
  }
  return out;
}

/// The seven contexts of each inequality in table order: (j, j+1) with
/// target 10 for C7; (k, k+2, k+4) with target 100 for C7bar.
inline std::vector<Context> inequality_contexts(Inequality ineq) {
  std::vector<Context> out;
  for (int r = 1; r <= 7; ++r) {
    if (ineq == Inequality::c7)
      out.push_back({{r, wrap7(r + 1)}, {1, 0}});
    else
      out.push_back({{r, wrap7(r + 2), wrap7(r + 4)}, {1, 0, 0}});
  }
  return out;
}

/// Outcome labels of the full d-outcome measurement for a context:
/// measurement labels followed by the completion outcomes.
inline std::vector<std::string> outcome_labels(const Context& c, int dim) {
  std::vector<std::string> labels;
  for (int m : c.measurements) labels.push_back(std::to_string(m));
  const int rest = dim - static_cast<int>(c.measurements.size());
  if (rest == 1) {
    labels.emplace_back("rest");
  } else {
    for (int i = 1; i <= rest; ++i) labels.push_back("rest" + std::to_string(i));
  }
  return labels;
}

}  // namespace ctxkit
