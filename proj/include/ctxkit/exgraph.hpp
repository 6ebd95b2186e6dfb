#pragma once

// Exclusivity graphs: vertices are events, edges join mutually exclusive
// events. Vertices are 0-based internally; labels carry the 1-based names
// used in files and tables.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctxkit/error.hpp"

namespace ctxkit {

struct Edge {
  int a;
  int b;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

class ExclusivityGraph {
 public:
  ExclusivityGraph() = default;

  /// Builds a graph on `n` vertices. Edges may be given in either
  /// orientation; duplicates are merged. Empty `labels` means "1".."n".
  ExclusivityGraph(int n, std::span<const Edge> edges,
                   std::vector<std::string> labels = {})
      : n_(n), adj_(static_cast<std::size_t>(n) * n, 0), labels_(std::move(labels)) {
    if (n <= 0) throw InvalidArgument("graph must have at least one vertex");
    for (const auto& e : edges) {
      if (e.a < 0 || e.b < 0 || e.a >= n || e.b >= n)
        throw InvalidArgument("edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                              ") out of range for n=" + std::to_string(n));
      if (e.a == e.b) throw InvalidArgument("self-loop on vertex " + std::to_string(e.a));
      adj_[index(e.a, e.b)] = 1;
      adj_[index(e.b, e.a)] = 1;
    }
    if (labels_.empty()) {
      labels_.reserve(n);
      for (int v = 0; v < n; ++v) labels_.push_back(std::to_string(v + 1));
    } else if (static_cast<int>(labels_.size()) != n) {
      throw InvalidArgument("label count " + std::to_string(labels_.size()) +
                            " does not match n=" + std::to_string(n));
    }
  }

  int size() const noexcept { return n_; }

  bool adjacent(int a, int b) const { return adj_[index(a, b)] != 0; }

  int degree(int v) const {
    int d = 0;
    for (int u = 0; u < n_; ++u) d += adj_[index(v, u)];
    return d;
  }

  /// Edges with a < b, in lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (int a = 0; a < n_; ++a)
      for (int b = a + 1; b < n_; ++b)
        if (adjacent(a, b)) out.push_back({a, b});
    return out;
  }

  std::size_t edge_count() const {
    return static_cast<std::size_t>(std::count(adj_.begin(), adj_.end(), 1)) / 2;
  }

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(int v) const { return labels_.at(v); }

  std::optional<int> vertex_of(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<int>(it - labels_.begin());
  }

  friend bool operator==(const ExclusivityGraph&, const ExclusivityGraph&) = default;

 private:
  std::size_t index(int a, int b) const {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(n_) + b;
  }

  int n_ = 0;
  std::vector<std::uint8_t> adj_;
  std::vector<std::string> labels_;
};

/// The n-cycle: vertex i is exclusive with i+1 (mod n).
inline ExclusivityGraph cycle_graph(int n) {
  if (n < 3) throw InvalidArgument("cycle needs n >= 3, got " + std::to_string(n));
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
  return ExclusivityGraph(n, edges);
}

inline ExclusivityGraph complete_graph(int n) {
  std::vector<Edge> edges;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) edges.push_back({a, b});
  return ExclusivityGraph(n, edges);
}

inline ExclusivityGraph edgeless_graph(int n) { return ExclusivityGraph(n, {}); }

inline ExclusivityGraph complement(const ExclusivityGraph& g) {
  std::vector<Edge> edges;
  for (int a = 0; a < g.size(); ++a)
    for (int b = a + 1; b < g.size(); ++b)
      if (!g.adjacent(a, b)) edges.push_back({a, b});
  return ExclusivityGraph(g.size(), edges, g.labels());
}

/// OR (co-normal) product. Vertex (u1,u2) maps to u1 * n2 + u2 and is
/// labelled "(label1,label2)".
inline ExclusivityGraph or_product(const ExclusivityGraph& g1, const ExclusivityGraph& g2) {
  const int n1 = g1.size();
  const int n2 = g2.size();
  const int n = n1 * n2;
  std::vector<std::string> labels;
  labels.reserve(n);
  for (int u1 = 0; u1 < n1; ++u1)
    for (int u2 = 0; u2 < n2; ++u2)
      labels.push_back("(" + g1.label(u1) + "," + g2.label(u2) + ")");
  std::vector<Edge> edges;
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      const int u1 = p / n2, u2 = p % n2, v1 = q / n2, v2 = q % n2;
      const bool first = u1 != v1 && g1.adjacent(u1, v1);
      const bool second = u2 != v2 && g2.adjacent(u2, v2);
      if (first || second) edges.push_back({p, q});
    }
  }
  return ExclusivityGraph(n, edges, std::move(labels));
}

// ---------------------------------------------------------------------------
// Independence number

inline constexpr int kDefaultIndependenceCap = 64;

namespace detail {

// Maximum clique by branch and bound with greedy-coloring bounds (MCQ
// ordering). `nbr[v]` is the clique-graph neighbourhood of v as a bitmask.
class MaxCliqueSearch {
 public:
  explicit MaxCliqueSearch(std::vector<std::uint64_t> nbr) : nbr_(std::move(nbr)) {}

  std::vector<int> run() {
    const int n = static_cast<int>(nbr_.size());
    std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    current_.clear();
    best_.clear();
    expand(all);
    return best_;
  }

 private:
  void expand(std::uint64_t candidates) {
    std::vector<int> order;
    std::vector<int> bound;
    color_sort(candidates, order, bound);
    for (int i = static_cast<int>(order.size()) - 1; i >= 0; --i) {
      if (current_.size() + static_cast<std::size_t>(bound[i]) <= best_.size()) return;
      const int v = order[i];
      current_.push_back(v);
      const std::uint64_t next = candidates & nbr_[v];
      if (next == 0) {
        if (current_.size() > best_.size()) best_ = current_;
      } else {
        expand(next);
      }
      current_.pop_back();
      candidates &= ~(std::uint64_t{1} << v);
    }
  }

  // Vertices of `p` in color order; bound[i] is the number of colors used
  // up to order[i], an upper bound on the clique size among order[0..i].
  void color_sort(std::uint64_t p, std::vector<int>& order, std::vector<int>& bound) const {
    int color = 0;
    while (p != 0) {
      ++color;
      std::uint64_t q = p;
      while (q != 0) {
        const int v = std::countr_zero(q);
        q &= ~(std::uint64_t{1} << v);
        q &= ~nbr_[v];
        p &= ~(std::uint64_t{1} << v);
        order.push_back(v);
        bound.push_back(color);
      }
    }
  }

  std::vector<std::uint64_t> nbr_;
  std::vector<int> current_;
  std::vector<int> best_;
};

}  // namespace detail

/// A maximum independent set, as sorted 0-based vertices. Exact; throws
/// SizeLimitError above `cap` vertices (the bitset search holds at most 64).
inline std::vector<int> maximum_independent_set(const ExclusivityGraph& g,
                                                int cap = kDefaultIndependenceCap) {
  const int n = g.size();
  if (n > cap || n > 64)
    throw SizeLimitError("independence number: n=" + std::to_string(n) +
                         " exceeds exact-search cap " + std::to_string(std::min(cap, 64)));
  std::vector<std::uint64_t> nbr(n, 0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && !g.adjacent(a, b)) nbr[a] |= std::uint64_t{1} << b;
  auto best = detail::MaxCliqueSearch(std::move(nbr)).run();
  std::sort(best.begin(), best.end());
  return best;
}

/// Classical (NCHV) bound of the event-sum inequality on g.
inline int independence_number(const ExclusivityGraph& g, int cap = kDefaultIndependenceCap) {
  return static_cast<int>(maximum_independent_set(g, cap).size());
}

// ---------------------------------------------------------------------------
// Closed forms

/// Lovász number of C_n (or its complement) for odd n >= 5.
inline double odd_cycle_theta_closed_form(int n, bool complemented) {
  if (n < 5 || n % 2 == 0)
    throw InvalidArgument("closed form needs odd n >= 5, got " + std::to_string(n));
  const double c = std::cos(std::numbers::pi / n);
  return complemented ? (1.0 + c) / c : n * c / (1.0 + c);
}

/// Maximum of S(C7) with local quantum measurements in a Bell scenario.
inline double qlm_bound_c7() { return 2.0 + 3.0 * std::sqrt(3.0) / 4.0; }
inline constexpr const char* kQlmBoundC7Expression = "2 + 3*sqrt(3)/4";

/// Upper bound on S(C7 (x) complement C7) for theories obeying the exclusivity principle.
inline constexpr double kExclusivityBoundProduct = 7.0;

// ---------------------------------------------------------------------------
// Odd holes

inline constexpr int kHoleSearchCap = 20;

/// Vertex subsets (sorted, 0-based) of odd size 5..max_len whose induced
/// subgraph is a chordless cycle. Exhaustive; n is capped at 20.
inline std::vector<std::vector<int>> find_induced_odd_holes(const ExclusivityGraph& g,
                                                            int max_len) {
  const int n = g.size();
  if (n > kHoleSearchCap)
    throw SizeLimitError("odd-hole search: n=" + std::to_string(n) + " exceeds cap " +
                         std::to_string(kHoleSearchCap));
  std::vector<std::uint32_t> adj(n, 0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (g.adjacent(a, b)) adj[a] |= 1u << b;

  auto is_chordless_cycle = [&](std::uint32_t mask) {
    for (std::uint32_t m = mask; m != 0; m &= m - 1) {
      const int v = std::countr_zero(m);
      if (std::popcount(adj[v] & mask) != 2) return false;
    }
    // 2-regular: a cycle iff connected.
    std::uint32_t seen = mask & (~mask + 1);
    std::uint32_t frontier = seen;
    while (frontier != 0) {
      std::uint32_t next = 0;
      for (std::uint32_t m = frontier; m != 0; m &= m - 1) next |= adj[std::countr_zero(m)];
      next &= mask & ~seen;
      seen |= next;
      frontier = next;
    }
    return seen == mask;
  };

  std::vector<std::vector<int>> holes;
  const int top = std::min(max_len, n);
  for (int s = 5; s <= top; s += 2) {
    // Gosper's hack over all s-subsets of n vertices.
    std::uint64_t mask = (std::uint64_t{1} << s) - 1;
    const std::uint64_t limit = std::uint64_t{1} << n;
    while (mask < limit) {
      if (is_chordless_cycle(static_cast<std::uint32_t>(mask))) {
        std::vector<int> hole;
        for (std::uint64_t m = mask; m != 0; m &= m - 1) hole.push_back(std::countr_zero(m));
        holes.push_back(std::move(hole));
      }
      const std::uint64_t c = mask & (~mask + 1);
      const std::uint64_t r = mask + c;
      mask = (((r ^ mask) >> 2) / c) | r;
    }
  }
  return holes;
}

struct HoleDiagnostic {
  std::vector<std::vector<int>> holes;      // induced odd cycles of g
  std::vector<std::vector<int>> antiholes;  // induced odd cycles of complement(g)
  /// True when g can exhibit probabilities with no classical model.
  bool nonclassical_possible() const { return !holes.empty() || !antiholes.empty(); }
};

inline HoleDiagnostic classicality_diagnostic(const ExclusivityGraph& g, int max_len) {
  return {find_induced_odd_holes(g, max_len), find_induced_odd_holes(complement(g), max_len)};
}

}  // namespace ctxkit
