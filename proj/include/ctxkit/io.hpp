#pragma once

// JSON formats and markdown rendering. Floating-point values are written as
// decimal strings with 17 significant digits (exact double round trip);
// readers accept either strings or JSON numbers. Vertex and measurement
// indices in files are 1-based.

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "ctxkit/analyze.hpp"
#include "ctxkit/context.hpp"
#include "ctxkit/error.hpp"
#include "ctxkit/exgraph.hpp"
#include "ctxkit/quantum.hpp"
#include "ctxkit/simulate.hpp"
#include "ctxkit/table.hpp"

namespace ctxkit::io {

using json = nlohmann::json;

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline json number_or_null(const std::optional<double>& x) {
  return x ? json(format_number(*x)) : json(nullptr);
}

// ---------------------------------------------------------------------------
// Reading helpers. Every failure names the JSON pointer of the bad node.

inline const json& member(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path.empty() ? "/" : path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path + "/" + key, "missing required field");
  return *it;
}

inline double read_number(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw SchemaError(path, "'" + s + "' is not a decimal number");
  }
  throw SchemaError(path, "expected a number or decimal string");
}

inline std::int64_t read_integer(const json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  throw SchemaError(path, "expected an integer");
}

inline std::string read_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  return j.get<std::string>();
}

inline json parse_document(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("/", origin + " is not valid JSON: " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Graph: {"n": int, "edges": [[i,j],...], "labels": [string,...]}

inline json graph_to_json(const ExclusivityGraph& g) {
  json edges = json::array();
  for (const auto& e : g.edges()) edges.push_back({e.a + 1, e.b + 1});
  return {{"n", g.size()}, {"edges", edges}, {"labels", g.labels()}};
}

inline ExclusivityGraph graph_from_json(const json& j) {
  const std::int64_t n = read_integer(member(j, "n", ""), "/n");
  if (n <= 0) throw SchemaError("/n", "must be positive");
  const json& edges = member(j, "edges", "");
  if (!edges.is_array()) throw SchemaError("/edges", "expected an array");
  std::vector<Edge> es;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string p = "/edges/" + std::to_string(i);
    if (!edges[i].is_array() || edges[i].size() != 2) throw SchemaError(p, "expected a pair [i, j]");
    const auto a = read_integer(edges[i][0], p + "/0");
    const auto b = read_integer(edges[i][1], p + "/1");
    if (a < 1 || a > n) throw SchemaError(p + "/0", "vertex index out of range 1..n");
    if (b < 1 || b > n) throw SchemaError(p + "/1", "vertex index out of range 1..n");
    if (a == b) throw SchemaError(p, "self-loop");
    es.push_back({static_cast<int>(a - 1), static_cast<int>(b - 1)});
  }
  std::vector<std::string> labels;
  if (auto it = j.find("labels"); it != j.end()) {
    if (!it->is_array()) throw SchemaError("/labels", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) labels.push_back(read_string((*it)[i], "/labels/" + std::to_string(i)));
    if (static_cast<std::int64_t>(labels.size()) != n) throw SchemaError("/labels", "length must equal n");
  }
  return ExclusivityGraph(static_cast<int>(n), es, std::move(labels));
}

// ---------------------------------------------------------------------------
// Realization: {"dim": d, "state": [...], "vectors": {"1": [...], ...}}

inline json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(format_number(v(i)));
  return a;
}

inline Eigen::VectorXd vector_from_json(const json& j, const std::string& path, std::int64_t dim) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  if (static_cast<std::int64_t>(j.size()) != dim) throw SchemaError(path, "length must equal dim");
  Eigen::VectorXd v(dim);
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = read_number(j[i], path + "/" + std::to_string(i));
  return v;
}

inline json realization_to_json(const VectorRealization& r) {
  json vectors = json::object();
  for (int v = 0; v < r.graph.size(); ++v) vectors[r.graph.label(v)] = vector_to_json(r.vectors[v]);
  json edges = json::array();
  for (const auto& e : r.graph.edges()) edges.push_back({e.a + 1, e.b + 1});
  return {{"dim", r.dim()}, {"state", vector_to_json(r.state)}, {"vectors", vectors}, {"edges", edges}};
}

/// Reads a realization. The exclusivity graph comes from "edges" when
/// present, otherwise from the dimension (3: C7, 5: C7bar). The result is
/// checked to be an orthonormal representation.
inline VectorRealization realization_from_json(const json& j) {
  const std::int64_t dim = read_integer(member(j, "dim", ""), "/dim");
  if (dim <= 0) throw SchemaError("/dim", "must be positive");
  VectorRealization r;
  r.state = vector_from_json(member(j, "state", ""), "/state", dim);
  const json& vectors = member(j, "vectors", "");
  if (!vectors.is_object() || vectors.empty()) throw SchemaError("/vectors", "expected a non-empty object");
  const int n = static_cast<int>(vectors.size());
  for (int v = 1; v <= n; ++v) {
    const std::string key = std::to_string(v);
    r.vectors.push_back(vector_from_json(member(vectors, key, "/vectors"), "/vectors/" + key, dim));
  }
  if (auto it = j.find("edges"); it != j.end()) {
    r.graph = graph_from_json(json{{"n", n}, {"edges", *it}});
  } else if (dim == 3 && n == 7) {
    r.graph = exclusivity_graph(Inequality::c7);
  } else if (dim == 5 && n == 7) {
    r.graph = exclusivity_graph(Inequality::c7bar);
  } else {
    throw SchemaError("/edges", "required unless the realization is a 7-vector C7 (dim 3) or C7bar (dim 5) one");
  }
  check_orthonormal_representation(r);
  return r;
}

/// Inequality a realization belongs to, if any.
inline std::optional<Inequality> realization_inequality(const VectorRealization& r) {
  for (Inequality q : {Inequality::c7, Inequality::c7bar})
    if (r.dim() == dimension(q) && r.graph == exclusivity_graph(q)) return q;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Probability tables and count files
//
// {"inequality": "C7", "contexts": [{"measurements": [1,2], "target": "10",
//   "outcomes": {"1": n1, "2": n2, "rest": nr}}, ...], "meta": {...}}
//
// A context carries either raw "outcomes" counts or "probabilities" (plus an
// optional "std_error"); tables written by this library carry both when
// counts exist.

inline json source_to_json(const TableSource& s) {
  json j{{"kind", to_string(s.kind)}};
  if (s.kind == TableSource::Kind::simulated) j["seed"] = s.seed;
  if (s.kind == TableSource::Kind::ingested && !s.file.empty()) j["file"] = s.file;
  if (s.inferred_totals) j["inferred_totals"] = true;
  return j;
}

inline json table_to_json(const ProbabilityTable& t, const json& meta = json::object()) {
  json contexts = json::array();
  for (const auto& row : t.rows) {
    json c{{"measurements", row.context.measurements}, {"target", row.context.target_string()}};
    json probs = json::object();
    for (std::size_t i = 0; i < row.outcome_labels.size(); ++i)
      probs[row.outcome_labels[i]] = format_number(row.outcome_probabilities[i]);
    c["probabilities"] = probs;
    c["target_probability"] = format_number(row.target_probability());
    c["std_error"] = format_number(row.std_error);
    if (row.boundary) c["boundary"] = true;
    if (row.counts) {
      json outcomes = json::object();
      for (std::size_t i = 0; i < row.counts->outcome_labels.size(); ++i)
        outcomes[row.counts->outcome_labels[i]] = row.counts->counts[i];
      c["outcomes"] = outcomes;
    }
    contexts.push_back(std::move(c));
  }
  json j{{"inequality", to_string(t.inequality)}, {"source", source_to_json(t.source)}, {"contexts", contexts}};
  if (!meta.empty()) j["meta"] = meta;
  return j;
}

/// Count-file view of a table with counts: only measurements, target and
/// outcomes per context.
inline json counts_to_json(const ProbabilityTable& t, const json& meta = json::object()) {
  json contexts = json::array();
  for (const auto& row : t.rows) {
    if (!row.counts) throw InvalidArgument("context " + row.context.name() + " has no counts");
    json outcomes = json::object();
    for (std::size_t i = 0; i < row.counts->outcome_labels.size(); ++i)
      outcomes[row.counts->outcome_labels[i]] = row.counts->counts[i];
    contexts.push_back({{"measurements", row.context.measurements},
                        {"target", row.context.target_string()},
                        {"outcomes", outcomes}});
  }
  json j{{"inequality", to_string(t.inequality)}, {"contexts", contexts}};
  j["meta"] = meta;
  return j;
}

namespace detail {

inline Context context_from_json(const json& c, const std::string& path, Inequality ineq) {
  const json& ms = member(c, "measurements", path);
  if (!ms.is_array()) throw SchemaError(path + "/measurements", "expected an array");
  Context ctx;
  for (std::size_t i = 0; i < ms.size(); ++i)
    ctx.measurements.push_back(static_cast<int>(read_integer(ms[i], path + "/measurements/" + std::to_string(i))));
  const std::string target = read_string(member(c, "target", path), path + "/target");
  try {
    ctx.target = parse_target(target);
  } catch (const InvalidArgument& e) {
    throw SchemaError(path + "/target", e.what());
  }
  bool known = false;
  for (const auto& expected : inequality_contexts(ineq)) {
    if (expected.measurements == ctx.measurements) {
      if (expected.target != ctx.target)
        throw SchemaError(path + "/target", "expected target " + expected.target_string() + " for context " + ctx.name());
      known = true;
    }
  }
  if (!known) throw SchemaError(path + "/measurements", ctx.name() + " is not a context of " + to_string(ineq));
  return ctx;
}

// Measurement labels first (context order), then "rest*" keys in sorted order.
inline std::vector<std::string> ordered_outcome_keys(const json& obj, const Context& ctx, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  std::vector<std::string> keys;
  for (int m : ctx.measurements) {
    const std::string k = std::to_string(m);
    if (!obj.contains(k)) throw SchemaError(path + "/" + k, "missing outcome for measurement " + k);
    keys.push_back(k);
  }
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string& k = it.key();
    if (k.rfind("rest", 0) == 0) {
      keys.push_back(k);
    } else if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      throw SchemaError(path + "/" + k, "outcome key must be a context measurement or start with 'rest'");
    }
  }
  return keys;
}

}  // namespace detail

/// Reads a count file or a probability table. `origin` names the file in
/// the table's source.
inline ProbabilityTable table_from_json(const json& j, const std::string& origin = "") {
  const std::string ineq_s = read_string(member(j, "inequality", ""), "/inequality");
  Inequality ineq;
  try {
    ineq = parse_inequality(ineq_s);
  } catch (const InvalidArgument& e) {
    throw SchemaError("/inequality", e.what());
  }
  const json& contexts = member(j, "contexts", "");
  if (!contexts.is_array()) throw SchemaError("/contexts", "expected an array");

  ProbabilityTable t;
  t.inequality = ineq;
  t.source.kind = TableSource::Kind::ingested;
  t.source.file = origin;
  if (auto src = j.find("source"); src != j.end() && src->is_object()) {
    const std::string kind = src->value("kind", "ingested");
    if (kind == "ideal") t.source.kind = TableSource::Kind::ideal;
    if (kind == "simulated") {
      t.source.kind = TableSource::Kind::simulated;
      if (src->contains("seed")) t.source.seed = static_cast<std::uint64_t>(read_integer((*src)["seed"], "/source/seed"));
    }
    t.source.inferred_totals = src->value("inferred_totals", false);
  }
  if (auto meta = j.find("meta"); meta != j.end() && meta->is_object())
    t.source.inferred_totals = t.source.inferred_totals || meta->value("inferred_totals", false);

  for (std::size_t i = 0; i < contexts.size(); ++i) {
    const std::string path = "/contexts/" + std::to_string(i);
    const json& c = contexts[i];
    const Context ctx = detail::context_from_json(c, path, ineq);
    if (t.find(ctx)) throw SchemaError(path, "duplicate context " + ctx.name());
    if (auto it = c.find("outcomes"); it != c.end()) {
      CountRecord rec{ctx, detail::ordered_outcome_keys(*it, ctx, path + "/outcomes"), {}};
      for (const auto& k : rec.outcome_labels) {
        const auto n = read_integer((*it)[k], path + "/outcomes/" + k);
        if (n < 0) throw SchemaError(path + "/outcomes/" + k, "counts must be nonnegative");
        rec.counts.push_back(static_cast<std::uint64_t>(n));
      }
      if (rec.total() == 0) throw DegenerateRecord(path + ": context " + ctx.name() + " has zero total counts");
      t.rows.push_back(row_from_counts(rec));
    } else if (auto pit = c.find("probabilities"); pit != c.end()) {
      TableRow row;
      row.context = ctx;
      row.outcome_labels = detail::ordered_outcome_keys(*pit, ctx, path + "/probabilities");
      double total = 0.0;
      for (const auto& k : row.outcome_labels) {
        const double p = read_number((*pit)[k], path + "/probabilities/" + k);
        if (!(p >= 0.0 && p <= 1.0)) throw SchemaError(path + "/probabilities/" + k, "probability outside [0,1]");
        row.outcome_probabilities.push_back(p);
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-9) throw SchemaError(path + "/probabilities", "outcome probabilities must sum to 1");
      if (auto e = c.find("std_error"); e != c.end()) row.std_error = read_number(*e, path + "/std_error");
      if (row.std_error < 0) throw SchemaError(path + "/std_error", "must be nonnegative");
      row.boundary = c.value("boundary", false);
      t.rows.push_back(std::move(row));
    } else {
      throw SchemaError(path, "context needs 'outcomes' (counts) or 'probabilities'");
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Reports

inline json report_to_json(const AnalysisReport& r) {
  json bounds{{"nchv", format_number(r.bounds.nchv)},
              {"mnchv", format_number(r.bounds.mnchv)},
              {"qlm", number_or_null(r.bounds.qlm)},
              {"quantum", format_number(r.bounds.quantum)},
              {"exclusivity", number_or_null(r.bounds.exclusivity)}};
  if (r.bounds.qlm) bounds["qlm_expression"] = kQlmBoundC7Expression;
  json terms = json::array();
  for (const auto& t : r.epsilon.terms)
    terms.push_back({{"measurement", t.measurement},
                     {"contexts", {t.first.name(), t.second.name()}},
                     {"T", format_number(t.value)}});
  json eps{{"value", format_number(r.epsilon.epsilon)},
           {"nchv_bound", format_number(r.epsilon.nchv_bound)},
           {"mnchv_bound", format_number(r.epsilon.mnchv_bound)},
           {"formula", r.epsilon_formula},
           {"terms", terms}};
  json verdicts = json::object();
  for (const auto& v : r.verdicts)
    verdicts[v.name] = {{"bound", format_number(v.bound)},
                        {"significance", format_number(v.significance)},
                        {"verdict", to_string(v.verdict)}};
  json j{{"inequality", r.inequality},
         {"S", format_number(r.S)},
         {"S_error", format_number(r.S_error)},
         {"bounds", bounds},
         {"epsilon", eps},
         {"verdicts", verdicts},
         {"sigma_threshold", format_number(r.options.sigma_threshold)},
         {"equality_tol", format_number(r.options.equality_tol)}};
  if (r.inferred_totals) j["inferred_totals"] = true;
  return j;
}

inline AnalysisReport report_from_json(const json& j) {
  AnalysisReport r;
  r.inequality = read_string(member(j, "inequality", ""), "/inequality");
  if (r.inequality != "C7" && r.inequality != "C7bar" && r.inequality != "product")
    throw SchemaError("/inequality", "unknown inequality '" + r.inequality + "'");
  r.S = read_number(member(j, "S", ""), "/S");
  r.S_error = read_number(member(j, "S_error", ""), "/S_error");
  const json& b = member(j, "bounds", "");
  r.bounds.nchv = read_number(member(b, "nchv", "/bounds"), "/bounds/nchv");
  r.bounds.mnchv = read_number(member(b, "mnchv", "/bounds"), "/bounds/mnchv");
  r.bounds.quantum = read_number(member(b, "quantum", "/bounds"), "/bounds/quantum");
  if (b.contains("qlm") && !b["qlm"].is_null()) r.bounds.qlm = read_number(b["qlm"], "/bounds/qlm");
  if (b.contains("exclusivity") && !b["exclusivity"].is_null())
    r.bounds.exclusivity = read_number(b["exclusivity"], "/bounds/exclusivity");
  const json& e = member(j, "epsilon", "");
  r.epsilon.epsilon = read_number(member(e, "value", "/epsilon"), "/epsilon/value");
  r.epsilon.nchv_bound = r.bounds.nchv;
  r.epsilon.mnchv_bound = r.bounds.mnchv;
  r.epsilon_formula = e.value("formula", "");
  if (j.contains("sigma_threshold")) r.options.sigma_threshold = read_number(j["sigma_threshold"], "/sigma_threshold");
  if (j.contains("equality_tol")) r.options.equality_tol = read_number(j["equality_tol"], "/equality_tol");
  r.inferred_totals = j.value("inferred_totals", false);
  const json& v = member(j, "verdicts", "");
  if (!v.is_object()) throw SchemaError("/verdicts", "expected an object");
  for (auto it = v.begin(); it != v.end(); ++it) {
    const std::string p = "/verdicts/" + it.key();
    BoundCheck c;
    c.name = it.key();
    c.bound = read_number(member(*it, "bound", p), p + "/bound");
    c.significance = read_number(member(*it, "significance", p), p + "/significance");
    const std::string verdict = read_string(member(*it, "verdict", p), p + "/verdict");
    if (verdict == "exceeds") c.verdict = Verdict::exceeds;
    else if (verdict == "consistent") c.verdict = Verdict::consistent;
    else if (verdict == "below") c.verdict = Verdict::below;
    else throw SchemaError(p + "/verdict", "unknown verdict '" + verdict + "'");
    r.verdicts.push_back(c);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Markdown

namespace detail {

inline std::string fixed3(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

inline std::string pad(const std::string& s, std::size_t width) {
  // Width counts code points so the "±" column lines up.
  std::size_t cps = 0;
  for (unsigned char ch : s) cps += (ch & 0xC0) != 0x80;
  return s + std::string(width > cps ? width - cps : 0, ' ');
}

inline std::string render_rows(const std::vector<std::vector<std::string>>& rows, std::size_t header_rows_after) {
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) {
      std::size_t cps = 0;
      for (unsigned char ch : r[i]) cps += (ch & 0xC0) != 0x80;
      width[i] = std::max(width[i], cps);
    }
  std::ostringstream out;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out << "|";
    for (std::size_t i = 0; i < rows[k].size(); ++i) out << " " << pad(rows[k][i], width[i]) << " |";
    out << "\n";
    if (k + 1 == header_rows_after) {
      out << "|";
      for (std::size_t w : width) out << std::string(w + 2, '-') << "|";
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace detail

/// Fixed-width table: context, probability ± error, theory; last row S.
inline std::string render_table_markdown(const ProbabilityTable& t, const ProbabilityTable& theory) {
  const bool c7 = t.inequality == Inequality::c7;
  std::vector<std::vector<std::string>> rows;
  rows.push_back({c7 ? "(j,j⊕1)" : "(k⊖2,k,k⊕2)", c7 ? "P(1,0\\|j,j⊕1)" : "P(1,0,0\\|k⊖2,k,k⊕2)", "Theory"});
  const auto ours = canonical_rows(t);
  const auto ideal = canonical_rows(theory);
  for (std::size_t i = 0; i < ours.size(); ++i)
    rows.push_back({ours[i]->context.name(),
                    detail::fixed3(ours[i]->target_probability()) + " ± " + detail::fixed3(ours[i]->std_error),
                    detail::fixed3(ideal[i]->target_probability())});
  const SValue s = evaluate_S(t);
  const SValue st = evaluate_S(theory);
  rows.push_back({c7 ? "S(C7)" : "S(C7bar)", detail::fixed3(s.value) + " ± " + detail::fixed3(s.error),
                  detail::fixed3(st.value)});
  return detail::render_rows(rows, 1);
}

inline std::string render_report_markdown(const AnalysisReport& r) {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "S(%s) = %.4f ± %.4f\n\n", r.inequality.c_str(), r.S, r.S_error);
  out << buf;
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"bound", "value", "significance (σ)", "verdict"});
  for (const auto& v : r.verdicts) {
    std::snprintf(buf, sizeof buf, "%.4f", v.bound);
    std::string bound = buf;
    std::snprintf(buf, sizeof buf, "%.2f", v.significance);
    rows.push_back({v.name, bound, buf, to_string(v.verdict)});
  }
  out << detail::render_rows(rows, 1);
  std::snprintf(buf, sizeof buf, "\nepsilon = %.6f\n", r.epsilon.epsilon);
  out << buf << "formula: " << r.epsilon_formula << "\n";
  if (r.inferred_totals) out << "note: count totals were inferred from quoted errors\n";
  return out.str();
}

}  // namespace ctxkit::io
