#pragma once

#include "eqlog/program.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace eqlog::analysis {

/// Counts vertex and edge visits, so tests can check that the analyses scale
/// linearly with program size without relying on wall-clock time.
struct OpCounter {
  std::uint64_t ops = 0;
  void tick(std::uint64_t n = 1) { ops += n; }
};

/// Directed graph with an edge f -> g whenever g (a symbol or a literal
/// value) occurs in the right-hand side of a rule rooted at f. Only edge
/// endpoints become vertices; defined symbols whose rules are all collapsing
/// have no vertex and are listed separately.
class NeedsGraph {
 public:
  using Vertex = std::uint32_t;

  std::size_t vertex_count() const { return atoms_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const Atom& atom(Vertex v) const { return atoms_[v]; }
  const std::string& label(Vertex v) const { return labels_[v]; }
  bool is_defined(Vertex v) const { return defined_[v]; }
  const std::vector<Vertex>& successors(Vertex v) const { return succ_[v]; }
  std::size_t in_degree(Vertex v) const { return in_degree_[v]; }
  std::size_t out_degree(Vertex v) const { return succ_[v].size(); }

  std::optional<Vertex> find(const Atom& a) const;
  bool has_edge(const Atom& from, const Atom& to) const;
  std::vector<std::pair<Atom, Atom>> edges() const;

  const std::vector<SymbolId>& defined_without_edges() const { return defined_without_edges_; }

 private:
  friend NeedsGraph build_needs_graph(const Program&, OpCounter*);

  Vertex intern(const Atom& a, const Program& program);

  std::vector<Atom> atoms_;
  std::vector<std::string> labels_;
  std::vector<bool> defined_;
  std::vector<std::vector<Vertex>> succ_;
  std::vector<std::size_t> in_degree_;
  std::unordered_map<Atom, Vertex, AtomHash> index_;
  std::size_t edge_count_ = 0;
  std::vector<SymbolId> defined_without_edges_;
};

NeedsGraph build_needs_graph(const Program& program, OpCounter* counter = nullptr);

/// Vertices lying on some directed cycle (self-loops included).
std::vector<bool> cycle_vertices(const NeedsGraph& graph, OpCounter* counter = nullptr);

/// Necessary condition for tabling to improve termination: a directed cycle exists.
bool prop1_has_cycle(const NeedsGraph& graph, OpCounter* counter = nullptr);

/// Stronger termination condition: a cycle vertex is reachable (length >= 0)
/// from a vertex for some symbol or literal occurring in `goal`.
bool prop2_termination_condition(const NeedsGraph& graph, const Term& goal,
                                 OpCounter* counter = nullptr);

/// Necessary condition for tabling to improve efficiency: some vertex has
/// in-degree >= 1 and out-degree >= 1.
bool prop3_efficiency_condition(const NeedsGraph& graph, OpCounter* counter = nullptr);

/// Goal-aware efficiency condition: some vertex with in-degree > 1 and an
/// outgoing path of at least `min_chain` edges is reachable from two distinct
/// goal vertices. `min_chain` = 1 is the plain out-degree >= 1 test.
bool prop4_efficiency_condition_term(const NeedsGraph& graph, const Term& goal,
                                     std::size_t min_chain = 1, OpCounter* counter = nullptr);

/// Defined symbols reachable from the goal's symbols, including goal symbols
/// that are defined but have no vertex.
std::set<SymbolId> reachable_defined_symbols(const Program& program, const NeedsGraph& graph,
                                             const Term& goal, OpCounter* counter = nullptr);

/// Rules whose root is not in `reachable`.
std::set<RuleId> prunable_rules(const Program& program, const std::set<SymbolId>& reachable);

/// Inputs for the never-add signature test, computed while scanning rules.
struct NeverAddSets {
  bool eligible = false;
  std::vector<RuleId> collapsing_rules;
  /// User constructor constants that are not the entire rhs of any rule.
  std::set<SymbolId> user_constants;
  /// User constructors that are never the outermost symbol of a rhs.
  std::set<SymbolId> outermost_safe_constructors;
  /// Literal types with no operator taking (or producing) them in any rhs or
  /// in the goal.
  std::set<LiteralType> predefined_types;
  /// Literal values that are the entire rhs of some rule.
  std::set<Atom> rhs_literals;

  bool literal_qualifies(const Atom& literal) const {
    return predefined_types.contains(literal.literal_type()) && !rhs_literals.contains(literal);
  }
};

/// `goal` may be null when no goal is known; it then contributes no operators.
NeverAddSets never_add_sets(const Program& program, const Term* goal);

/// GraphViz rendering. Defined symbols are boxes, constructors ellipses, and
/// vertices on a cycle are drawn red.
std::string to_dot(const NeedsGraph& graph);

struct AnalysisOptions {
  std::size_t min_chain = 1;
};

struct AnalysisReport {
  std::size_t vertex_count = 0;
  std::size_t edge_count = 0;
  bool prop1_cycle_exists = false;
  std::optional<bool> prop2_cycle_reachable_from_term;
  bool prop3_efficiency_node_exists = false;
  std::optional<bool> prop4_efficiency_node_doubly_reachable;
  std::optional<std::set<SymbolId>> reachable_defined;
  std::optional<std::set<RuleId>> prunable_rules;
  NeverAddSets never_add;
  std::vector<SymbolId> defined_without_edges;
  std::string recommendation;
};

AnalysisReport analyze(const Program& program, const std::optional<Term>& goal,
                       const AnalysisOptions& options = {});

}  // namespace eqlog::analysis
