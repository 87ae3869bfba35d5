#include "eqlog/analysis.hpp"

namespace eqlog::analysis {

namespace {

std::string recommend(const AnalysisReport& r, bool have_goal) {
  std::string text;
  bool termination = have_goal ? *r.prop2_cycle_reachable_from_term : r.prop1_cycle_exists;
  bool efficiency =
      have_goal ? *r.prop4_efficiency_node_doubly_reachable : r.prop3_efficiency_node_exists;

  if (!r.prop1_cycle_exists) {
    text += "The needs graph is acyclic: tabling cannot improve termination.";
  } else if (!termination) {
    text += "No cycle of the needs graph is reachable from the goal: tabling cannot improve "
            "termination for this goal.";
  } else {
    text += "A needs-graph cycle is reachable";
    text += have_goal ? " from the goal" : "";
    text += ": tabling may improve termination.";
  }
  text += " ";
  if (!r.prop3_efficiency_node_exists) {
    text += "No vertex has both incoming and outgoing edges: tabling cannot save reduction "
            "steps.";
  } else if (!efficiency) {
    text += "No shared vertex is reachable from two distinct goal symbols: tabling is unlikely "
            "to save reduction steps for this goal.";
  } else {
    text += "Some vertex may be needed repeatedly: tabling may save reduction steps.";
  }
  text += " Verdict: ";
  text += (termination || efficiency) ? "consider the tabled engine."
                                      : "the untabled engine is sufficient.";
  if (r.prop3_efficiency_node_exists && have_goal && !efficiency) {
    text += " (The program-only efficiency test uses in-degree >= 1 while the goal-aware test "
            "uses in-degree > 1; the two thresholds are applied as stated and may disagree.)";
  }
  if (!r.never_add.eligible) {
    text += " Never-add signatures are disabled because rules";
    for (RuleId id : r.never_add.collapsing_rules) text += " " + std::to_string(id);
    text += " are collapsing (right-hand side is a variable).";
  }
  return text;
}

}  // namespace

AnalysisReport analyze(const Program& program, const std::optional<Term>& goal,
                       const AnalysisOptions& options) {
  NeedsGraph graph = build_needs_graph(program);
  AnalysisReport r;
  r.vertex_count = graph.vertex_count();
  r.edge_count = graph.edge_count();
  r.prop1_cycle_exists = prop1_has_cycle(graph);
  r.prop3_efficiency_node_exists = prop3_efficiency_condition(graph);
  r.defined_without_edges = graph.defined_without_edges();
  if (goal) {
    r.prop2_cycle_reachable_from_term = prop2_termination_condition(graph, *goal);
    r.prop4_efficiency_node_doubly_reachable =
        prop4_efficiency_condition_term(graph, *goal, options.min_chain);
    r.reachable_defined = reachable_defined_symbols(program, graph, *goal);
    r.prunable_rules = eqlog::analysis::prunable_rules(program, *r.reachable_defined);
  }
  r.never_add = never_add_sets(program, goal ? &*goal : nullptr);
  r.recommendation = recommend(r, goal.has_value());
  return r;
}

}  // namespace eqlog::analysis
