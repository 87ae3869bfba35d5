#include "eqlog/cli.hpp"

#include "eqlog/analysis.hpp"
#include "eqlog/parser.hpp"
#include "eqlog/rewrite.hpp"
#include "eqlog/tabling.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace eqlog::cli {

namespace {

using nlohmann::json;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Loaded {
  Program program;
  std::optional<Term> goal;
};

std::optional<Loaded> load(const RunConfig& config, std::ostream& err) {
  auto text = read_file(config.program_path);
  if (!text) {
    err << "error: cannot read " << config.program_path << '\n';
    return std::nullopt;
  }
  try {
    Loaded l{parse_program(*text), std::nullopt};
    if (config.goal) l.goal = parse_term(*config.goal, l.program);
    return l;
  } catch (const ProgramError& e) {
    err << "error: " << e.what() << '\n';
    return std::nullopt;
  }
}

std::vector<std::string> symbol_names(const Program& p, const std::set<SymbolId>& ids) {
  std::vector<std::string> out;
  for (SymbolId id : ids) out.emplace_back(p.symbol_name(id));
  return out;
}

std::string type_name(LiteralType t) { return t == LiteralType::Int ? "int" : "bool"; }

std::string join(const std::vector<std::string>& items) {
  if (items.empty()) return "none";
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : " ") + s;
  return out;
}

template <typename T>
std::vector<std::string> stringify(const T& items) {
  std::vector<std::string> out;
  for (const auto& i : items) out.push_back(std::to_string(i));
  return out;
}

json rule_counts(const std::map<RuleId, std::uint64_t>& counts) {
  json j = json::object();
  for (const auto& [id, n] : counts) j[std::to_string(id)] = n;
  return j;
}

std::string rule_counts_text(const std::map<RuleId, std::uint64_t>& counts) {
  std::string out;
  for (const auto& [id, n] : counts)
    out += (out.empty() ? "" : " ") + std::to_string(id) + ":" + std::to_string(n);
  return out.empty() ? "-" : out;
}

json stats_json(const tabling::Stats& s) {
  return {{"rule_applications", rule_counts(s.rule_applications)},
          {"rule_applications_total", s.rule_applications_total()},
          {"builtin_evals", s.builtin_evals},
          {"merges", s.merges},
          {"signatures_created", s.signatures_created},
          {"match_attempts", s.match_attempts},
          {"match_attempts_skipped_dont_reduce", s.match_attempts_skipped_dont_reduce},
          {"dependency_entries_added", s.dependency_entries_added},
          {"dependency_entries_suppressed_never_add", s.dependency_entries_suppressed_never_add}};
}

json stats_json(const rewrite::RewriteOutcome& r) {
  return {{"rule_applications", rule_counts(r.rule_applications)},
          {"rule_applications_total", r.rule_applications_total()},
          {"builtin_evals", r.builtin_evals},
          {"steps_applied", r.steps_applied}};
}

int exit_code(const tabling::Outcome& o) {
  if (o.normal_form()) return kExitNormalForm;
  return o.no_finite_normal_form() ? kExitNoFiniteNormalForm : kExitStepLimit;
}

int exit_code(const rewrite::RewriteOutcome& o) {
  return o.normal_form() ? kExitNormalForm : kExitStepLimit;
}

json outcome_json(const tabling::Outcome& o, const Program& p) {
  json j;
  if (auto nf = o.normal_form()) {
    j["outcome"] = "normal_form";
    j["term"] = to_string(nf->term, p);
  } else if (auto nf = std::get_if<tabling::NoFiniteNormalForm>(&o.result)) {
    j["outcome"] = "no_finite_normal_form";
    j["witness_class"] = nf->witness;
    j["cyclic"] = nf->cyclic;
  } else {
    const auto& sl = std::get<tabling::StepLimitReached>(o.result);
    j["outcome"] = "step_limit";
    j["partial"] = sl.partial ? json(to_string(*sl.partial, p)) : json(nullptr);
  }
  j["stats"] = stats_json(o.stats);
  return j;
}

json outcome_json(const rewrite::RewriteOutcome& o, const Program& p) {
  json j;
  if (auto nf = o.normal_form()) {
    j["outcome"] = "normal_form";
    j["term"] = to_string(nf->term, p);
  } else {
    j["outcome"] = "step_limit";
    j["partial"] = to_string(std::get<rewrite::StepLimitReached>(o.result).current, p);
  }
  j["stats"] = stats_json(o);
  return j;
}

std::string outcome_text(const tabling::Outcome& o, const Program& p) {
  if (auto nf = o.normal_form()) return to_string(nf->term, p);
  if (auto nf = std::get_if<tabling::NoFiniteNormalForm>(&o.result)) {
    return std::string("no finite normal form (") +
           (nf->cyclic ? "cycle through class " : "no unreduced signature in class ") +
           std::to_string(nf->witness) + ")";
  }
  const auto& sl = std::get<tabling::StepLimitReached>(o.result);
  return "step limit reached" + (sl.partial ? "; partial term " + to_string(*sl.partial, p) : "");
}

std::string outcome_text(const rewrite::RewriteOutcome& o, const Program& p) {
  if (auto nf = o.normal_form()) return to_string(nf->term, p);
  return "step limit reached after " + std::to_string(o.steps_applied) + " steps";
}

void print_stats(std::ostream& out, const tabling::Outcome* t, const rewrite::RewriteOutcome* u) {
  auto row = [&](const std::string& name, const std::string& a, const std::string& b) {
    out << std::left << std::setw(44) << name;
    if (t) out << std::setw(16) << a;
    if (u) out << b;
    out << '\n';
  };
  const std::string na = "-";
  row("", t ? "tabled" : "", u ? "untabled" : "");
  row("rule applications", t ? std::to_string(t->stats.rule_applications_total()) : na,
      u ? std::to_string(u->rule_applications_total()) : na);
  row("  per rule", t ? rule_counts_text(t->stats.rule_applications) : na,
      u ? rule_counts_text(u->rule_applications) : na);
  row("builtin evals", t ? std::to_string(t->stats.builtin_evals) : na,
      u ? std::to_string(u->builtin_evals) : na);
  row("steps applied", na, u ? std::to_string(u->steps_applied) : na);
  if (!t) return;
  const tabling::Stats& s = t->stats;
  row("merges", std::to_string(s.merges), na);
  row("signatures created", std::to_string(s.signatures_created), na);
  row("match attempts", std::to_string(s.match_attempts), na);
  row("match attempts skipped (don't-reduce)", std::to_string(s.match_attempts_skipped_dont_reduce),
      na);
  row("dependency entries added", std::to_string(s.dependency_entries_added), na);
  row("dependency entries suppressed (never-add)",
      std::to_string(s.dependency_entries_suppressed_never_add), na);
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err) {
  auto loaded = load(config, err);
  if (!loaded) return kExitError;
  const Program& p = loaded->program;
  analysis::AnalysisReport r = analysis::analyze(p, loaded->goal);

  if (config.dot_path) {
    std::ofstream dot(*config.dot_path);
    if (!dot || !(dot << analysis::to_dot(analysis::build_needs_graph(p)))) {
      err << "error: cannot write " << *config.dot_path << '\n';
      return kExitError;
    }
  }

  std::vector<std::string> types;
  for (LiteralType t : r.never_add.predefined_types) types.push_back(type_name(t));
  std::vector<std::string> without_edges;
  for (SymbolId id : r.defined_without_edges) without_edges.emplace_back(p.symbol_name(id));

  if (config.json) {
    json j{{"schema", "eqlog.analyze/1"},
           {"program", config.program_path},
           {"goal", loaded->goal ? json(to_string(*loaded->goal, p)) : json(nullptr)},
           {"needs_graph", {{"vertices", r.vertex_count}, {"edges", r.edge_count}}},
           {"prop1_cycle_exists", r.prop1_cycle_exists},
           {"prop2_cycle_reachable_from_term",
            r.prop2_cycle_reachable_from_term ? json(*r.prop2_cycle_reachable_from_term)
                                              : json(nullptr)},
           {"prop3_efficiency_node_exists", r.prop3_efficiency_node_exists},
           {"prop4_efficiency_node_doubly_reachable",
            r.prop4_efficiency_node_doubly_reachable
                ? json(*r.prop4_efficiency_node_doubly_reachable)
                : json(nullptr)},
           {"reachable_defined",
            r.reachable_defined ? json(symbol_names(p, *r.reachable_defined)) : json(nullptr)},
           {"prunable_rules", r.prunable_rules ? json(*r.prunable_rules) : json(nullptr)},
           {"never_add_eligible", r.never_add.eligible},
           {"collapsing_rules", r.never_add.collapsing_rules},
           {"never_add_user_constants", symbol_names(p, r.never_add.user_constants)},
           {"never_add_outermost_safe_constructors",
            symbol_names(p, r.never_add.outermost_safe_constructors)},
           {"never_add_predefined_types", types},
           {"defined_without_edges", without_edges},
           {"recommendation", r.recommendation}};
    out << j.dump(2) << '\n';
    return kExitNormalForm;
  }

  auto yes_no = [](bool b) { return b ? "true" : "false"; };
  out << "needs graph: " << r.vertex_count << " vertices, " << r.edge_count << " edges\n";
  out << "prop1 cycle exists: " << yes_no(r.prop1_cycle_exists) << '\n';
  if (r.prop2_cycle_reachable_from_term)
    out << "prop2 cycle reachable from term: " << yes_no(*r.prop2_cycle_reachable_from_term)
        << '\n';
  out << "prop3 efficiency node exists: " << yes_no(r.prop3_efficiency_node_exists) << '\n';
  if (r.prop4_efficiency_node_doubly_reachable)
    out << "prop4 efficiency node doubly reachable: "
        << yes_no(*r.prop4_efficiency_node_doubly_reachable) << '\n';
  if (r.reachable_defined)
    out << "reachable defined symbols: " << join(symbol_names(p, *r.reachable_defined)) << '\n';
  if (r.prunable_rules) out << "prunable rules: " << join(stringify(*r.prunable_rules)) << '\n';
  out << "never-add eligible: " << yes_no(r.never_add.eligible) << '\n';
  if (!r.never_add.eligible)
    out << "collapsing rules: " << join(stringify(r.never_add.collapsing_rules)) << '\n';
  out << "never-add user constants: " << join(symbol_names(p, r.never_add.user_constants)) << '\n';
  out << "never-add outermost-safe constructors: "
      << join(symbol_names(p, r.never_add.outermost_safe_constructors)) << '\n';
  out << "never-add predefined types: " << join(types) << '\n';
  if (!without_edges.empty())
    out << "defined symbols without edges: " << join(without_edges) << '\n';
  out << "recommendation: " << r.recommendation << '\n';
  return kExitNormalForm;
}

int cmd_normalize(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (!config.goal) {
    err << "error: normalize needs a goal term\n";
    return kExitError;
  }
  auto loaded = load(config, err);
  if (!loaded) return kExitError;
  const Program& p = loaded->program;
  const Term& goal = *loaded->goal;

  std::optional<tabling::Outcome> tabled;
  std::optional<rewrite::RewriteOutcome> untabled;
  std::ostringstream trace;
  try {
    if (config.mode != Mode::Untabled) {
      tabling::EngineOptions opts;
      opts.dont_reduce = config.dont_reduce;
      opts.never_add = config.never_add;
      opts.prune_rules = config.prune_rules;
      opts.max_steps = config.max_steps;
      if (config.trace) opts.trace = &trace;
      tabled = tabling::normalize_tabled(p, goal, opts);
    }
    if (config.mode != Mode::Tabled)
      untabled = rewrite::normalize_untabled(p, goal, config.max_steps);
  } catch (const ArithmeticOverflow& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  int code;
  if (tabled && untabled) {
    if (tabled->normal_form() && untabled->normal_form()) code = kExitNormalForm;
    else if (tabled->no_finite_normal_form()) code = kExitNoFiniteNormalForm;
    else code = kExitStepLimit;
  } else {
    code = tabled ? exit_code(*tabled) : exit_code(*untabled);
  }
  const bool disagree = tabled && untabled && tabled->normal_form() && untabled->normal_form() &&
                        !(tabled->normal_form()->term == untabled->normal_form()->term);
  if (disagree) err << "warning: tabled and untabled normal forms differ\n";

  if (config.json) {
    static const char* const kModes[] = {"tabled", "untabled", "both"};
    json j{{"schema", "eqlog.normalize/1"},
           {"program", config.program_path},
           {"goal", to_string(goal, p)},
           {"mode", kModes[static_cast<int>(config.mode)]},
           {"max_steps", config.max_steps},
           {"options",
            {{"dont_reduce", config.dont_reduce},
             {"never_add", config.never_add},
             {"prune_rules", config.prune_rules}}}};
    if (tabled) j["tabled"] = outcome_json(*tabled, p);
    if (untabled) j["untabled"] = outcome_json(*untabled, p);
    if (tabled && untabled) j["agree"] = !disagree;
    if (config.trace) j["trace"] = split_lines(trace.str());
    j["exit_code"] = code;
    out << j.dump(2) << '\n';
    return code;
  }

  out << trace.str();
  if (tabled && untabled) {
    out << "tabled: " << outcome_text(*tabled, p) << '\n';
    out << "untabled: " << outcome_text(*untabled, p) << '\n';
  } else if (tabled) {
    out << outcome_text(*tabled, p) << '\n';
  } else {
    out << outcome_text(*untabled, p) << '\n';
  }
  if (config.stats) print_stats(out, tabled ? &*tabled : nullptr, untabled ? &*untabled : nullptr);
  return code;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  if (const char* env = std::getenv("EQLOG_MAX_STEPS")) {
    std::string_view text(env);
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), config.max_steps);
    if (ec != std::errc() || end != text.data() + text.size()) {
      err << "error: EQLOG_MAX_STEPS must be a non-negative integer\n";
      return kExitError;
    }
  }

  CLI::App app{"Equational logic program normalizer with tabling and needs-graph analysis",
               "eqlog"};
  app.require_subcommand(1);

  CLI::App* analyze = app.add_subcommand("analyze", "Needs-graph analysis of a program");
  analyze->add_option("PROG", config.program_path, "Program file")->required();
  analyze->add_option("--term", config.goal, "Goal term for the goal-aware conditions");
  analyze->add_option("--dot", config.dot_path, "Write the needs graph as GraphViz DOT");
  analyze->add_flag("--json", config.json, "Machine-readable output");

  CLI::App* normalize = app.add_subcommand("normalize", "Compute the normal form of a term");
  normalize->add_option("PROG", config.program_path, "Program file")->required();
  normalize->add_option("TERM", config.goal, "Ground goal term")->required();
  const std::map<std::string, Mode> modes{
      {"tabled", Mode::Tabled}, {"untabled", Mode::Untabled}, {"both", Mode::Both}};
  normalize->add_option("--mode", config.mode, "tabled, untabled or both")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  normalize->add_option("--max-steps", config.max_steps, "Step budget");
  bool no_dont_reduce = false, no_never_add = false, no_prune = false;
  normalize->add_flag("--no-dont-reduce", no_dont_reduce, "Disable the don't-reduce skip");
  normalize->add_flag("--no-never-add", no_never_add, "Disable never-add signatures");
  normalize->add_flag("--no-prune", no_prune, "Disable rule pruning");
  normalize->add_flag("--trace", config.trace, "Print changed classes after every step");
  normalize->add_flag("--stats", config.stats, "Print engine counters");
  normalize->add_flag("--json", config.json, "Machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitError;
  }
  config.dont_reduce = !no_dont_reduce;
  config.never_add = !no_never_add;
  config.prune_rules = !no_prune;

  if (analyze->parsed()) return cmd_analyze(config, out, err);
  return cmd_normalize(config, out, err);
}

}  // namespace eqlog::cli
