// One PASS/FAIL line per acceptance criterion; nonzero exit if any fails.
#include "corpus.hpp"
#include "random_programs.hpp"
#include "support.hpp"

#include "eqlog/analysis.hpp"
#include "eqlog/rewrite.hpp"
#include "eqlog/tabling.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

using namespace eqlog;
using namespace eqlog::testing;

namespace {

// Tolerances.
constexpr double kTraceSeconds = 1.0;
constexpr double kFibSeconds = 10.0;
constexpr int kFibMax = 20;
constexpr int kRandomPrograms = 1000;
constexpr int kDummyRules = 5;
constexpr std::uint64_t kCorpusBudget = 20000;

struct Check {
  std::string failure;
  void require(bool ok, const std::string& what) {
    if (!ok && failure.empty()) failure = what;
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

bool contains(const std::string& text, const std::string& line) {
  return text.find(line + "\n") != std::string::npos;
}

// Same kind of outcome, and the same term when there is one.
std::string outcome_key(const tabling::Outcome& o, const Program& p) {
  if (auto nf = o.normal_form()) return "nf " + to_string(nf->term, p);
  if (auto n = std::get_if<tabling::NoFiniteNormalForm>(&o.result))
    return n->cyclic ? "nfnf cyclic" : "nfnf stuck";
  return "limit";
}

Check criterion1() {
  Check c;
  auto start = std::chrono::steady_clock::now();
  Program p = prog(kFib);
  std::ostringstream trace;
  tabling::Outcome o = tabling::normalize_tabled(p, goal(p, "fib(2)"), {.trace = &trace});
  const double elapsed = seconds_since(start);
  const std::string t = trace.str();
  c.require(t == read_file(EQLOG_GOLDEN_DIR "/fib2.trace"), "trace differs from golden file");
  for (const char* line : {"0:{2*}", "1:{<fib 0>*}", "1:{<fib 0>, <f 3 0>*}", "3:{true*}",
                           "merged 4 into 2", "1:{<fib 0>, <f 3 0>, <+ 2 6>*}",
                           "# normal form: 2"})
    c.require(contains(t, line), std::string("missing milestone ") + line);
  c.require(o.normal_form() && o.normal_form()->term == Term::integer(2), "normal form is not 2");
  c.require(elapsed < kTraceSeconds, "slower than 1s");
  return c;
}

Check criterion2() {
  Check c;
  Program p = prog(kFib);
  tabling::Engine e(p);
  e.normalize(goal(p, "fib(2)"));
  const tabling::Stats before = e.stats();
  tabling::Outcome o = e.normalize(goal(p, "fib(fib(2))"));
  c.require(o.normal_form() && o.normal_form()->term == Term::integer(2), "fib(fib(2)) is not 2");
  c.require(e.stats().since(before).rule_applications_total() == 0,
            "extra rule applications: " + std::to_string(e.stats().since(before).rule_applications_total()));
  return c;
}

// Distinct fib arguments reached from n, split by which f-rule they take.
struct FibArgs {
  std::uint64_t distinct = 0, recursive = 0, base = 0;
};

FibArgs enumerate_fib_args(int n) {
  std::set<int> seen;
  std::vector<int> todo{n};
  while (!todo.empty()) {
    int k = todo.back();
    todo.pop_back();
    if (!seen.insert(k).second) continue;
    if (k > 1) {
      todo.push_back(k - 1);
      todo.push_back(k - 2);
    }
  }
  FibArgs out;
  for (int k : seen) {
    ++out.distinct;
    (k > 1 ? out.recursive : out.base) += 1;
  }
  return out;
}

Check criterion3() {
  Check c;
  auto start = std::chrono::steady_clock::now();
  Program p = prog(kFib);
  for (int n = 2; n <= kFibMax; ++n) {
    const std::string tag = " at n=" + std::to_string(n);
    Term t = goal(p, "fib(" + std::to_string(n) + ")");
    tabling::Outcome o = tabling::normalize_tabled(p, t);
    FibArgs args = enumerate_fib_args(n);
    c.require(o.normal_form() && o.normal_form()->term == Term::integer(fib_value(n)), "tabled value" + tag);
    c.require(o.stats.applications_of(1) == static_cast<std::uint64_t>(n + 1) &&
                  o.stats.applications_of(1) == args.distinct,
              "tabled rule 1" + tag);
    c.require(o.stats.applications_of(2) == static_cast<std::uint64_t>(n - 1) &&
                  o.stats.applications_of(2) == args.recursive,
              "tabled rule 2" + tag);
    c.require(o.stats.applications_of(3) == 2 && args.base == 2, "tabled rule 3" + tag);

    rewrite::RewriteOutcome u = rewrite::normalize_untabled(p, t);
    c.require(u.normal_form() && u.normal_form()->term == Term::integer(fib_value(n)), "untabled value" + tag);
    c.require(u.applications_of(1) == fib_calls(n), "untabled rule 1" + tag);
    if (n >= 8)
      c.require(static_cast<double>(u.applications_of(1)) > std::pow(2.0, n / 2.0),
                "untabled growth" + tag);
  }
  c.require(seconds_since(start) < kFibSeconds, "slower than 10s");
  return c;
}

Check criterion4() {
  Check c;
  Program p = prog(kLoop);
  Term a = goal(p, "a");
  tabling::Outcome o = tabling::normalize_tabled(p, a);
  c.require(o.no_finite_normal_form(), "tabled loop program did not report no finite normal form");
  c.require(o.stats.rule_applications_total() == 1, "tabled loop program rule applications != 1");
  for (std::uint64_t limit : {10u, 100u, 10000u}) {
    rewrite::RewriteOutcome u = rewrite::normalize_untabled(p, a, limit);
    c.require(u.step_limit() && u.steps_applied == limit,
              "untabled loop program at limit " + std::to_string(limit));
  }
  return c;
}

Check criterion5() {
  Check c;
  Program p = prog(std::string(kFib) + "equal(x, x) -> true;\n");
  tabling::Outcome o = tabling::normalize_tabled(p, goal(p, "equal(fib(4), 5)"));
  c.require(fib_value(4) == 5, "oracle fib(4) != 5");
  c.require(o.normal_form() && to_string(o.normal_form()->term, p) == "true", "not true");
  return c;
}

tabling::EngineOptions options_for(int mask) {
  tabling::EngineOptions o;
  o.dont_reduce = mask & 1;
  o.never_add = mask & 2;
  o.prune_rules = mask & 4;
  return o;
}

Check criterion6() {
  Check c;
  const auto entries = corpus();
  c.require(entries.size() >= 20, "corpus smaller than 20");
  std::uint64_t skipped = 0, suppressed = 0;
  for (const CorpusEntry& entry : entries) {
    Program p = prog(entry.program);
    for (const Goal& g : entry.goals) {
      Term t = goal(p, g.text);
      std::string reference;
      for (int mask = 7; mask >= 0; --mask) {
        tabling::Outcome o = tabling::normalize_tabled(p, t, options_for(mask));
        const std::string key = outcome_key(o, p);
        if (mask == 7) {
          reference = key;
          skipped += o.stats.match_attempts_skipped_dont_reduce;
          suppressed += o.stats.dependency_entries_suppressed_never_add;
        }
        c.require(key == reference, entry.name + " " + g.text + " differs under mask " + std::to_string(mask));
      }
    }
  }
  c.require(skipped > 0, "no don't-reduce skips");
  c.require(suppressed > 0, "no never-add suppressions");

  // Specific programs: a constructor-heavy goal and a never-add eligible one.
  auto by_name = [&](const std::string& name) -> const CorpusEntry& {
    for (const CorpusEntry& e : entries)
      if (e.name == name) return e;
    throw std::logic_error("no corpus entry " + name);
  };
  const CorpusEntry& boxes_entry = by_name("boxes");
  Program boxes = prog(boxes_entry.program);
  auto b = tabling::normalize_tabled(boxes, goal(boxes, boxes_entry.goals[0].text));
  c.require(b.stats.match_attempts_skipped_dont_reduce > 0, "boxes: no don't-reduce skips");
  const CorpusEntry& len_entry = by_name("list_length");
  Program len = prog(len_entry.program);
  auto l = tabling::normalize_tabled(len, goal(len, len_entry.goals[0].text));
  c.require(l.stats.dependency_entries_suppressed_never_add > 0, "list_length: no suppression");
  return c;
}

Check criterion7() {
  Check c;
  int compared = 0;
  for (const CorpusEntry& entry : corpus()) {
    Program p = prog(entry.program);
    for (const Goal& g : entry.goals) {
      Term t = goal(p, g.text);
      tabling::Outcome o = tabling::normalize_tabled(p, t, {.max_steps = kCorpusBudget});
      rewrite::RewriteOutcome u = rewrite::normalize_untabled(p, t, kCorpusBudget);
      if (!o.normal_form() || !u.normal_form()) continue;
      ++compared;
      c.require(o.normal_form()->term == u.normal_form()->term, entry.name + " " + g.text + " disagrees");
    }
  }
  c.require(compared >= 20, "fewer than 20 goals compared");
  return c;
}

Check criterion8() {
  Check c;
  std::uint64_t samples = 0, violations = 0;
  auto observe = [&](const tabling::Engine& e) {
    ++samples;
    const auto dont_add = e.classify_dont_add_snapshot();
    for (tabling::ClassId cls : e.live_classes()) {
      const bool never_add = e.holds_only_never_add(cls);
      const bool add = dont_add.at(cls);
      const bool reduce = e.is_dont_reduce(cls);
      if ((never_add && !add) || (add && !reduce)) ++violations;
    }
    if (!e.audit().empty()) ++violations;
  };
  for (const CorpusEntry& entry : corpus()) {
    Program p = prog(entry.program);
    for (int mask = 0; mask < 8; ++mask) {
      tabling::EngineOptions opts = options_for(mask);
      opts.max_steps = 5000;
      opts.observer = observe;
      tabling::Engine e(p, opts);
      for (const Goal& g : entry.goals) e.normalize(goal(p, g.text));
    }
  }
  c.require(samples > 0, "no samples");
  c.require(violations == 0, std::to_string(violations) + " violations in " + std::to_string(samples) + " samples");
  return c;
}

Check criterion9() {
  using namespace analysis;
  Check c;
  Program fib = prog(kFib);
  AnalysisReport f = analyze(fib, goal(fib, "fib(2)"));
  c.require(f.prop1_cycle_exists && f.prop2_cycle_reachable_from_term.value_or(false) &&
                f.prop3_efficiency_node_exists,
            "fib program props 1-3");
  Program stream = prog(kStream);
  AnalysisReport s = analyze(stream, std::nullopt);
  c.require(!s.never_add.eligible && s.never_add.collapsing_rules == std::vector<RuleId>{2, 3} &&
                s.recommendation.find("collapsing") != std::string::npos,
            "stream program never-add diagnostic");
  Program acyclic = prog("vars x; g(x) -> h(x, 1); h(x, 0) -> x;");
  c.require(!analyze(acyclic, std::nullopt).prop1_cycle_exists, "acyclic prop1");

  RandomPrograms gen(1000);
  for (int i = 0; i < kRandomPrograms; ++i) {
    auto [p, t] = gen.next();
    NeedsGraph g = build_needs_graph(p);
    BruteForceGraph bf(p);
    const bool p1 = prop1_has_cycle(g), p2 = prop2_termination_condition(g, t);
    const bool p3 = prop3_efficiency_condition(g), p4 = prop4_efficiency_condition_term(g, t);
    c.require(!p2 || p1, "prop2 without prop1 in " + to_string(p));
    c.require(!p4 || p3, "prop4 without prop3 in " + to_string(p));
    c.require(p1 == bf.has_cycle() && p2 == bf.prop2(t) && p3 == bf.prop3() && p4 == bf.prop4(t),
              "disagrees with brute force on " + to_string(p));
  }
  return c;
}

Check criterion10() {
  Check c;
  std::string dummies;
  for (int i = 0; i < kDummyRules; ++i)
    dummies += "zzdead" + std::to_string(i) + " -> zzdead" + std::to_string((i + 1) % kDummyRules) + ";\n";
  for (const CorpusEntry& entry : corpus()) {
    Program plain = prog(entry.program);
    Program p = prog(entry.program + dummies);
    std::set<RuleId> all, dummy_ids;
    for (const Rule& r : p.rules()) {
      all.insert(r.id);
      if (r.id > plain.rules().size()) dummy_ids.insert(r.id);
    }
    for (const Goal& g : entry.goals) {
      const std::string tag = entry.name + " " + g.text;
      Term t = goal(p, g.text);
      const std::set<RuleId> reachable = reachable_rules_by_fixpoint(p, t);
      std::set<RuleId> unreachable;
      for (RuleId r : all)
        if (!reachable.contains(r)) unreachable.insert(r);
      for (RuleId r : dummy_ids) c.require(unreachable.contains(r), tag + ": dummy rule reachable");

      analysis::NeedsGraph graph = analysis::build_needs_graph(p);
      auto pruned = analysis::prunable_rules(p, analysis::reachable_defined_symbols(p, graph, t));
      c.require(pruned == unreachable, tag + ": prunable rules differ from the fixpoint");

      tabling::Engine e(p);
      tabling::Outcome with = e.normalize(t);
      auto active = e.active_rules();
      c.require(std::set<RuleId>(active.begin(), active.end()) == reachable, tag + ": active rules");
      tabling::Outcome without = tabling::normalize_tabled(plain, goal(plain, g.text), {.prune_rules = false});
      c.require(outcome_key(with, p) == outcome_key(without, plain), tag + ": outcome changed");
    }
  }
  return c;
}

}  // namespace

int main() {
  const std::vector<std::function<Check()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                     criterion5, criterion6, criterion7, criterion8,
                                                     criterion9, criterion10};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      c = criteria[i]();
    } catch (const std::exception& e) {
      c.failure = std::string("exception: ") + e.what();
    }
    if (c.failure.empty()) {
      std::cout << "PASS criterion " << i + 1 << '\n';
    } else {
      ++failed;
      std::cout << "FAIL criterion " << i + 1 << ": " << c.failure << '\n';
    }
  }
  return failed == 0 ? 0 : 1;
}
