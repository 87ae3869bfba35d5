#include "corpus.hpp"
#include "support.hpp"

#include "eqlog/tabling.hpp"

#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

using namespace eqlog;
using namespace eqlog::tabling;
using namespace eqlog::testing;

namespace {

Atom symbol(const Program& p, std::string_view name) {
  return Atom::of_symbol(*p.symbols().find(name));
}

}  // namespace

TEST_CASE("interning fib(2) gives the initial configuration") {
  Program p = prog(kFib);
  Engine e(p);
  ClassId c = e.intern(goal(p, "fib(2)"));
  CHECK(c == 1);
  CHECK(e.format_class(0) == "0:{2*}");
  CHECK(e.format_class(1) == "1:{<fib 0>*}");
  const auto created = e.stats().signatures_created;
  CHECK(e.intern(goal(p, "fib(2)")) == 1);
  CHECK(e.stats().signatures_created == created);
  CHECK(e.audit().empty());
}

TEST_CASE("matching and applying rule 1") {
  Program p = prog(kFib);
  Engine e(p);
  ClassId c = e.intern(goal(p, "fib(2)"));
  auto b = e.match(c, p.rule(1));
  REQUIRE(b);
  CHECK((*b)[0] == ClassId{0});
  CHECK_FALSE(e.match(c, p.rule(2)));
  e.apply(c, p.rule(1), *b);
  CHECK(e.format_class(1) == "1:{<fib 0>, <f 3 0>*}");
  CHECK(e.format_class(2) == "2:{1*}");
  CHECK(e.format_class(3) == "3:{true*}");
  CHECK(e.stats().applications_of(1) == 1);
  CHECK(e.stats().builtin_evals == 1);

  auto b2 = e.match(c, p.rule(2));
  REQUIRE(b2);
  e.apply(c, p.rule(2), *b2);
  CHECK(e.format_class(1) == "1:{<fib 0>, <f 3 0>, <+ 4 6>*}");
  CHECK(e.format_class(4) == "4:{<fib 2>*}");
  CHECK(e.format_class(5) == "5:{0*}");
  CHECK(e.format_class(6) == "6:{<fib 5>*}");
  CHECK(e.audit().empty());
}

TEST_CASE("a repeated lhs variable needs one class") {
  Program p = prog("vars x; letters -> s(a, b); equal(x, x) -> true;");
  const Rule& eq = p.rule(2);
  Engine e(p, {.never_add = false});
  ClassId same = e.intern(goal(p, "equal(a, a)"));
  ClassId diff = e.intern(goal(p, "equal(a, b)"));
  auto b = e.match(same, eq);
  REQUIRE(b);
  CHECK((*b)[0] == e.intern(goal(p, "a")));
  CHECK_FALSE(e.match(diff, eq));
  e.merge(e.intern(goal(p, "a")), e.intern(goal(p, "b")));
  CHECK(e.match(diff, eq));
  // Congruence made the two goals one class.
  CHECK(e.find(same) == e.find(diff));
  CHECK(e.audit().empty());
}

TEST_CASE("constructor constants match no rule") {
  Program p = prog("vars x; g(x) -> nil;");
  Engine e(p);
  ClassId c = e.intern(goal(p, "nil"));
  CHECK_FALSE(e.match(c, p.rule(1)));
}

TEST_CASE("applying a collapsing rule merges with the bound class") {
  Program p = prog("vars x; letters -> s(a); id(x) -> x;");
  Engine e(p);
  ClassId c = e.intern(goal(p, "id(a)"));
  ClassId a = e.intern(goal(p, "a"));
  e.apply(c, p.rule(2), *e.match(c, p.rule(2)));
  CHECK(e.find(c) == e.find(a));
  CHECK(e.format_class(e.find(a)) == "0:{<id 0>, a*}");
  CHECK(e.audit().empty());
}

TEST_CASE("merging renumbers dependent signatures") {
  Program p = prog("vars x; letters -> s(a, b, f(a, a));");
  Engine e(p, {.never_add = false});
  ClassId fab = e.intern(goal(p, "f(a, b)"));
  ClassId a = e.intern(goal(p, "a"));
  ClassId b = e.intern(goal(p, "b"));
  CHECK(e.merge(a, a) == a);
  CHECK(e.stats().merges == 0);
  e.merge(b, a);
  CHECK(e.find(b) == std::min(a, b));
  CHECK(e.format_class(fab) == "2:{<f 0 0>*}");
  CHECK(e.lookup(symbol(p, "f"), std::vector<ClassId>{a, a}) == fab);
  CHECK(e.audit().empty());
}

TEST_CASE("congruence propagation matches a brute-force closure") {
  // Ground terms over a, b, c, d, unary u and binary k.
  Program p = prog("letters -> s(a, b, c, d, u(a), k(a, a));");
  const SymbolId u = *p.symbols().find("u"), k = *p.symbols().find("k");
  std::mt19937 rng(99);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };

  for (int round = 0; round < 200; ++round) {
    std::vector<Term> terms;
    for (const char* c : {"a", "b", "c", "d"}) terms.push_back(goal(p, c));
    for (int i = 0; i < 12; ++i) {
      if (pick(2)) terms.push_back(Term::app(u, {terms[pick(terms.size())]}));
      else terms.push_back(Term::app(k, {terms[pick(terms.size())], terms[pick(terms.size())]}));
    }
    Engine e(p, {.never_add = false});
    std::vector<ClassId> ids;
    for (const Term& t : terms) ids.push_back(e.intern(t));

    // Oracle: union-find over term indices, closed under congruence by
    // repeated pairwise scanning.
    std::vector<std::size_t> parent(terms.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    auto root = [&](std::size_t i) {
      while (parent[i] != i) i = parent[i];
      return i;
    };
    auto index_of = [&](const Term& t) {
      for (std::size_t i = 0; i < terms.size(); ++i)
        if (terms[i] == t) return i;
      return terms.size();
    };

    const int merges = 1 + static_cast<int>(pick(3));
    for (int m = 0; m < merges; ++m) {
      std::size_t i = pick(terms.size()), j = pick(terms.size());
      e.merge(ids[i], ids[j]);
      parent[root(i)] = root(j);
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = 0; i < terms.size(); ++i) {
        for (std::size_t j = i + 1; j < terms.size(); ++j) {
          const Term &s = terms[i], &t = terms[j];
          if (root(i) == root(j) || !s.is_app() || s.head() != t.head() || s.args().empty())
            continue;
          bool congruent = true;
          for (std::size_t a = 0; a < s.args().size(); ++a)
            congruent = congruent && root(index_of(s.arg(a))) == root(index_of(t.arg(a)));
          if (congruent) {
            parent[root(i)] = root(j);
            changed = true;
          }
        }
      }
    }
    for (std::size_t i = 0; i < terms.size(); ++i)
      for (std::size_t j = 0; j < terms.size(); ++j)
        CHECK((e.find(ids[i]) == e.find(ids[j])) == (root(i) == root(j)));
    CHECK(e.audit().empty());
  }
}

TEST_CASE("built-in evaluation") {
  Program p = prog("letters -> s(a, b);");
  Engine e(p, {.never_add = false});
  Term sum = goal(p, "a + 1");
  ClassId c = e.intern(sum);
  CHECK_FALSE(e.evaluate_builtin(c));
  CHECK_FALSE(e.is_dont_reduce(c));
  e.merge(e.intern(goal(p, "a")), e.intern(goal(p, "2")));
  CHECK_FALSE(e.is_dont_reduce(c));  // built-in operators are not constructors here
  CHECK(e.evaluate_builtin(c));
  CHECK(e.find(c) == e.intern(goal(p, "3")));
  CHECK(e.stats().builtin_evals == 1);

  // 1 + 1 meets 2 in an existing class.
  Engine f(p);
  ClassId two = f.intern(goal(p, "2"));
  CHECK(f.intern(goal(p, "1 + 1")) == two);
  CHECK(f.stats().builtin_evals == 1);

  // Operands of the wrong type leave the application alone.
  Engine g(p);
  ClassId stuck = g.intern(goal(p, "true + 1"));
  CHECK_FALSE(g.evaluate_builtin(stuck));
}

TEST_CASE("don't-reduce classes") {
  Program p = prog("letters -> s(a, cons(1, nil)); vars x; g(x) -> x;");
  Engine e(p);
  CHECK(e.is_dont_reduce(e.intern(goal(p, "nil"))));
  CHECK(e.is_dont_reduce(e.intern(goal(p, "cons(1, nil)"))));
  CHECK_FALSE(e.is_dont_reduce(e.intern(goal(p, "cons(g(1), nil)"))));
  CHECK_FALSE(e.is_dont_reduce(e.intern(goal(p, "g(1)"))));
}

TEST_CASE("never-add classification") {
  Program fib = prog(kFib);
  Engine f(fib);
  f.normalize(goal(fib, "fib(2)"));
  CHECK_FALSE(f.is_never_add(Atom::of_int(5), {}));

  Program stream = prog(kStream);
  Engine s(stream);
  s.normalize(goal(stream, "from(1, 1)"));
  CHECK_FALSE(s.is_never_add(symbol(stream, "nil"), {}));

  Program cons = prog("vars x; g(x) -> cons(x, nil);");
  Engine c(cons);
  c.normalize(goal(cons, "g(nil)"));
  CHECK(c.is_never_add(symbol(cons, "nil"), {}));
  ClassId nil = *c.lookup(symbol(cons, "nil"), {});
  CHECK_FALSE(c.is_never_add(symbol(cons, "cons"), std::vector<ClassId>{nil, nil}));
  CHECK(c.audit().empty());
}

TEST_CASE("never-add signatures stay off dependency lists") {
  Program p = prog("vars x l; letters -> s(a, b); len(nil) -> 0; len(cons(x, l)) -> len(l) + 1;");
  Engine on(p);
  Engine off(p, {.never_add = false});
  Term t = goal(p, "len(cons(a, cons(b, nil)))");
  Outcome a = on.normalize(t);
  Outcome b = off.normalize(t);
  CHECK(a.normal_form()->term == Term::integer(2));
  CHECK(b.normal_form()->term == Term::integer(2));
  CHECK(a.stats.dependency_entries_suppressed_never_add > 0);
  CHECK(b.stats.dependency_entries_suppressed_never_add == 0);
  CHECK(a.stats.dependency_entries_added < b.stats.dependency_entries_added);
  ClassId list = *on.lookup(symbol(p, "b"), {});
  CHECK(on.holds_only_never_add(list));
  CHECK(on.dependents(list).empty());
  CHECK(on.audit().empty());
}

TEST_CASE("don't-add snapshot") {
  Program p = prog(kStream);
  Engine e(p);
  e.normalize(goal(p, "from(1, 1)"));
  auto snapshot = e.classify_dont_add_snapshot();
  // The root class holds cons(...) and the reduced from(...) it came from.
  ClassId root = *e.root();
  CHECK_FALSE(snapshot.at(root));
  // nil is not inert here: from(2, 0) rewrote into its class.
  CHECK_FALSE(snapshot.at(*e.lookup(symbol(p, "nil"), {})));
  CHECK(snapshot.at(*e.lookup(Atom::of_int(1), {})));
}

TEST_CASE("normalize the fib program") {
  Program p = prog(kFib);
  Engine e(p);
  Outcome o = e.normalize(goal(p, "fib(2)"));
  REQUIRE(o.normal_form());
  CHECK(o.normal_form()->term == Term::integer(2));
  CHECK(e.format_class(*e.root()) == "0:{<fib 0>, <f 3 0>, <+ 2 2>, 2*}");
  CHECK(o.stats.rule_applications == std::map<RuleId, std::uint64_t>{{1, 3}, {2, 1}, {3, 2}});
  CHECK(o.stats.builtin_evals == 6);
  CHECK(o.stats.merges == 3);

  Outcome again = e.normalize(goal(p, "fib(fib(2))"));
  REQUIRE(again.normal_form());
  CHECK(again.normal_form()->term == Term::integer(2));
  CHECK(again.stats.rule_applications_total() == 0);
  CHECK(e.audit().empty());
}

TEST_CASE("the loop program has no finite normal form after one rewrite") {
  Program p = prog(kLoop);
  Outcome o = normalize_tabled(p, goal(p, "a"));
  REQUIRE(o.no_finite_normal_form());
  CHECK(std::get<NoFiniteNormalForm>(o.result).cyclic);
  CHECK(o.stats.rule_applications_total() == 1);
}

TEST_CASE("a class rewritten back into itself has no unreduced signature") {
  Program p = prog("a -> b; b -> a;");
  Engine e(p);
  Outcome o = e.normalize(goal(p, "a"));
  REQUIRE(o.no_finite_normal_form());
  CHECK_FALSE(std::get<NoFiniteNormalForm>(o.result).cyclic);
  CHECK(o.stats.rule_applications_total() == 2);
  CHECK(e.audit().empty());
}

TEST_CASE("step limit") {
  Program p = prog("vars x; letters -> z; g(x) -> g(s(x));");
  Outcome o = normalize_tabled(p, goal(p, "g(z)"), {.max_steps = 50});
  REQUIRE(o.step_limit());
  CHECK(o.stats.rule_applications_total() == 50);
  const auto& partial = std::get<StepLimitReached>(o.result).partial;
  REQUIRE(partial);
  CHECK(partial->depth() == 52);

  Program fib = prog(kFib);
  // A budget exactly equal to the work needed is enough.
  CHECK(normalize_tabled(fib, goal(fib, "fib(2)"), {.max_steps = 7}).normal_form());
  CHECK(normalize_tabled(fib, goal(fib, "fib(2)"), {.max_steps = 6}).step_limit());
}

TEST_CASE("arithmetic overflow surfaces as an exception") {
  Program p = prog(corpus()[5].program);  // factorial
  CHECK_THROWS_AS(normalize_tabled(p, goal(p, "fact(30)")), ArithmeticOverflow);
  CHECK(normalize_tabled(p, goal(p, "fact(20)")).normal_form()->term ==
        Term::integer(2432902008176640000));
}

TEST_CASE("extracting a literal class") {
  Program p = prog(kFib);
  Engine e(p);
  ClassId c = e.intern(goal(p, "7"));
  Extraction x = e.extract_term(c);
  REQUIRE(x.term);
  CHECK(*x.term == Term::integer(7));
}

TEST_CASE("trace reproduces the golden file") {
  std::ifstream in(EQLOG_GOLDEN_DIR "/fib2.trace");
  REQUIRE(in);
  std::stringstream golden;
  golden << in.rdbuf();
  Program p = prog(kFib);
  std::ostringstream trace;
  normalize_tabled(p, goal(p, "fib(2)"), {.trace = &trace});
  CHECK(trace.str() == golden.str());
}

TEST_CASE("a later goal that uses operators over inert literals demotes them") {
  Program p = prog("vars x; letters -> s(pair(a, a)); wrap(x) -> box(x);");
  Engine e(p);
  Outcome first = e.normalize(goal(p, "wrap(pair(1, 2))"));
  REQUIRE(first.normal_form());
  CHECK(first.stats.dependency_entries_suppressed_never_add > 0);
  CHECK(e.never_add_sets().predefined_types.contains(LiteralType::Int));
  Outcome second = e.normalize(goal(p, "wrap(pair(0 + 1, 2))"));
  REQUIRE(second.normal_form());
  CHECK(to_string(second.normal_form()->term, p) == "box(pair(1, 2))");
  CHECK(second.stats.rule_applications_total() == 0);
  CHECK_FALSE(e.never_add_sets().predefined_types.contains(LiteralType::Int));
  CHECK(e.audit().empty());
}

TEST_CASE("invariants hold at every quiescent point of every corpus run") {
  for (const auto& entry : corpus()) {
    Program p = prog(entry.program);
    for (const auto& g : entry.goals) {
      for (int mask = 0; mask < 8; ++mask) {
        CAPTURE(entry.name);
        CAPTURE(g.text);
        CAPTURE(mask);
        EngineOptions opts;
        opts.dont_reduce = mask & 1;
        opts.never_add = mask & 2;
        opts.prune_rules = mask & 4;
        opts.max_steps = 5000;
        std::size_t violations = 0;
        Stats last;
        bool monotone = true;
        opts.observer = [&](const Engine& e) {
          violations += e.audit().size();
          const Stats& s = e.stats();
          monotone = monotone && s.builtin_evals >= last.builtin_evals &&
                     s.merges >= last.merges && s.signatures_created >= last.signatures_created &&
                     s.match_attempts >= last.match_attempts &&
                     s.rule_applications_total() >= last.rule_applications_total();
          last = s;
        };
        normalize_tabled(p, goal(p, g.text), opts);
        CHECK(violations == 0);
        CHECK(monotone);
      }
    }
  }
}
