#pragma once

#include "eqlog/parser.hpp"
#include "eqlog/program.hpp"

#include <cstdint>
#include <set>
#include <string>

namespace eqlog::testing {

inline Program prog(const std::string& text) { return parse_program(text); }

inline Term goal(const Program& p, const std::string& text) { return parse_term(text, p); }

/// Rules reachable from a goal, by plain fixpoint over symbol occurrences.
/// Kept deliberately naive: it shares no code with the needs graph.
inline std::set<RuleId> reachable_rules_by_fixpoint(const Program& p, const Term& g) {
  std::set<SymbolId> seen;
  auto collect = [&](const Term& t, std::set<SymbolId>& into) {
    std::vector<Term> stack{t};
    while (!stack.empty()) {
      Term u = stack.back();
      stack.pop_back();
      if (u.is_app()) into.insert(u.symbol());
      for (const Term& a : u.args()) stack.push_back(a);
    }
  };
  collect(g, seen);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Rule& r : p.rules()) {
      if (!seen.contains(r.root())) continue;
      std::set<SymbolId> more;
      collect(r.rhs, more);
      for (SymbolId s : more) changed |= seen.insert(s).second;
    }
  }
  std::set<RuleId> out;
  for (const Rule& r : p.rules())
    if (seen.contains(r.root())) out.insert(r.id);
  return out;
}

/// fib with fib(0) = fib(1) = 1, computed directly.
inline std::int64_t fib_value(int n) {
  std::int64_t a = 1, b = 1;
  for (int i = 1; i < n; ++i) {
    std::int64_t c = a + b;
    a = b;
    b = c;
  }
  return b;
}

/// Number of fib calls in the untabled recursion tree of fib(n).
inline std::uint64_t fib_calls(int n) {
  if (n <= 1) return 1;
  return 1 + fib_calls(n - 1) + fib_calls(n - 2);
}

}  // namespace eqlog::testing
