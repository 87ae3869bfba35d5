#include "eqlog/analysis.hpp"

namespace eqlog::analysis {

NeverAddSets never_add_sets(const Program& program, const Term* goal) {
  NeverAddSets out;
  const SymbolTable& table = program.symbols();

  std::set<SymbolId> rhs_roots;
  std::set<BuiltinOp> ops;
  auto collect_ops = [&](const Term& t) {
    for_each_subterm(t, [&](const Term& sub) {
      if (sub.is_app() && table.is_builtin(sub.symbol())) ops.insert(*table[sub.symbol()].op);
    });
  };

  for (const Rule& r : program.rules()) {
    if (r.collapsing) {
      out.collapsing_rules.push_back(r.id);
      continue;
    }
    if (r.rhs.is_app()) rhs_roots.insert(r.rhs.symbol());
    if (r.rhs.is_literal()) out.rhs_literals.insert(r.rhs.head());
    collect_ops(r.rhs);
  }
  if (goal) collect_ops(*goal);
  out.eligible = out.collapsing_rules.empty();

  for (SymbolId id = 0; id < table.size(); ++id) {
    if (!table.is_user_constructor(id) || rhs_roots.contains(id)) continue;
    out.outermost_safe_constructors.insert(id);
    if (table[id].arity == 0) out.user_constants.insert(id);
  }

  // An operator that produces a type can merge an operator signature into a
  // literal's class just as one consuming it can, so both disqualify.
  for (LiteralType type : {LiteralType::Int, LiteralType::Bool}) {
    bool touched = false;
    for (BuiltinOp op : ops)
      if (builtin_takes(op, type) || builtin_result_type(op) == type) touched = true;
    if (!touched) out.predefined_types.insert(type);
  }
  return out;
}

}  // namespace eqlog::analysis
