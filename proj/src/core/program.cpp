#include "eqlog/program.hpp"

#include <algorithm>
#include <limits>
#include <variant>

namespace eqlog {

namespace {

constexpr BuiltinOp kAllOps[] = {BuiltinOp::Add, BuiltinOp::Sub, BuiltinOp::Mul,
                                 BuiltinOp::Gt,  BuiltinOp::Lt,  BuiltinOp::Eq};

std::string position_suffix(std::size_t line, std::size_t column) {
  if (line == 0) return {};
  return " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")";
}

}  // namespace

std::string_view builtin_spelling(BuiltinOp op) {
  switch (op) {
    case BuiltinOp::Add: return "+";
    case BuiltinOp::Sub: return "-";
    case BuiltinOp::Mul: return "*";
    case BuiltinOp::Gt: return ">";
    case BuiltinOp::Lt: return "<";
    case BuiltinOp::Eq: return "==";
  }
  return "?";
}

int builtin_precedence(BuiltinOp op) {
  switch (op) {
    case BuiltinOp::Mul: return 3;
    case BuiltinOp::Add:
    case BuiltinOp::Sub: return 2;
    default: return 1;
  }
}

bool builtin_takes(BuiltinOp op, LiteralType type) {
  if (op == BuiltinOp::Eq) return true;
  return type == LiteralType::Int;
}

LiteralType builtin_result_type(BuiltinOp op) {
  switch (op) {
    case BuiltinOp::Add:
    case BuiltinOp::Sub:
    case BuiltinOp::Mul: return LiteralType::Int;
    default: return LiteralType::Bool;
  }
}

std::optional<Atom> evaluate_builtin_op(BuiltinOp op, const Atom& lhs, const Atom& rhs) {
  if (!lhs.is_literal() || !rhs.is_literal()) return std::nullopt;
  if (op == BuiltinOp::Eq) {
    if (lhs.kind != rhs.kind) return std::nullopt;
    return Atom::of_bool(lhs.value == rhs.value);
  }
  if (lhs.kind != Atom::Kind::Int || rhs.kind != Atom::Kind::Int) return std::nullopt;
  std::int64_t out = 0;
  bool overflow = false;
  switch (op) {
    case BuiltinOp::Add: overflow = __builtin_add_overflow(lhs.value, rhs.value, &out); break;
    case BuiltinOp::Sub: overflow = __builtin_sub_overflow(lhs.value, rhs.value, &out); break;
    case BuiltinOp::Mul: overflow = __builtin_mul_overflow(lhs.value, rhs.value, &out); break;
    case BuiltinOp::Gt: return Atom::of_bool(lhs.value > rhs.value);
    case BuiltinOp::Lt: return Atom::of_bool(lhs.value < rhs.value);
    case BuiltinOp::Eq: break;
  }
  if (overflow) {
    throw ArithmeticOverflow("integer overflow evaluating " + std::to_string(lhs.value) + " " +
                             std::string(builtin_spelling(op)) + " " + std::to_string(rhs.value));
  }
  return Atom::of_int(out);
}

SymbolTable::SymbolTable() {
  for (BuiltinOp op : kAllOps) {
    SymbolId id = static_cast<SymbolId>(symbols_.size());
    symbols_.push_back(Symbol{std::string(builtin_spelling(op)), 2, SymbolKind::BuiltinOp, op});
    by_name_.emplace(symbols_.back().name, id);
  }
}

std::optional<SymbolId> SymbolTable::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

SymbolId SymbolTable::add(std::string name, std::size_t arity) {
  if (auto existing = find(name)) {
    if (symbols_[*existing].arity != arity) {
      throw ProgramError("arity mismatch for '" + name + "': used with " +
                         std::to_string(arity) + " arguments, previously " +
                         std::to_string(symbols_[*existing].arity));
    }
    return *existing;
  }
  SymbolId id = static_cast<SymbolId>(symbols_.size());
  by_name_.emplace(name, id);
  symbols_.push_back(Symbol{std::move(name), arity, SymbolKind::Constructor, std::nullopt});
  return id;
}

ProgramError::ProgramError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(what + position_suffix(line, column)), line_(line), column_(column) {}

Program::Program(SymbolTable symbols, std::vector<std::string> variables, std::vector<Rule> rules)
    : symbols_(std::move(symbols)), variables_(std::move(variables)), rules_(std::move(rules)) {
  validate_and_classify();
}

const Rule& Program::rule(RuleId id) const {
  for (const Rule& r : rules_)
    if (r.id == id) return r;
  throw std::out_of_range("no rule with id " + std::to_string(id));
}

void validate_rule(const Rule& rule, const SymbolTable& symbols,
                   const std::vector<std::string>& variables) {
  auto check_arities = [&](const Term& t) {
    for_each_subterm(t, [&](const Term& sub) {
      if (sub.is_app() && symbols[sub.symbol()].arity != sub.args().size()) {
        throw ProgramError("rule " + std::to_string(rule.id) + ": arity mismatch for '" +
                           symbols[sub.symbol()].name + "'");
      }
      if (sub.is_var() && sub.var_id() >= variables.size())
        throw ProgramError("rule " + std::to_string(rule.id) + ": unknown variable");
    });
  };
  check_arities(rule.lhs);
  check_arities(rule.rhs);

  if (rule.lhs.is_var())
    throw ProgramError("rule " + std::to_string(rule.id) + ": lhs root is a variable");
  if (rule.lhs.is_literal())
    throw ProgramError("rule " + std::to_string(rule.id) + ": lhs root is a literal");
  if (symbols.is_builtin(rule.lhs.symbol()))
    throw ProgramError("rule " + std::to_string(rule.id) +
                       ": lhs root is a built-in operator");

  std::vector<int> lhs_count(variables.size(), 0);
  for_each_subterm(rule.lhs, [&](const Term& sub) {
    if (sub.is_var()) ++lhs_count[sub.var_id()];
  });
  for_each_subterm(rule.rhs, [&](const Term& sub) {
    if (sub.is_var() && lhs_count[sub.var_id()] == 0) {
      throw ProgramError("rule " + std::to_string(rule.id) + ": rhs variable '" +
                         variables[sub.var_id()] + "' does not occur in lhs");
    }
  });
  bool linear = std::all_of(lhs_count.begin(), lhs_count.end(), [](int c) { return c <= 1; });
  if (linear != rule.left_linear || rule.collapsing != rule.rhs.is_var())
    throw ProgramError("rule " + std::to_string(rule.id) + ": inconsistent rule flags");
}

void Program::validate_and_classify() {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    Symbol& s = symbols_.at(static_cast<SymbolId>(i));
    if (s.kind != SymbolKind::BuiltinOp) s.kind = SymbolKind::Constructor;
  }

  for (const Rule& rule : rules_) {
    validate_rule(rule, symbols_, variables_);
    symbols_.at(rule.lhs.symbol()).kind = SymbolKind::Defined;
  }
}

Program Program::restricted_to(const std::set<SymbolId>& roots) const {
  Program out = *this;
  std::erase_if(out.rules_, [&](const Rule& r) { return !roots.contains(r.root()); });
  return out;
}

std::map<SymbolId, SymbolClass> classify_symbols(const Program& program) {
  std::map<SymbolId, SymbolClass> out;
  std::set<SymbolId> roots;
  for (const Rule& r : program.rules()) roots.insert(r.root());
  const SymbolTable& table = program.symbols();
  for (SymbolId id = 0; id < table.size(); ++id) {
    SymbolClass c;
    c.defined = roots.contains(id);
    c.constructor_for_analysis = !c.defined;
    c.constructor_for_signatures = !c.defined && !table.is_builtin(id);
    out.emplace(id, c);
  }
  return out;
}

std::string to_string(const Atom& atom, const Program& program) {
  switch (atom.kind) {
    case Atom::Kind::Symbol: return std::string(program.symbol_name(atom.symbol));
    case Atom::Kind::Int: return std::to_string(atom.value);
    case Atom::Kind::Bool: return atom.value ? "true" : "false";
  }
  return {};
}

std::string to_string(const Term& term, const Program& program) {
  // Work items are either literal text or a subterm together with the
  // precedence its context demands (0 = no parentheses needed).
  struct Visit {
    const Term* term;
    int min_prec;
  };
  std::vector<std::variant<std::string_view, Visit>> work{Visit{&term, 0}};
  std::string out;
  const SymbolTable& table = program.symbols();
  while (!work.empty()) {
    auto item = std::move(work.back());
    work.pop_back();
    if (auto* text = std::get_if<std::string_view>(&item)) {
      out += *text;
      continue;
    }
    const Visit v = std::get<Visit>(item);
    const Term& t = *v.term;
    switch (t.kind()) {
      case Term::Kind::Var: out += program.variable_name(t.var_id()); break;
      case Term::Kind::Int: {
        std::string digits = std::to_string(t.int_value());
        if (t.int_value() < 0 && v.min_prec > 0) digits = "(" + digits + ")";
        out += digits;
        break;
      }
      case Term::Kind::Bool: out += t.bool_value() ? "true" : "false"; break;
      case Term::Kind::App: {
        const Symbol& sym = table[t.symbol()];
        if (sym.op) {
          int prec = builtin_precedence(*sym.op);
          bool parens = prec < v.min_prec;
          // Pushed in reverse: the stack pops them in source order.
          if (parens) work.emplace_back(std::string_view(")"));
          work.emplace_back(Visit{&t.arg(1), prec + 1});
          work.emplace_back(std::string_view(" "));
          work.emplace_back(builtin_spelling(*sym.op));
          work.emplace_back(std::string_view(" "));
          work.emplace_back(Visit{&t.arg(0), prec});
          if (parens) work.emplace_back(std::string_view("("));
          break;
        }
        out += sym.name;
        if (t.args().empty()) break;
        work.emplace_back(std::string_view(")"));
        for (std::size_t i = t.args().size(); i-- > 0;) {
          work.emplace_back(Visit{&t.arg(i), 0});
          if (i > 0) work.emplace_back(std::string_view(", "));
        }
        out += "(";
        break;
      }
    }
  }
  return out;
}

std::string to_string(const Rule& rule, const Program& program) {
  return to_string(rule.lhs, program) + " -> " + to_string(rule.rhs, program) + ";";
}

std::string to_string(const Program& program) {
  std::string out;
  if (!program.variables().empty()) {
    out += "vars";
    for (const auto& v : program.variables()) out += " " + v;
    out += ";\n";
  }
  for (const Rule& r : program.rules()) out += to_string(r, program) + "\n";
  return out;
}

}  // namespace eqlog
