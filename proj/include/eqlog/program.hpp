#pragma once

#include "eqlog/term.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace eqlog {

using RuleId = std::uint32_t;

enum class SymbolKind : std::uint8_t { Defined, Constructor, BuiltinOp };

enum class BuiltinOp : std::uint8_t { Add, Sub, Mul, Gt, Lt, Eq };

std::string_view builtin_spelling(BuiltinOp op);

/// Binding strength for infix printing/parsing: `*` over `+ -` over comparisons.
int builtin_precedence(BuiltinOp op);

/// True when `op` accepts operands of type `type` (`==` accepts both).
bool builtin_takes(BuiltinOp op, LiteralType type);
LiteralType builtin_result_type(BuiltinOp op);

/// Raised on 64-bit signed overflow in built-in arithmetic. Integers are
/// int64; any result outside that range is an error, never a wrap-around.
class ArithmeticOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Evaluate a built-in over two literal operands. Returns nothing when the
/// operand types do not fit the operator (the application is then stuck).
std::optional<Atom> evaluate_builtin_op(BuiltinOp op, const Atom& lhs, const Atom& rhs);

struct Symbol {
  std::string name;
  std::size_t arity = 0;
  SymbolKind kind = SymbolKind::Constructor;
  std::optional<BuiltinOp> op;
};

/// Symbols of a program. The six built-in operators are always present at
/// ids 0..5 in `BuiltinOp` order.
class SymbolTable {
 public:
  SymbolTable();

  std::optional<SymbolId> find(std::string_view name) const;
  SymbolId add(std::string name, std::size_t arity);
  SymbolId builtin(BuiltinOp op) const { return static_cast<SymbolId>(op); }

  const Symbol& operator[](SymbolId id) const { return symbols_.at(id); }
  Symbol& at(SymbolId id) { return symbols_.at(id); }
  std::size_t size() const { return symbols_.size(); }

  bool is_builtin(SymbolId id) const { return symbols_.at(id).op.has_value(); }
  bool is_defined(SymbolId id) const { return symbols_.at(id).kind == SymbolKind::Defined; }

  /// Constructor in the sense used by the signature-class optimizations:
  /// user constructors and literals, but not built-in operators.
  bool is_user_constructor(SymbolId id) const {
    return symbols_.at(id).kind == SymbolKind::Constructor;
  }

 private:
  std::vector<Symbol> symbols_;
  std::unordered_map<std::string, SymbolId> by_name_;
};

struct Rule {
  RuleId id = 0;
  Term lhs;
  Term rhs;
  bool left_linear = true;
  bool collapsing = false;

  SymbolId root() const { return lhs.symbol(); }
};

class ProgramError : public std::runtime_error {
 public:
  ProgramError(const std::string& what, std::size_t line = 0, std::size_t column = 0);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class Program {
 public:
  Program() = default;
  Program(SymbolTable symbols, std::vector<std::string> variables, std::vector<Rule> rules);

  const SymbolTable& symbols() const { return symbols_; }
  const std::vector<std::string>& variables() const { return variables_; }
  const std::vector<Rule>& rules() const { return rules_; }
  const Rule& rule(RuleId id) const;

  std::string_view symbol_name(SymbolId id) const { return symbols_[id].name; }
  std::string_view variable_name(VarId id) const { return variables_.at(id); }

  /// A copy keeping only rules whose lhs root is in `roots`; rule ids and the
  /// symbol table (including kinds) are preserved.
  Program restricted_to(const std::set<SymbolId>& roots) const;

 private:
  void validate_and_classify();

  SymbolTable symbols_;
  std::vector<std::string> variables_;
  std::vector<Rule> rules_;
};

/// Checks one rule against a symbol table: arities, lhs root, variable
/// containment and the left_linear/collapsing flags. Throws ProgramError.
void validate_rule(const Rule& rule, const SymbolTable& symbols,
                   const std::vector<std::string>& variables);

struct SymbolClass {
  bool defined = false;
  /// Built-in operators count as constructors for needs-graph analysis.
  bool constructor_for_analysis = false;
  /// ...but not for don't-reduce/don't-add/never-add classification.
  bool constructor_for_signatures = false;
};

/// Defined iff the symbol roots some lhs. Literals are constructors under
/// both readings and do not appear in the map.
std::map<SymbolId, SymbolClass> classify_symbols(const Program& program);

std::string to_string(const Term& term, const Program& program);
std::string to_string(const Rule& rule, const Program& program);
/// Pretty-prints a whole program in the file grammar; re-parsing the output
/// yields a structurally identical program.
std::string to_string(const Program& program);
std::string to_string(const Atom& atom, const Program& program);

}  // namespace eqlog
