#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace eqlog {

using SymbolId = std::uint32_t;
using VarId = std::uint32_t;

enum class LiteralType : std::uint8_t { Int, Bool };

/// A symbol-or-literal: the head of a signature and the vertex identity in
/// the needs graph. Literals with equal values are the same atom.
struct Atom {
  enum class Kind : std::uint8_t { Symbol, Int, Bool };

  Kind kind = Kind::Symbol;
  SymbolId symbol = 0;
  std::int64_t value = 0;

  static Atom of_symbol(SymbolId id) { return {Kind::Symbol, id, 0}; }
  static Atom of_int(std::int64_t v) { return {Kind::Int, 0, v}; }
  static Atom of_bool(bool b) { return {Kind::Bool, 0, b ? 1 : 0}; }

  bool is_literal() const { return kind != Kind::Symbol; }
  LiteralType literal_type() const {
    return kind == Kind::Bool ? LiteralType::Bool : LiteralType::Int;
  }

  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

struct AtomHash {
  std::size_t operator()(const Atom& a) const noexcept {
    std::size_t h = std::hash<std::int64_t>{}(a.value);
    h ^= (static_cast<std::size_t>(a.symbol) << 8) + static_cast<std::size_t>(a.kind) +
         0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

/// Immutable first-order term with structural sharing. Copies are cheap;
/// destruction of arbitrarily deep terms does not recurse.
class Term {
 public:
  enum class Kind : std::uint8_t { App, Var, Int, Bool };

  Term();  // the integer literal 0

  static Term app(SymbolId symbol, std::vector<Term> args = {});
  static Term var(VarId id);
  static Term integer(std::int64_t value);
  static Term boolean(bool value);
  static Term literal(const Atom& atom);

  Kind kind() const;
  bool is_app() const { return kind() == Kind::App; }
  bool is_var() const { return kind() == Kind::Var; }
  bool is_literal() const { return kind() == Kind::Int || kind() == Kind::Bool; }

  SymbolId symbol() const;
  VarId var_id() const;
  std::int64_t int_value() const;
  bool bool_value() const;
  std::span<const Term> args() const;
  const Term& arg(std::size_t i) const { return args()[i]; }

  /// Head atom for applications and literals; undefined for variables.
  Atom head() const;

  bool is_ground() const;
  std::size_t size() const;
  std::size_t depth() const;

  /// Replace the argument at `index`, sharing every other child.
  Term with_arg(std::size_t index, Term replacement) const;

  bool same_node(const Term& other) const { return node_ == other.node_; }

  friend bool operator==(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  std::shared_ptr<Node> node_;
};

/// Visit every subterm in pre-order (parent before children, left to right).
/// Iterative, so usable on very deep terms.
void for_each_subterm(const Term& term, const std::function<void(const Term&)>& visit);

}  // namespace eqlog
