#include "eqlog/parser.hpp"

#include <cctype>
#include <charconv>
#include <limits>
#include <optional>
#include <unordered_map>

namespace eqlog {

namespace {

constexpr std::size_t kMaxNesting = 4000;

enum class Tok { Ident, Int, Arrow, LParen, RParen, Comma, Semi, Op, End };

struct Token {
  Tok kind = Tok::End;
  std::string_view text;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return current_; }

  Token next() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_space();
    current_ = Token{};
    current_.line = line_;
    current_.column = col_;
    if (pos_ >= src_.size()) return;
    std::size_t start = pos_;
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
              src_[pos_] == '\''))
        bump();
      current_.kind = Tok::Ident;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
      current_.kind = Tok::Int;
    } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
      bump();
      bump();
      current_.kind = Tok::Arrow;
    } else if (c == '=' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
      bump();
      bump();
      current_.kind = Tok::Op;
    } else {
      bump();
      switch (c) {
        case '(': current_.kind = Tok::LParen; break;
        case ')': current_.kind = Tok::RParen; break;
        case ',': current_.kind = Tok::Comma; break;
        case ';': current_.kind = Tok::Semi; break;
        case '+':
        case '-':
        case '*':
        case '>':
        case '<': current_.kind = Tok::Op; break;
        default:
          throw ProgramError(std::string("unexpected character '") + c + "'", current_.line,
                             current_.column);
      }
    }
    current_.text = src_.substr(start, pos_ - start);
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  Token current_;
};

std::optional<BuiltinOp> op_of(std::string_view s) {
  if (s == "+") return BuiltinOp::Add;
  if (s == "-") return BuiltinOp::Sub;
  if (s == "*") return BuiltinOp::Mul;
  if (s == ">") return BuiltinOp::Gt;
  if (s == "<") return BuiltinOp::Lt;
  if (s == "==") return BuiltinOp::Eq;
  return std::nullopt;
}

bool is_keyword(std::string_view s) { return s == "vars" || s == "true" || s == "false"; }

/// Shared term parser. In program mode unknown symbols are added to the
/// table; in goal mode the table is read-only.
class TermParser {
 public:
  TermParser(Lexer& lex, SymbolTable& symbols, const std::unordered_map<std::string, VarId>& vars,
             bool may_add)
      : lex_(lex), symbols_(symbols), vars_(vars), may_add_(may_add) {}

  Term parse(int min_prec = 1) {
    Term lhs = primary();
    while (lex_.peek().kind == Tok::Op) {
      BuiltinOp op = *op_of(lex_.peek().text);
      int prec = builtin_precedence(op);
      if (prec < min_prec) break;
      lex_.next();
      Term rhs = parse(prec + 1);
      lhs = Term::app(symbols_.builtin(op), {std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  Token expect(Tok kind, std::string_view what) {
    const Token& t = lex_.peek();
    if (t.kind != kind) {
      std::string got = t.kind == Tok::End ? "end of input" : "'" + std::string(t.text) + "'";
      throw ProgramError("expected " + std::string(what) + ", got " + got, t.line, t.column);
    }
    return lex_.next();
  }

 private:
  struct DepthGuard {
    explicit DepthGuard(std::size_t& d, const Token& at) : depth(d) {
      if (++depth > kMaxNesting) throw ProgramError("term nested too deeply", at.line, at.column);
    }
    ~DepthGuard() { --depth; }
    std::size_t& depth;
  };

  Term primary() {
    Token t = lex_.next();
    DepthGuard guard(depth_, t);
    switch (t.kind) {
      case Tok::Int: return Term::integer(parse_int(t, false));
      case Tok::Op:
        if (t.text == "-" && lex_.peek().kind == Tok::Int &&
            lex_.peek().column == t.column + 1 && lex_.peek().line == t.line)
          return Term::integer(parse_int(lex_.next(), true));
        break;
      case Tok::LParen: {
        Term inner = parse();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident: return identifier(t);
      default: break;
    }
    std::string got = t.kind == Tok::End ? "end of input" : "'" + std::string(t.text) + "'";
    throw ProgramError("expected a term, got " + got, t.line, t.column);
  }

  Term identifier(const Token& t) {
    if (t.text == "true") return Term::boolean(true);
    if (t.text == "false") return Term::boolean(false);
    if (t.text == "vars") throw ProgramError("'vars' is reserved", t.line, t.column);
    std::string name(t.text);
    bool call = lex_.peek().kind == Tok::LParen;
    if (auto v = vars_.find(name); v != vars_.end()) {
      if (call)
        throw ProgramError("variable '" + name + "' used as function symbol", t.line, t.column);
      return Term::var(v->second);
    }
    std::vector<Term> args;
    if (call) {
      lex_.next();
      args.push_back(parse());
      while (lex_.peek().kind == Tok::Comma) {
        lex_.next();
        args.push_back(parse());
      }
      expect(Tok::RParen, "',' or ')'");
    }
    SymbolId id = 0;
    if (auto existing = symbols_.find(name)) {
      id = *existing;
      if (symbols_[id].arity != args.size()) {
        throw ProgramError("arity mismatch for '" + name + "': " + std::to_string(args.size()) +
                               " arguments, expected " + std::to_string(symbols_[id].arity),
                           t.line, t.column);
      }
    } else if (may_add_) {
      id = symbols_.add(name, args.size());
    } else {
      throw ProgramError("unknown symbol '" + name + "'", t.line, t.column);
    }
    return Term::app(id, std::move(args));
  }

  std::int64_t parse_int(const Token& t, bool negative) {
    std::uint64_t magnitude = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), magnitude);
    const std::uint64_t limit =
        static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()) + (negative ? 1 : 0);
    if (ec != std::errc{} || magnitude > limit)
      throw ProgramError("integer literal out of 64-bit range", t.line, t.column);
    if (negative) return static_cast<std::int64_t>(0 - magnitude);
    return static_cast<std::int64_t>(magnitude);
  }

  Lexer& lex_;
  SymbolTable& symbols_;
  const std::unordered_map<std::string, VarId>& vars_;
  bool may_add_;
  std::size_t depth_ = 0;
};

void collect_flags(Rule& rule, std::size_t var_count) {
  std::vector<int> count(var_count, 0);
  for_each_subterm(rule.lhs, [&](const Term& t) {
    if (t.is_var()) ++count[t.var_id()];
  });
  rule.left_linear = true;
  for (int c : count)
    if (c > 1) rule.left_linear = false;
  rule.collapsing = rule.rhs.is_var();
}

}  // namespace

Program parse_program(std::string_view text) {
  Lexer lex(text);
  SymbolTable symbols;
  std::vector<std::string> variables;
  std::unordered_map<std::string, VarId> var_ids;
  std::vector<Rule> rules;

  while (lex.peek().kind != Tok::End) {
    const Token start = lex.peek();
    if (start.kind == Tok::Ident && start.text == "vars") {
      lex.next();
      if (lex.peek().kind != Tok::Ident)
        throw ProgramError("expected variable names after 'vars'", start.line, start.column);
      while (lex.peek().kind == Tok::Ident) {
        Token v = lex.next();
        std::string name(v.text);
        if (is_keyword(name))
          throw ProgramError("'" + name + "' cannot be a variable", v.line, v.column);
        if (symbols.find(name))
          throw ProgramError("'" + name + "' is already a function symbol", v.line, v.column);
        if (!var_ids.contains(name)) {
          var_ids.emplace(name, static_cast<VarId>(variables.size()));
          variables.push_back(name);
        }
      }
      TermParser(lex, symbols, var_ids, true).expect(Tok::Semi, "';'");
      continue;
    }

    TermParser parser(lex, symbols, var_ids, true);
    Rule rule;
    rule.id = static_cast<RuleId>(rules.size() + 1);
    rule.lhs = parser.parse();
    parser.expect(Tok::Arrow, "'->'");
    rule.rhs = parser.parse();
    parser.expect(Tok::Semi, "';'");
    collect_flags(rule, variables.size());
    try {
      // Validate each rule as it is read so errors carry its position.
      validate_rule(rule, symbols, variables);
    } catch (const ProgramError& e) {
      throw ProgramError(e.what(), start.line, start.column);
    }
    rules.push_back(std::move(rule));
  }
  return Program(std::move(symbols), std::move(variables), std::move(rules));
}

Term parse_term(std::string_view text, const Program& program, bool require_ground) {
  Lexer lex(text);
  SymbolTable symbols = program.symbols();
  std::unordered_map<std::string, VarId> var_ids;
  for (VarId i = 0; i < program.variables().size(); ++i) var_ids.emplace(program.variables()[i], i);
  TermParser parser(lex, symbols, var_ids, false);
  Term t = parser.parse();
  parser.expect(Tok::End, "end of input");
  if (require_ground && !t.is_ground()) throw ProgramError("goal term must be ground");
  return t;
}

}  // namespace eqlog
