#include "eqlog/term.hpp"

#include <cassert>
#include <set>
#include <utility>

namespace eqlog {

struct Term::Node {
  Kind kind;
  std::int64_t payload;
  std::vector<Term> args;

  Node(Kind k, std::int64_t p, std::vector<Term> a)
      : kind(k), payload(p), args(std::move(a)) {}

  // Children are detached onto an explicit stack so that dropping the last
  // reference to a chain like f(f(f(...))) does not blow the call stack.
  ~Node() {
    std::vector<std::shared_ptr<Node>> pending;
    for (auto& child : args) pending.push_back(std::move(child.node_));
    while (!pending.empty()) {
      std::shared_ptr<Node> node = std::move(pending.back());
      pending.pop_back();
      if (node && node.use_count() == 1) {
        for (auto& child : node->args) pending.push_back(std::move(child.node_));
        node->args.clear();
      }
    }
  }
};

Term::Term() : Term(integer(0)) {}

Term Term::app(SymbolId symbol, std::vector<Term> args) {
  return Term(std::make_shared<Node>(Kind::App, symbol, std::move(args)));
}

Term Term::var(VarId id) {
  return Term(std::make_shared<Node>(Kind::Var, id, std::vector<Term>{}));
}

Term Term::integer(std::int64_t value) {
  return Term(std::make_shared<Node>(Kind::Int, value, std::vector<Term>{}));
}

Term Term::boolean(bool value) {
  return Term(std::make_shared<Node>(Kind::Bool, value ? 1 : 0, std::vector<Term>{}));
}

Term Term::literal(const Atom& atom) {
  assert(atom.is_literal());
  return atom.kind == Atom::Kind::Int ? integer(atom.value) : boolean(atom.value != 0);
}

Term::Kind Term::kind() const { return node_->kind; }

SymbolId Term::symbol() const {
  assert(is_app());
  return static_cast<SymbolId>(node_->payload);
}

VarId Term::var_id() const {
  assert(is_var());
  return static_cast<VarId>(node_->payload);
}

std::int64_t Term::int_value() const {
  assert(kind() == Kind::Int);
  return node_->payload;
}

bool Term::bool_value() const {
  assert(kind() == Kind::Bool);
  return node_->payload != 0;
}

std::span<const Term> Term::args() const { return node_->args; }

Atom Term::head() const {
  switch (kind()) {
    case Kind::App: return Atom::of_symbol(symbol());
    case Kind::Int: return Atom::of_int(int_value());
    case Kind::Bool: return Atom::of_bool(bool_value());
    case Kind::Var: break;
  }
  assert(false && "variables have no head atom");
  return {};
}

bool Term::is_ground() const {
  bool ground = true;
  for_each_subterm(*this, [&](const Term& t) {
    if (t.is_var()) ground = false;
  });
  return ground;
}

std::size_t Term::size() const {
  std::size_t n = 0;
  for_each_subterm(*this, [&](const Term&) { ++n; });
  return n;
}

std::size_t Term::depth() const {
  std::size_t best = 0;
  std::vector<std::pair<const Term*, std::size_t>> stack{{this, 1}};
  while (!stack.empty()) {
    auto [t, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    for (const Term& a : t->args()) stack.emplace_back(&a, d + 1);
  }
  return best;
}

Term Term::with_arg(std::size_t index, Term replacement) const {
  assert(is_app() && index < node_->args.size());
  std::vector<Term> args = node_->args;
  args[index] = std::move(replacement);
  return app(symbol(), std::move(args));
}

bool operator==(const Term& a, const Term& b) {
  std::vector<std::pair<const Term*, const Term*>> stack{{&a, &b}};
  std::set<std::pair<const Term::Node*, const Term::Node*>> seen;
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    if (x->node_ == y->node_) continue;
    // Shared subterms would otherwise be compared once per path to them.
    if (!x->node_->args.empty() && !seen.emplace(x->node_.get(), y->node_.get()).second) continue;
    if (x->node_->kind != y->node_->kind || x->node_->payload != y->node_->payload ||
        x->node_->args.size() != y->node_->args.size())
      return false;
    for (std::size_t i = 0; i < x->node_->args.size(); ++i)
      stack.emplace_back(&x->node_->args[i], &y->node_->args[i]);
  }
  return true;
}

void for_each_subterm(const Term& term, const std::function<void(const Term&)>& visit) {
  std::vector<const Term*> stack{&term};
  while (!stack.empty()) {
    const Term* t = stack.back();
    stack.pop_back();
    visit(*t);
    auto args = t->args();
    for (auto it = args.rbegin(); it != args.rend(); ++it) stack.push_back(&*it);
  }
}

}  // namespace eqlog
