#include "eqlog/rewrite.hpp"

#include <algorithm>
#include <iterator>
#include <utility>

namespace eqlog::rewrite {

namespace {

std::optional<Atom> fold(const SymbolTable& table, SymbolId op, const Term& lhs, const Term& rhs) {
  if (!lhs.is_literal() || !rhs.is_literal()) return std::nullopt;
  return evaluate_builtin_op(*table[op].op, lhs.head(), rhs.head());
}

Term instantiate(const Program& program, const Term& rhs, const Substitution& sigma,
                 std::uint64_t& evals) {
  if (rhs.is_var()) return *sigma.at(rhs.var_id());
  if (!rhs.is_app() || rhs.args().empty()) return rhs;
  std::vector<Term> args;
  args.reserve(rhs.args().size());
  for (const Term& a : rhs.args()) args.push_back(instantiate(program, a, sigma, evals));
  const SymbolTable& table = program.symbols();
  if (table.is_builtin(rhs.symbol())) {
    if (auto value = fold(table, rhs.symbol(), args[0], args[1])) {
      ++evals;
      return Term::literal(*value);
    }
  }
  return Term::app(rhs.symbol(), std::move(args));
}

/// Rebuilds `root` with the subterm at `path` replaced.
Term replace_at(const Term& root, const Position& path, Term replacement) {
  std::vector<const Term*> chain{&root};
  chain.reserve(path.size());
  for (std::size_t i = 0; i + 1 < path.size(); ++i) chain.push_back(&chain.back()->arg(path[i]));
  for (std::size_t i = path.size(); i-- > 0;)
    replacement = chain[i]->with_arg(path[i], std::move(replacement));
  return replacement;
}

}  // namespace

std::optional<Substitution> match(const Program& program, const Term& lhs, const Term& term) {
  Substitution sigma(program.variables().size());
  std::vector<std::pair<Term, Term>> work{{lhs, term}};
  while (!work.empty()) {
    auto [p, t] = std::move(work.back());
    work.pop_back();
    if (p.is_var()) {
      auto& slot = sigma[p.var_id()];
      if (!slot) slot = t;
      else if (!(*slot == t)) return std::nullopt;
      continue;
    }
    if (p.head() != t.head() || p.args().size() != t.args().size()) return std::nullopt;
    for (std::size_t i = p.args().size(); i-- > 0;) work.emplace_back(p.arg(i), t.arg(i));
  }
  return sigma;
}

std::optional<Contraction> rewrite_step(const Program& program, const Term& term) {
  const SymbolTable& table = program.symbols();
  // Visited nodes with a link to their parent; paths are rebuilt only for
  // the redex, so a step stays linear in the term size.
  struct Visit {
    const Term* t;
    std::size_t parent;
    std::size_t index;
  };
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  // Scratch buffers are reused across calls: reallocating large blocks every
  // step makes malloc consolidate the many small freed term nodes each time.
  thread_local std::vector<Visit> visited, stack;
  visited.clear();
  stack.assign(1, {&term, kNone, 0});
  auto path_to = [&](std::size_t at) {
    Position path;
    for (; visited[at].parent != kNone; at = visited[at].parent) path.push_back(visited[at].index);
    return Position(path.rbegin(), path.rend());
  };
  while (!stack.empty()) {
    visited.push_back(stack.back());
    stack.pop_back();
    const std::size_t here = visited.size() - 1;
    const Term& t = *visited[here].t;
    if (!t.is_app()) continue;
    if (table.is_builtin(t.symbol())) {
      if (auto value = fold(table, t.symbol(), t.arg(0), t.arg(1))) {
        Position path = path_to(here);
        Term result = replace_at(term, path, Term::literal(*value));
        return Contraction{std::move(result), std::move(path), std::nullopt, 1};
      }
    } else if (table.is_defined(t.symbol())) {
      for (const Rule& rule : program.rules()) {
        if (rule.root() != t.symbol()) continue;
        if (auto sigma = match(program, rule.lhs, t)) {
          std::uint64_t evals = 0;
          Term contractum = instantiate(program, rule.rhs, *sigma, evals);
          Position path = path_to(here);
          Term result = replace_at(term, path, std::move(contractum));
          return Contraction{std::move(result), std::move(path), rule.id, evals};
        }
      }
    }
    for (std::size_t i = t.args().size(); i-- > 0;) stack.push_back({&t.arg(i), here, i});
  }
  return std::nullopt;
}

std::uint64_t RewriteOutcome::rule_applications_total() const {
  std::uint64_t n = 0;
  for (const auto& [id, count] : rule_applications) n += count;
  return n;
}

std::uint64_t RewriteOutcome::applications_of(RuleId id) const {
  auto it = rule_applications.find(id);
  return it == rule_applications.end() ? 0 : it->second;
}

namespace {

/// Tree used by normalize_untabled: a reference-counted DAG whose nodes are
/// rewritten in place, copying shared ones along the path first. The search
/// for the next redex resumes where the last one was found instead of at the
/// root: positions left of the contracted one are unchanged, so only
/// ancestors close enough for a lhs to reach the new subterm can have become
/// redexes. Dead nodes stay in the arena.
class Tree {
 public:
  Tree(const Program& program, const Term& goal) : program_(program), table_(program.symbols()) {
    reach_.assign(table_.size(), 0);
    rules_by_root_.resize(table_.size());
    for (SymbolId id = 0; id < table_.size(); ++id)
      if (table_.is_builtin(id)) reach_[id] = 1;
    for (const Rule& r : program.rules()) {
      rules_by_root_[r.root()].push_back(&r);
      std::size_t& reach = reach_[r.root()];
      reach = r.left_linear ? std::max(reach, r.lhs.depth() - 1) : kUnbounded;
      max_reach_ = std::max(max_reach_, reach);
    }
    const std::uint32_t root = build(goal);
    ++nodes_[root].refs;
    path_.push_back({root, 0});
  }

  struct Redex {
    const Rule* rule;  // null for a built-in
    Substitution sigma;
  };

  /// Leftmost-outermost redex at or after the cursor; the cursor stays on it.
  std::optional<Redex> next() {
    if (path_.empty()) return std::nullopt;
    do {
      if (auto r = redex_at(path_.back().node)) return r;
    } while (advance());
    path_.clear();
    return std::nullopt;
  }

  /// Contracts the redex under the cursor and moves the cursor to the first
  /// position that may now hold the leftmost-outermost redex. Returns the
  /// built-ins folded.
  std::uint64_t contract(const Redex& r) {
    const std::uint32_t redex = path_.back().node;
    std::uint64_t evals = 0;
    std::uint32_t replacement;
    if (!r.rule) {
      const Node& n = nodes_[redex];
      Atom value = *evaluate_builtin_op(*table_[n.head.symbol].op, nodes_[n.args[0]].head,
                                        nodes_[n.args[1]].head);
      replacement = add(value, {});
      evals = 1;
    } else {
      replacement = instantiate(r.rule->rhs, r.sigma, evals);
    }

    // Ancestors must be private to this position before one is changed.
    // Nothing new can point at a private ancestor, so the prefix stays so.
    for (std::size_t k = private_; k + 1 < path_.size(); ++k) {
      if (nodes_[path_[k].node].refs > 1) {
        Node clone = nodes_[path_[k].node];
        clone.refs = 0;
        const std::uint32_t id = add(clone.head, std::move(clone.args));
        set_slot(k, id);
      }
    }
    set_slot(path_.size() - 1, replacement);
    private_ = path_.size() - 1;

    // Re-examine ancestors whose redex status can depend on the new subterm,
    // outermost first.
    std::size_t resume = path_.size() - 1;
    for (std::size_t k = path_.size() - 1, distance = 1; k-- > 0 && distance <= max_reach_; ++distance) {
      const Atom& h = nodes_[path_[k].node].head;
      if (h.kind == Atom::Kind::Symbol && reach_[h.symbol] >= distance && redex_at(path_[k].node))
        resume = k;
    }
    path_.resize(resume + 1);
    private_ = std::min(private_, resume + 1);
    return evals;
  }

  Term to_term() const {
    const std::uint32_t root = root_node();
    std::vector<std::optional<Term>> done(nodes_.size());
    std::vector<std::pair<std::uint32_t, bool>> stack{{root, false}};
    while (!stack.empty()) {
      auto [n, expanded] = stack.back();
      stack.pop_back();
      if (done[n]) continue;
      const Node& node = nodes_[n];
      if (node.head.is_literal()) {
        done[n] = Term::literal(node.head);
      } else if (!expanded) {
        stack.emplace_back(n, true);
        for (std::size_t i = node.args.size(); i-- > 0;) stack.emplace_back(node.args[i], false);
      } else {
        std::vector<Term> args;
        args.reserve(node.args.size());
        for (std::uint32_t a : node.args) args.push_back(*done[a]);
        done[n] = Term::app(node.head.symbol, std::move(args));
      }
    }
    return *done[root];
  }

 private:
  static constexpr std::size_t kUnbounded = static_cast<std::size_t>(-1);

  struct Node {
    Atom head;
    std::vector<std::uint32_t> args;
    std::uint32_t refs = 0;
  };

  struct Frame {
    std::uint32_t node;
    std::uint32_t index;  // position in the parent's arguments
  };

  std::uint32_t root_node() const { return path_.empty() ? last_root_ : path_.front().node; }

  std::uint32_t add(Atom head, std::vector<std::uint32_t> args) {
    for (std::uint32_t a : args) ++nodes_[a].refs;
    nodes_.push_back({head, std::move(args), 0});
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  }

  void release(std::uint32_t n) {
    std::vector<std::uint32_t> dead{n};
    while (!dead.empty()) {
      const std::uint32_t d = dead.back();
      dead.pop_back();
      if (--nodes_[d].refs == 0)
        for (std::uint32_t a : nodes_[d].args) dead.push_back(a);
    }
  }

  // Points the slot of path_[k] at `node`. The parent must be private.
  void set_slot(std::size_t k, std::uint32_t node) {
    ++nodes_[node].refs;
    if (k > 0) nodes_[path_[k - 1].node].args[path_[k].index] = node;
    else last_root_ = node;
    release(path_[k].node);
    path_[k].node = node;
  }

  bool advance() {
    const Node& here = nodes_[path_.back().node];
    if (!here.args.empty()) {
      path_.push_back({here.args.front(), 0});
      return true;
    }
    while (path_.size() > 1) {
      const std::uint32_t next = path_.back().index + 1;
      const Node& parent = nodes_[path_[path_.size() - 2].node];
      if (next < parent.args.size()) {
        path_.back() = {parent.args[next], next};
        private_ = std::min(private_, path_.size() - 1);
        return true;
      }
      path_.pop_back();
    }
    last_root_ = path_.front().node;
    return false;
  }

  std::uint32_t build(const Term& goal) {
    std::vector<std::pair<const Term*, bool>> stack{{&goal, false}};
    std::vector<std::uint32_t> built;
    while (!stack.empty()) {
      auto [t, expanded] = stack.back();
      stack.pop_back();
      if (!expanded && !t->args().empty()) {
        stack.emplace_back(t, true);
        for (std::size_t i = t->args().size(); i-- > 0;) stack.emplace_back(&t->arg(i), false);
        continue;
      }
      std::vector<std::uint32_t> args(built.end() - t->args().size(), built.end());
      built.resize(built.size() - t->args().size());
      built.push_back(add(t->head(), std::move(args)));
    }
    return built.back();
  }

  // Variables share the matched subtree.
  std::uint32_t instantiate(const Term& rhs, const Substitution& sigma, std::uint64_t& evals) {
    if (rhs.is_var()) return static_cast<std::uint32_t>(sigma[rhs.var_id()]->int_value());
    std::vector<std::uint32_t> args;
    args.reserve(rhs.args().size());
    for (const Term& a : rhs.args()) args.push_back(instantiate(a, sigma, evals));
    if (rhs.is_app() && table_.is_builtin(rhs.symbol())) {
      const Atom l = nodes_[args[0]].head, r = nodes_[args[1]].head;
      if (l.is_literal() && r.is_literal()) {
        if (auto value = evaluate_builtin_op(*table_[rhs.symbol()].op, l, r)) {
          ++evals;
          return add(*value, {});
        }
      }
    }
    return add(rhs.head(), std::move(args));
  }

  bool equal(std::uint32_t a, std::uint32_t b) const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> stack{{a, b}};
    while (!stack.empty()) {
      auto [x, y] = stack.back();
      stack.pop_back();
      if (x == y) continue;
      const Node &nx = nodes_[x], &ny = nodes_[y];
      if (!(nx.head == ny.head) || nx.args.size() != ny.args.size()) return false;
      for (std::size_t i = 0; i < nx.args.size(); ++i) stack.emplace_back(nx.args[i], ny.args[i]);
    }
    return true;
  }

  // Bindings hold node ids wrapped in integer terms.
  std::optional<Substitution> match(const Term& lhs, std::uint32_t node) const {
    Substitution sigma(program_.variables().size());
    std::vector<std::pair<const Term*, std::uint32_t>> work{{&lhs, node}};
    while (!work.empty()) {
      auto [p, n] = work.back();
      work.pop_back();
      if (p->is_var()) {
        auto& slot = sigma[p->var_id()];
        if (!slot) slot = Term::integer(n);
        else if (!equal(static_cast<std::uint32_t>(slot->int_value()), n)) return std::nullopt;
        continue;
      }
      const Node& t = nodes_[n];
      if (!(p->head() == t.head) || p->args().size() != t.args.size()) return std::nullopt;
      for (std::size_t i = p->args().size(); i-- > 0;) work.emplace_back(&p->arg(i), t.args[i]);
    }
    return sigma;
  }

  std::optional<Redex> redex_at(std::uint32_t n) const {
    const Node& node = nodes_[n];
    if (node.head.is_literal()) return std::nullopt;
    const SymbolId f = node.head.symbol;
    if (table_.is_builtin(f)) {
      const Atom& l = nodes_[node.args[0]].head;
      const Atom& r = nodes_[node.args[1]].head;
      if (l.is_literal() && r.is_literal() && evaluate_builtin_op(*table_[f].op, l, r))
        return Redex{nullptr, {}};
      return std::nullopt;
    }
    for (const Rule* rule : rules_by_root_[f])
      if (auto sigma = match(rule->lhs, n)) return Redex{rule, std::move(*sigma)};
    return std::nullopt;
  }

  const Program& program_;
  const SymbolTable& table_;
  std::vector<Node> nodes_;
  std::vector<std::vector<const Rule*>> rules_by_root_;
  /// How far above a changed position a symbol's redex status can change.
  std::vector<std::size_t> reach_;
  std::size_t max_reach_ = 1;
  /// Root to cursor; empty once the term is in normal form.
  std::vector<Frame> path_;
  /// Leading frames of path_ referenced only through the path.
  std::size_t private_ = 0;
  std::uint32_t last_root_ = 0;
};

}  // namespace

RewriteOutcome normalize_untabled(const Program& program, const Term& goal,
                                  std::uint64_t max_steps) {
  RewriteOutcome out;
  Tree tree(program, goal);
  while (auto redex = tree.next()) {
    if (out.steps_applied >= max_steps) {
      out.result = StepLimitReached{tree.to_term()};
      return out;
    }
    ++out.steps_applied;
    if (redex->rule) ++out.rule_applications[redex->rule->id];
    out.builtin_evals += tree.contract(*redex);
  }
  out.result = NormalForm{tree.to_term()};
  return out;
}

}  // namespace eqlog::rewrite
