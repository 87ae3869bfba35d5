#include "eqlog/tabling.hpp"

#include <algorithm>
#include <cassert>
#include <ostream>
#include <unordered_set>

namespace eqlog::tabling {

std::uint64_t Stats::rule_applications_total() const {
  std::uint64_t n = 0;
  for (const auto& [id, count] : rule_applications) n += count;
  return n;
}

std::uint64_t Stats::applications_of(RuleId id) const {
  auto it = rule_applications.find(id);
  return it == rule_applications.end() ? 0 : it->second;
}

Stats Stats::since(const Stats& earlier) const {
  Stats d;
  for (const auto& [id, count] : rule_applications) {
    std::uint64_t delta = count - earlier.applications_of(id);
    if (delta) d.rule_applications[id] = delta;
  }
  d.builtin_evals = builtin_evals - earlier.builtin_evals;
  d.merges = merges - earlier.merges;
  d.signatures_created = signatures_created - earlier.signatures_created;
  d.match_attempts = match_attempts - earlier.match_attempts;
  d.match_attempts_skipped_dont_reduce =
      match_attempts_skipped_dont_reduce - earlier.match_attempts_skipped_dont_reduce;
  d.dependency_entries_added = dependency_entries_added - earlier.dependency_entries_added;
  d.dependency_entries_suppressed_never_add =
      dependency_entries_suppressed_never_add - earlier.dependency_entries_suppressed_never_add;
  return d;
}

std::size_t Engine::KeyHash::operator()(const Key& k) const noexcept {
  std::size_t h = AtomHash{}(k.head);
  for (ClassId a : k.args) h ^= a + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

Engine::Engine(Program program, EngineOptions options)
    : program_(std::move(program)),
      options_(std::move(options)),
      graph_(analysis::build_needs_graph(program_)) {}

// ---------------------------------------------------------------------------
// Class table primitives

ClassId Engine::find(ClassId cls) const {
  while (classes_.at(cls).parent != cls) cls = classes_[cls].parent;
  return cls;
}

ClassId Engine::new_class() {
  ClassId id = static_cast<ClassId>(classes_.size());
  classes_.push_back(ClassRec{id, {}, std::nullopt, {}, true});
  return id;
}

void Engine::touch(ClassId cls) { touched_.insert(cls); }

void Engine::add_member(ClassId cls, SigId sig, bool as_unreduced) {
  ClassRec& c = classes_[cls];
  sigs_[sig].owner = cls;
  c.members.push_back(sig);
  if (as_unreduced) {
    assert(!c.unreduced && "class already has an unreduced signature");
    c.unreduced = sig;
  }
  c.all_never_add = c.all_never_add && sigs_[sig].never_add;
  ++epoch_;
  touch(cls);
}

void Engine::mark_reduced(SigId sig) {
  Signature& s = sigs_[sig];
  s.reduced = true;
  ClassRec& c = classes_[find(s.owner)];
  if (c.unreduced == sig) c.unreduced.reset();
  ++epoch_;
  touch(find(s.owner));
}

std::optional<Atom> Engine::literal_of(ClassId cls) const {
  auto u = classes_[find(cls)].unreduced;
  if (!u || !sigs_[*u].head.is_literal()) return std::nullopt;
  return sigs_[*u].head;
}

bool Engine::is_signature_constructor(const Atom& head) const {
  return head.is_literal() || program_.symbols().is_user_constructor(head.symbol);
}

std::optional<ClassId> Engine::lookup(const Atom& head, std::span<const ClassId> args) const {
  Key k{head, {}};
  for (ClassId a : args) k.args.push_back(find(a));
  auto it = index_.find(k);
  if (it == index_.end()) return std::nullopt;
  return find(sigs_[it->second].owner);
}

std::pair<ClassId, bool> Engine::lookup_or_create(Atom head, std::vector<ClassId> args,
                                                  std::optional<ClassId> into) {
  for (ClassId& a : args) a = find(a);
  const SymbolTable& table = program_.symbols();
  if (head.kind == Atom::Kind::Symbol && table.is_builtin(head.symbol)) {
    auto l = literal_of(args[0]);
    auto r = literal_of(args[1]);
    if (l && r) {
      if (auto value = evaluate_builtin_op(*table[head.symbol].op, *l, *r)) {
        ++stats_.builtin_evals;
        head = *value;
        args.clear();
      }
    }
  }

  Key key{head, args};
  if (auto it = index_.find(key); it != index_.end())
    return {find(sigs_[it->second].owner), false};

  const bool never_add = options_.never_add && is_never_add(head, args);
  SigId sid = static_cast<SigId>(sigs_.size());
  sigs_.push_back(Signature{head, args, 0, false, never_add, true});
  ++stats_.signatures_created;
  ClassId cls = into ? find(*into) : new_class();
  add_member(cls, sid, true);
  index_.emplace(std::move(key), sid);

  std::vector<ClassId> distinct = args;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  for (ClassId a : distinct) {
    if (never_add) {
      ++stats_.dependency_entries_suppressed_never_add;
    } else {
      classes_[a].dependents.push_back(sid);
      ++stats_.dependency_entries_added;
    }
  }
  return {cls, true};
}

ClassId Engine::intern(const Term& term) {
  assert(!term.is_var() && "only ground terms can be interned");
  std::vector<ClassId> args;
  args.reserve(term.args().size());
  for (const Term& a : term.args()) args.push_back(intern(a));
  return lookup_or_create(term.head(), std::move(args), std::nullopt).first;
}

// ---------------------------------------------------------------------------
// Matching and rewriting

bool Engine::match_pattern(const Term& pattern, ClassId cls, Binding& binding) const {
  cls = find(cls);
  if (pattern.is_var()) {
    auto& slot = binding[pattern.var_id()];
    if (slot) return find(*slot) == cls;
    slot = cls;
    return true;
  }
  auto u = classes_[cls].unreduced;
  if (!u) return false;
  const Signature& s = sigs_[*u];
  if (s.head != pattern.head() || s.args.size() != pattern.args().size()) return false;
  for (std::size_t i = 0; i < s.args.size(); ++i)
    if (!match_pattern(pattern.arg(i), s.args[i], binding)) return false;
  return true;
}

std::optional<Binding> Engine::match(ClassId cls, const Rule& rule) const {
  Binding binding(program_.variables().size());
  if (!match_pattern(rule.lhs, cls, binding)) return std::nullopt;
  return binding;
}

ClassId Engine::instantiate(const Term& t, const Binding& binding) {
  if (t.is_var()) return find(*binding.at(t.var_id()));
  std::vector<ClassId> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(instantiate(a, binding));
  return lookup_or_create(t.head(), std::move(args), std::nullopt).first;
}

void Engine::apply(ClassId cls, const Rule& rule, const Binding& binding) {
  cls = find(cls);
  auto u = classes_[cls].unreduced;
  assert(u && "apply needs a matched unreduced signature");
  mark_reduced(*u);
  ++stats_.rule_applications[rule.id];

  if (rule.rhs.is_var()) {
    merge(cls, find(*binding.at(rule.rhs.var_id())));
    return;
  }
  std::vector<ClassId> args;
  for (const Term& a : rule.rhs.args()) args.push_back(instantiate(a, binding));
  auto [target, created] = lookup_or_create(rule.rhs.head(), std::move(args), cls);
  if (!created) merge(cls, target);
}

bool Engine::evaluate_builtin(ClassId cls) {
  cls = find(cls);
  auto u = classes_[cls].unreduced;
  if (!u) return false;
  const Atom head = sigs_[*u].head;
  const SymbolTable& table = program_.symbols();
  if (head.kind != Atom::Kind::Symbol || !table.is_builtin(head.symbol)) return false;
  auto l = literal_of(sigs_[*u].args[0]);
  auto r = literal_of(sigs_[*u].args[1]);
  if (!l || !r) return false;
  auto value = evaluate_builtin_op(*table[head.symbol].op, *l, *r);
  if (!value) return false;
  ++stats_.builtin_evals;
  mark_reduced(*u);
  auto [target, created] = lookup_or_create(*value, {}, cls);
  if (!created) merge(cls, target);
  return true;
}

// ---------------------------------------------------------------------------
// Merging with congruence propagation

int Engine::unreduced_rank(ClassId cls) const {
  auto u = classes_[cls].unreduced;
  if (!u) return 3;
  const Atom& h = sigs_[*u].head;
  if (is_signature_constructor(h)) return 0;
  return program_.symbols().is_builtin(h.symbol) ? 1 : 2;
}

ClassId Engine::merge(ClassId a, ClassId b) {
  pending_.push_back({a, b, true});
  process_merges();
  return find(a);
}

void Engine::process_merges() {
  for (std::size_t i = 0; i < pending_.size(); ++i) {
    const PendingMerge m = pending_[i];
    ClassId a = find(m.a);
    ClassId b = find(m.b);
    if (a == b) continue;

    std::optional<SigId> keep;
    auto ua = classes_[a].unreduced;
    auto ub = classes_[b].unreduced;
    if (ua && ub) {
      bool take_b = m.keep_b_unreduced || unreduced_rank(b) <= unreduced_rank(a);
      keep = take_b ? ub : ua;
      // The other side is equal to the kept term; it is no longer distinguished.
      sigs_[take_b ? *ua : *ub].reduced = true;
    } else {
      keep = ua ? ua : ub;
    }

    const ClassId survivor = std::min(a, b);
    const ClassId absorbed = std::max(a, b);
    ClassRec& into = classes_[survivor];
    ClassRec& from = classes_[absorbed];
    from.parent = survivor;
    for (SigId s : from.members) {
      sigs_[s].owner = survivor;
      into.members.push_back(s);
    }
    from.members.clear();
    from.unreduced.reset();
    into.unreduced = keep;
    into.all_never_add = into.all_never_add && from.all_never_add;
    std::vector<SigId> moved = std::move(from.dependents);
    from.dependents.clear();

    ++stats_.merges;
    ++epoch_;
    touch(survivor);
    merge_log_.emplace_back(absorbed, survivor);

    for (SigId s : moved) rehash(s);
    ClassRec& survivor_rec = classes_[survivor];
    for (SigId s : moved)
      if (sigs_[s].alive) survivor_rec.dependents.push_back(s);
  }
  pending_.clear();
}

void Engine::rehash(SigId sid) {
  Signature& s = sigs_[sid];
  if (!s.alive) return;
  if (auto it = index_.find(Key{s.head, s.args}); it != index_.end() && it->second == sid)
    index_.erase(it);
  for (ClassId& a : s.args) a = find(a);

  auto [it, inserted] = index_.try_emplace(Key{s.head, s.args}, sid);
  const ClassId own = find(s.owner);
  touch(own);
  if (inserted || it->second == sid) return;

  // Congruence: an identical signature already exists. Keep that one and
  // drop this duplicate, then merge the two owning classes.
  const SigId other = it->second;
  const ClassId other_cls = find(sigs_[other].owner);
  s.alive = false;
  ClassRec& c = classes_[own];
  std::erase(c.members, sid);
  if (c.unreduced == sid) c.unreduced.reset();
  if (s.reduced && !sigs_[other].reduced) mark_reduced(other);
  ++epoch_;
  touch(other_cls);
  if (own != other_cls) pending_.push_back({own, other_cls, false});
}

// ---------------------------------------------------------------------------
// Signature classes

bool Engine::is_dont_reduce(ClassId cls) const {
  if (dont_reduce_cache_.size() < classes_.size())
    dont_reduce_cache_.resize(classes_.size(), {0, Tri::Unknown});
  auto state = [&](ClassId c) -> Tri& {
    auto& slot = dont_reduce_cache_[c];
    if (slot.first != epoch_ + 1) slot = {epoch_ + 1, Tri::Unknown};
    return slot.second;
  };

  // Post-order walk over unreduced signatures. A child still in progress
  // lies on a cycle through its ancestor, so neither can be don't-reduce.
  std::vector<std::pair<ClassId, bool>> stack{{find(cls), false}};
  while (!stack.empty()) {
    auto [c, expanded] = stack.back();
    Tri& st = state(c);
    auto u = classes_[c].unreduced;
    if (!expanded) {
      if (st != Tri::Unknown) {
        stack.pop_back();
      } else if (!u || !is_signature_constructor(sigs_[*u].head)) {
        st = Tri::No;
        stack.pop_back();
      } else {
        st = Tri::InProgress;
        stack.back().second = true;
        for (ClassId a : sigs_[*u].args)
          if (state(find(a)) == Tri::Unknown) stack.emplace_back(find(a), false);
      }
      continue;
    }
    bool all = true;
    for (ClassId a : sigs_[*u].args)
      if (state(find(a)) != Tri::Yes) all = false;
    st = all ? Tri::Yes : Tri::No;
    stack.pop_back();
  }
  return state(find(cls)) == Tri::Yes;
}

bool Engine::is_never_add(const Atom& head, std::span<const ClassId> args) const {
  if (!never_add_.eligible) return false;
  if (head.is_literal()) return never_add_.literal_qualifies(head);
  const SymbolTable& table = program_.symbols();
  if (!table.is_user_constructor(head.symbol)) return false;
  if (args.empty()) return never_add_.user_constants.contains(head.symbol);
  if (!never_add_.outermost_safe_constructors.contains(head.symbol)) return false;
  for (ClassId a : args)
    if (!classes_[find(a)].all_never_add) return false;
  return true;
}

bool Engine::holds_only_never_add(ClassId cls) const { return classes_[find(cls)].all_never_add; }

std::map<ClassId, bool> Engine::classify_dont_add_snapshot() const {
  std::map<ClassId, bool> out;
  const auto live = live_classes();
  for (ClassId c : live) out[c] = false;
  bool changed = true;
  while (changed) {
    changed = false;
    for (ClassId c : live) {
      if (out[c]) continue;
      bool ok = true;
      for (SigId m : classes_[c].members) {
        const Signature& s = sigs_[m];
        if (!s.alive) continue;
        if (!is_signature_constructor(s.head)) {
          ok = false;
          break;
        }
        for (ClassId a : s.args)
          if (!out[find(a)]) ok = false;
        if (!ok) break;
      }
      if (ok) {
        out[c] = true;
        changed = true;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Extraction

Extraction Engine::extract_term(ClassId cls) const {
  struct Frame {
    ClassId cls;
    SigId sig;
    std::size_t next;
    std::vector<Term> args;
  };
  std::unordered_map<ClassId, Term> done;
  std::unordered_set<ClassId> active;
  std::vector<Frame> stack;

  auto enter = [&](ClassId c) -> std::optional<Extraction> {
    if (active.contains(c)) return Extraction{std::nullopt, Extraction::Failure::Cycle, c};
    auto u = classes_[c].unreduced;
    if (!u) return Extraction{std::nullopt, Extraction::Failure::NoUnreduced, c};
    active.insert(c);
    stack.push_back(Frame{c, *u, 0, {}});
    return std::nullopt;
  };

  if (auto fail = enter(find(cls))) return *fail;
  while (true) {
    Frame& f = stack.back();
    const Signature& s = sigs_[f.sig];
    if (f.next < s.args.size()) {
      ClassId child = find(s.args[f.next++]);
      if (auto it = done.find(child); it != done.end()) {
        f.args.push_back(it->second);
        continue;
      }
      if (auto fail = enter(child)) return *fail;
      continue;
    }
    Term t = s.head.is_literal() ? Term::literal(s.head) : Term::app(s.head.symbol, std::move(f.args));
    active.erase(f.cls);
    done.emplace(f.cls, t);
    stack.pop_back();
    if (stack.empty()) return Extraction{std::move(t), Extraction::Failure::None, 0};
    stack.back().args.push_back(std::move(t));
  }
}

// ---------------------------------------------------------------------------
// Main loop

std::optional<Engine::Step> Engine::next_step() {
  std::vector<bool> visited(classes_.size(), false);
  std::vector<ClassId> stack{find(*root_)};
  const SymbolTable& table = program_.symbols();
  while (!stack.empty()) {
    ClassId c = find(stack.back());
    stack.pop_back();
    if (visited[c]) continue;
    visited[c] = true;
    auto u = classes_[c].unreduced;
    if (!u) continue;
    if (options_.dont_reduce && is_dont_reduce(c)) {
      ++stats_.match_attempts_skipped_dont_reduce;
      continue;
    }
    const Signature& s = sigs_[*u];
    if (s.head.kind == Atom::Kind::Symbol) {
      if (table.is_builtin(s.head.symbol)) {
        auto l = literal_of(s.args[0]);
        auto r = literal_of(s.args[1]);
        if (l && r) {
          bool ready = true;
          try {
            ready = evaluate_builtin_op(*table[s.head.symbol].op, *l, *r).has_value();
          } catch (const ArithmeticOverflow&) {
            // perform() re-raises it.
          }
          if (ready) return Step{c, nullptr, {}};
        }
      } else if (auto it = rules_by_root_.find(s.head.symbol); it != rules_by_root_.end()) {
        for (const Rule* rule : it->second) {
          ++stats_.match_attempts;
          if (auto binding = match(c, *rule)) return Step{c, rule, std::move(*binding)};
        }
      }
    }
    for (auto a = s.args.rbegin(); a != s.args.rend(); ++a) stack.push_back(find(*a));
  }
  return std::nullopt;
}

void Engine::perform(const Step& step) {
  if (step.rule) apply(step.cls, *step.rule, step.binding);
  else evaluate_builtin(step.cls);
}

void Engine::refresh_never_add(const Term& goal) {
  analysis::NeverAddSets fresh = analysis::never_add_sets(program_, &goal);
  if (!never_add_initialized_) {
    never_add_ = std::move(fresh);
    never_add_initialized_ = true;
    return;
  }
  std::set<LiteralType> kept;
  std::set_intersection(never_add_.predefined_types.begin(), never_add_.predefined_types.end(),
                        fresh.predefined_types.begin(), fresh.predefined_types.end(),
                        std::inserter(kept, kept.end()));
  if (kept == never_add_.predefined_types) return;
  never_add_.predefined_types = std::move(kept);

  // A later goal uses operators over a type earlier signatures relied on
  // being inert. Demote every never-add signature to an ordinary one.
  for (SigId sid = 0; sid < sigs_.size(); ++sid) {
    Signature& s = sigs_[sid];
    if (!s.alive || !s.never_add) continue;
    s.never_add = false;
    std::vector<ClassId> distinct;
    for (ClassId a : s.args) distinct.push_back(find(a));
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (ClassId a : distinct) {
      classes_[a].dependents.push_back(sid);
      ++stats_.dependency_entries_added;
    }
  }
  for (ClassRec& c : classes_) c.all_never_add = c.members.empty();
}

void Engine::select_rules(const Term& goal) {
  rules_by_root_.clear();
  std::optional<std::set<SymbolId>> keep;
  if (options_.prune_rules) keep = analysis::reachable_defined_symbols(program_, graph_, goal);
  for (const Rule& r : program_.rules())
    if (!keep || keep->contains(r.root())) rules_by_root_[r.root()].push_back(&r);
}

void Engine::emit_trace(const std::string& header) {
  if (options_.trace) {
    std::ostream& out = *options_.trace;
    out << "# " << header << '\n';
    for (auto [absorbed, survivor] : merge_log_)
      out << "merged " << absorbed << " into " << find(survivor) << '\n';
    for (ClassId c : touched_)
      if (find(c) == c && !classes_[c].members.empty()) out << format_class(c) << '\n';
  }
  touched_.clear();
  merge_log_.clear();
}

Outcome Engine::normalize(const Term& goal) {
  const Stats before = stats_;
  refresh_never_add(goal);
  select_rules(goal);
  touched_.clear();
  merge_log_.clear();

  root_ = intern(goal);
  emit_trace("goal " + to_string(goal, program_));
  if (options_.observer) options_.observer(*this);

  std::uint64_t steps = 0;
  while (true) {
    auto step = next_step();
    if (!step) break;
    if (steps >= options_.max_steps) {
      Extraction partial = extract_term(*root_);
      if (options_.trace) *options_.trace << "# step limit reached\n";
      return Outcome{StepLimitReached{partial.term}, stats_.since(before)};
    }
    std::string header = "step " + std::to_string(steps + 1) + ": ";
    header += step->rule ? "rule " + std::to_string(step->rule->id) : std::string("builtin");
    header += " at class " + std::to_string(step->cls);
    perform(*step);
    ++steps;
    emit_trace(header);
    if (options_.observer) options_.observer(*this);
  }

  ClassId r = find(*root_);
  Extraction e = extract_term(r);
  if (!e.term) {
    if (options_.trace) *options_.trace << "# no finite normal form (class " << e.failed_at << ")\n";
    return Outcome{NoFiniteNormalForm{e.failed_at, e.failure == Extraction::Failure::Cycle},
                   stats_.since(before)};
  }
  if (options_.trace) *options_.trace << "# normal form: " << to_string(*e.term, program_) << '\n';
  return Outcome{NormalForm{std::move(*e.term)}, stats_.since(before)};
}

Outcome normalize_tabled(const Program& program, const Term& goal, const EngineOptions& options) {
  Engine engine(program, options);
  return engine.normalize(goal);
}

// ---------------------------------------------------------------------------
// Inspection

std::vector<ClassId> Engine::live_classes() const {
  std::vector<ClassId> out;
  for (ClassId c = 0; c < classes_.size(); ++c)
    if (classes_[c].parent == c && !classes_[c].members.empty()) out.push_back(c);
  return out;
}

std::vector<SigId> Engine::members(ClassId cls) const { return classes_[find(cls)].members; }

std::optional<SigId> Engine::unreduced(ClassId cls) const { return classes_[find(cls)].unreduced; }

const std::vector<SigId>& Engine::dependents(ClassId cls) const {
  return classes_[find(cls)].dependents;
}

std::optional<ClassId> Engine::root() const {
  if (!root_) return std::nullopt;
  return find(*root_);
}

std::vector<RuleId> Engine::active_rules() const {
  std::vector<RuleId> out;
  for (const auto& [root, rules] : rules_by_root_)
    for (const Rule* r : rules) out.push_back(r->id);
  std::sort(out.begin(), out.end());
  return out;
}

std::string Engine::format_signature(SigId id) const {
  const Signature& s = sigs_[id];
  std::string head = to_string(s.head, program_);
  if (s.args.empty()) return head;
  std::string out = "<" + head;
  for (ClassId a : s.args) out += " " + std::to_string(find(a));
  return out + ">";
}

std::string Engine::format_class(ClassId cls) const {
  cls = find(cls);
  const ClassRec& c = classes_[cls];
  std::vector<SigId> ordered;
  for (SigId m : c.members)
    if (sigs_[m].alive && c.unreduced != m) ordered.push_back(m);
  std::sort(ordered.begin(), ordered.end());
  std::string out = std::to_string(cls) + ":{";
  bool first = true;
  for (SigId m : ordered) {
    if (!first) out += ", ";
    out += format_signature(m);
    first = false;
  }
  if (c.unreduced) {
    if (!first) out += ", ";
    out += format_signature(*c.unreduced) + "*";
  }
  return out + "}";
}

std::vector<std::string> Engine::audit() const {
  std::vector<std::string> bad;
  std::size_t alive = 0;
  for (SigId sid = 0; sid < sigs_.size(); ++sid) {
    const Signature& s = sigs_[sid];
    if (!s.alive) continue;
    ++alive;
    const std::string name = "signature " + std::to_string(sid) + " " + format_signature(sid);
    for (ClassId a : s.args)
      if (find(a) != a) bad.push_back(name + ": non-canonical argument " + std::to_string(a));
    auto it = index_.find(Key{s.head, s.args});
    if (it == index_.end() || it->second != sid) bad.push_back(name + ": not indexed");
    const ClassRec& owner = classes_[find(s.owner)];
    if (std::find(owner.members.begin(), owner.members.end(), sid) == owner.members.end())
      bad.push_back(name + ": missing from its class");
    if (s.never_add) {
      for (ClassId a : s.args)
        if (!classes_[find(a)].all_never_add)
          bad.push_back(name + ": never-add over a class with other signatures");
    } else {
      for (ClassId a : s.args) {
        const auto& deps = classes_[find(a)].dependents;
        if (std::find(deps.begin(), deps.end(), sid) == deps.end())
          bad.push_back(name + ": missing from dependency list of " + std::to_string(find(a)));
      }
    }
  }
  if (index_.size() != alive) bad.push_back("index size differs from live signature count");
  for (ClassId c : live_classes()) {
    const ClassRec& rec = classes_[c];
    if (rec.unreduced) {
      const Signature& u = sigs_[*rec.unreduced];
      if (!u.alive || u.reduced || find(u.owner) != c)
        bad.push_back("class " + std::to_string(c) + ": invalid unreduced signature");
    }
    std::size_t unreduced_members = 0;
    bool all_never_add = true;
    for (SigId m : rec.members) {
      if (!sigs_[m].reduced) ++unreduced_members;
      all_never_add = all_never_add && sigs_[m].never_add;
      if (find(sigs_[m].owner) != c)
        bad.push_back("class " + std::to_string(c) + ": member with stale owner");
    }
    if (unreduced_members > 1)
      bad.push_back("class " + std::to_string(c) + ": more than one unreduced signature");
    if (rec.all_never_add != all_never_add)
      bad.push_back("class " + std::to_string(c) + ": stale never-add flag");
  }
  return bad;
}

}  // namespace eqlog::tabling
