#pragma once

#include "eqlog/analysis.hpp"
#include "eqlog/program.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace eqlog::tabling {

using ClassId = std::uint32_t;
using SigId = std::uint32_t;

/// A head atom applied to a tuple of equivalence classes.
struct Signature {
  Atom head;
  std::vector<ClassId> args;
  ClassId owner = 0;
  bool reduced = false;
  bool never_add = false;
  bool alive = true;
};

struct Stats {
  std::map<RuleId, std::uint64_t> rule_applications;
  std::uint64_t builtin_evals = 0;
  std::uint64_t merges = 0;
  std::uint64_t signatures_created = 0;
  std::uint64_t match_attempts = 0;
  std::uint64_t match_attempts_skipped_dont_reduce = 0;
  std::uint64_t dependency_entries_added = 0;
  std::uint64_t dependency_entries_suppressed_never_add = 0;

  std::uint64_t rule_applications_total() const;
  std::uint64_t applications_of(RuleId id) const;

  /// Counter-wise difference; `earlier` must be a previous snapshot.
  Stats since(const Stats& earlier) const;
};

class Engine;

struct EngineOptions {
  bool dont_reduce = true;
  bool never_add = true;
  bool prune_rules = true;
  std::uint64_t max_steps = 100000;
  /// When set, every step prints its changed classes here.
  std::ostream* trace = nullptr;
  /// Called at every quiescent point: after interning and after each step.
  std::function<void(const Engine&)> observer;
};

struct NormalForm {
  Term term;
};

struct NoFiniteNormalForm {
  ClassId witness = 0;
  /// Either a cycle through the witness, or a class left without an
  /// unreduced signature because every member was rewritten back into it.
  bool cyclic = true;
};

struct StepLimitReached {
  std::optional<Term> partial;
};

struct Outcome {
  std::variant<NormalForm, NoFiniteNormalForm, StepLimitReached> result;
  Stats stats;

  const NormalForm* normal_form() const { return std::get_if<NormalForm>(&result); }
  bool no_finite_normal_form() const { return std::holds_alternative<NoFiniteNormalForm>(result); }
  bool step_limit() const { return std::holds_alternative<StepLimitReached>(result); }
};

/// Per-variable class binding, indexed by VarId.
using Binding = std::vector<std::optional<ClassId>>;

struct Extraction {
  enum class Failure { None, Cycle, NoUnreduced };
  std::optional<Term> term;
  Failure failure = Failure::None;
  ClassId failed_at = 0;
};

/// Congruence-closure normalizer. Terms live as signatures over numbered
/// equivalence classes; each class has at most one unreduced signature, the
/// only one rules are matched against. Rewriting a matched signature marks
/// it reduced and merges its class with the class of the rhs instance.
///
/// State persists across normalize() calls, so later goals reuse everything
/// earlier ones computed.
class Engine {
 public:
  explicit Engine(Program program, EngineOptions options = {});
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  Outcome normalize(const Term& goal);

  ClassId intern(const Term& term);
  std::optional<Binding> match(ClassId cls, const Rule& rule) const;
  void apply(ClassId cls, const Rule& rule, const Binding& binding);
  /// Union of two classes with congruence propagation. When both sides have
  /// an unreduced signature, `b`'s is kept. The surviving id is the smaller.
  ClassId merge(ClassId a, ClassId b);
  bool evaluate_builtin(ClassId cls);

  bool is_dont_reduce(ClassId cls) const;
  bool is_never_add(const Atom& head, std::span<const ClassId> args) const;
  std::map<ClassId, bool> classify_dont_add_snapshot() const;
  Extraction extract_term(ClassId cls) const;

  ClassId find(ClassId cls) const;
  std::vector<ClassId> live_classes() const;
  std::vector<SigId> members(ClassId cls) const;
  std::optional<SigId> unreduced(ClassId cls) const;
  const Signature& signature(SigId id) const { return sigs_.at(id); }
  const std::vector<SigId>& dependents(ClassId cls) const;
  bool holds_only_never_add(ClassId cls) const;
  std::optional<ClassId> lookup(const Atom& head, std::span<const ClassId> args) const;
  std::optional<ClassId> root() const;
  /// Rules the last normalize() call could use, after pruning.
  std::vector<RuleId> active_rules() const;

  /// `<f 3 0>`; literals and constants print bare.
  std::string format_signature(SigId id) const;
  /// `1:{<fib 0>, <f 3 0>*}`: reduced members by creation, unreduced last.
  std::string format_class(ClassId cls) const;

  const Stats& stats() const { return stats_; }
  const Program& program() const { return program_; }
  const EngineOptions& options() const { return options_; }
  const analysis::NeverAddSets& never_add_sets() const { return never_add_; }

  /// Full-table check of the engine's structural invariants; empty when all
  /// hold. Meant for quiescent points.
  std::vector<std::string> audit() const;

 private:
  struct ClassRec {
    ClassId parent;
    std::vector<SigId> members;
    std::optional<SigId> unreduced;
    std::vector<SigId> dependents;
    bool all_never_add = true;
  };

  struct Key {
    Atom head;
    std::vector<ClassId> args;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };

  struct Step {
    ClassId cls;
    const Rule* rule;  // null for a built-in evaluation
    Binding binding;
  };

  struct PendingMerge {
    ClassId a;
    ClassId b;
    bool keep_b_unreduced;
  };

  enum class Tri : std::uint8_t { Unknown, InProgress, Yes, No };

  ClassId new_class();
  /// Looks the signature up, evaluating a built-in over literal operands
  /// first. On a miss creates it, in `into` as its unreduced signature when
  /// given, else in a fresh class. Returns the class and whether it is new.
  std::pair<ClassId, bool> lookup_or_create(Atom head, std::vector<ClassId> args,
                                            std::optional<ClassId> into);
  void add_member(ClassId cls, SigId sig, bool as_unreduced);
  void mark_reduced(SigId sig);
  ClassId instantiate(const Term& rhs, const Binding& binding);
  std::optional<Atom> literal_of(ClassId cls) const;
  bool is_signature_constructor(const Atom& head) const;
  bool match_pattern(const Term& pattern, ClassId cls, Binding& binding) const;
  void process_merges();
  void rehash(SigId sig);
  int unreduced_rank(ClassId cls) const;
  std::optional<Step> next_step();
  void perform(const Step& step);
  void refresh_never_add(const Term& goal);
  void select_rules(const Term& goal);
  void touch(ClassId cls);
  void emit_trace(const std::string& header);

  Program program_;
  EngineOptions options_;
  analysis::NeedsGraph graph_;
  analysis::NeverAddSets never_add_;
  bool never_add_initialized_ = false;

  std::vector<ClassRec> classes_;
  std::vector<Signature> sigs_;
  std::unordered_map<Key, SigId, KeyHash> index_;
  std::vector<PendingMerge> pending_;
  std::unordered_map<SymbolId, std::vector<const Rule*>> rules_by_root_;
  std::optional<ClassId> root_;
  Stats stats_;

  std::uint64_t epoch_ = 0;
  mutable std::vector<std::pair<std::uint64_t, Tri>> dont_reduce_cache_;

  std::set<ClassId> touched_;
  std::vector<std::pair<ClassId, ClassId>> merge_log_;
};

/// One-shot convenience wrapper around a fresh Engine.
Outcome normalize_tabled(const Program& program, const Term& goal,
                         const EngineOptions& options = {});

}  // namespace eqlog::tabling
