#pragma once

#include "eqlog/program.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

/// Plain tree rewriting, no sharing and no history. Serves as the reference
/// the tabled engine is checked against.
namespace eqlog::rewrite {

using Position = std::vector<std::size_t>;

struct Contraction {
  Term result;
  Position position;
  /// Empty when the step evaluated a built-in operator.
  std::optional<RuleId> rule;
  /// Built-ins folded while instantiating the rule's rhs.
  std::uint64_t builtin_evals = 0;
};

/// Leftmost-outermost contraction of `term`, or nothing if it is in normal
/// form. Rules are tried in program order at each position.
std::optional<Contraction> rewrite_step(const Program& program, const Term& term);

/// Binding of lhs variables to subterms, indexed by VarId.
using Substitution = std::vector<std::optional<Term>>;

/// Syntactic matching; a repeated variable needs equal subterms.
std::optional<Substitution> match(const Program& program, const Term& lhs, const Term& term);

struct NormalForm {
  Term term;
};

struct StepLimitReached {
  Term current;
};

struct RewriteOutcome {
  std::variant<NormalForm, StepLimitReached> result;
  /// Contractions performed: rule applications plus built-in steps.
  std::uint64_t steps_applied = 0;
  /// Every built-in evaluation, including those folded into rhs instances.
  std::uint64_t builtin_evals = 0;
  std::map<RuleId, std::uint64_t> rule_applications;

  const NormalForm* normal_form() const { return std::get_if<NormalForm>(&result); }
  bool step_limit() const { return std::holds_alternative<StepLimitReached>(result); }
  std::uint64_t rule_applications_total() const;
  std::uint64_t applications_of(RuleId id) const;
};

RewriteOutcome normalize_untabled(const Program& program, const Term& goal,
                                  std::uint64_t max_steps = 100000);

}  // namespace eqlog::rewrite
