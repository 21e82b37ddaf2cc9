#pragma once

#include <optional>

#include "fvp/ac.hpp"
#include "fvp/term.hpp"

namespace fvp {

class StepLimitError : public std::runtime_error {
 public:
  explicit StepLimitError(const std::string& what)
      : std::runtime_error("step limit exceeded: " + what) {}
};

enum class RuleOrigin : uint8_t { User, Generated, Rdown, Identity };

struct RewriteRule {
  Term lhs;
  Term rhs;
  RuleOrigin origin = RuleOrigin::Generated;

  RewriteRule() = default;
  RewriteRule(Term l, Term r, RuleOrigin o = RuleOrigin::Generated)
      : lhs(std::move(l)), rhs(std::move(r)), origin(o) {}

  bool is_identity() const { return lhs == rhs; }
  RewriteRule reversed() const { return RewriteRule(rhs, lhs, origin); }

  /// Both sides renumbered jointly (lhs first), giving the canonical
  /// representative used for deduplication modulo variable renaming.
  RewriteRule renumbered() const;
};

int compare_rules(const RewriteRule& a, const RewriteRule& b);

/// Ordered set of rules, deduplicated modulo variable renaming (syntactic).
class RewriteSystem {
 public:
  RewriteSystem() = default;

  /// Inserts the canonical renumbering of the rule; returns false when an
  /// equal rule (modulo renaming) is already present.
  bool add(const RewriteRule& r);
  bool contains(const RewriteRule& r) const;

  const std::vector<RewriteRule>& rules() const { return rules_; }
  size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }

  void sort_canonical();
  RewriteSystem sorted() const;

 private:
  std::vector<RewriteRule> rules_;
  std::set<std::pair<size_t, size_t>> index_;  // (lhs hash, rhs hash)
  bool find_dup(const RewriteRule& canon) const;
};

struct RewriteStep {
  Term result;
  size_t rule_index;
  Position pos;
};

/// One-step results of the position-based relation ->_{E,R}: for each
/// position p of t and rule l -> r, every matcher of l against t|p modulo E.
std::vector<RewriteStep> rewrite_steps(const Term& t, const RewriteSystem& rs,
                                       const EDown& e,
                                       const AcLimits& limits = {});

/// One-step results of the class relation =_E o ->_R o =_E, up to E-equality
/// (results are AC-canonical). Enumerated through extended AC matching with
/// an extension slot at every AC root instead of materializing classes.
std::vector<Term> class_rewrite_steps(const Term& t, const RewriteSystem& rs,
                                      const EDown& e,
                                      const AcLimits& limits = {});

/// First class-rewrite result under the deterministic strategy (leftmost
/// innermost, rules in declaration order), or nullopt when irreducible.
std::optional<Term> class_rewrite_once(const Term& t, const RewriteSystem& rs,
                                       const EDown& e,
                                       const AcLimits& limits = {});

/// Exhaustive normalisation (leftmost-innermost, declaration-order rule
/// priority). `max_steps` guards non order-admitted systems.
Term normal_form(const Term& t, const RewriteSystem& rdown, const EDown& e,
                 size_t max_steps = 10000, const AcLimits& limits = {});

/// Like normal_form but through the class relation (used by saturation).
Term class_normal_form(const Term& t, const RewriteSystem& rdown,
                       const EDown& e, size_t max_steps = 10000,
                       const AcLimits& limits = {});

/// True when neither t nor any subterm admits a rewrite step.
bool is_irreducible(const Term& t, const RewriteSystem& rdown, const EDown& e,
                    const AcLimits& limits = {});

/// Irreducibility through the class relation.
bool is_class_irreducible(const Term& t, const RewriteSystem& rdown,
                          const EDown& e, const AcLimits& limits = {});

}  // namespace fvp
