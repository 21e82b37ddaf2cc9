#pragma once

#include <chrono>
#include <functional>
#include <string>

#include "fvp/order.hpp"
#include "fvp/rewrite.hpp"

namespace fvp {

struct GenerationConfig {
  size_t max_loop_iterations = 50;
  size_t max_total_rules = 2'000'000;
  size_t max_restarts = 8;
  std::chrono::milliseconds wall_clock_budget = std::chrono::minutes(30);
  bool enable_var = true;
  bool enable_ord = true;
  bool enable_cleanup = true;
  OrderSpec order_spec;
  size_t workers = 1;
  AcLimits limits;
  size_t normalize_step_cap = 100000;  // per-normalisation transformation cap
};

enum class GenStatus { Completed, Inconclusive };

struct GenerationStats {
  size_t rules_generated_total = 0;
  size_t final_count = 0;
  size_t restarts = 0;
  bool convergent = false;
  double wall_seconds = 0.0;
};

struct GenerationResult {
  RewriteSystem final_r;
  RewriteSystem final_rdown;
  GenStatus status = GenStatus::Inconclusive;
  std::string reason;  // set when Inconclusive
  GenerationStats stats;
};

/// Rules merging two overlapping rules at position p of rule1's rhs:
/// { l1·s -> (r1·s)[r2·s]_p | s in mgu_E(r1|p, l2) }. Empty when p is not a
/// position of r1 or r1|p is a variable. rule2 is renamed apart internally.
std::vector<RewriteRule> overlaps(const RewriteRule& rule1, const Position& p,
                                  const RewriteRule& rule2, const EDown& e,
                                  const AcLimits& limits = {});

/// overlaps() plus the opposite orientation of every produced rule.
std::vector<RewriteRule> overlaps_eq(const RewriteRule& rule1,
                                     const Position& p,
                                     const RewriteRule& rule2, const EDown& e,
                                     const AcLimits& limits = {});

struct NormalizeOutcome {
  RewriteSystem rules;
  std::vector<RewriteRule> promotions;  // orientable rules not yet in rdown
};

/// Fixpoint of NormR / NormL / Eq / Sub (plus Var and Ord when enabled).
/// When collect_promotions is set, rules whose lhs is strictly greater than
/// their rhs and which are not already in rdown are reported.
NormalizeOutcome normalize_rules(const RewriteSystem& rs,
                                 const RewriteSystem& rdown, const EDown& e,
                                 const Signature& sig,
                                 const GenerationConfig& cfg,
                                 bool collect_promotions = false);

/// Algorithm: generic generation of rewrite theories, with the Var/Ord
/// optimisations, rdown promotion with restart, and final cleanup.
GenerationResult gen_extended(const std::vector<std::pair<Term, Term>>& eqs,
                              const RewriteSystem& rdown0, const EDown& e,
                              Signature& sig, const GenerationConfig& cfg);

/// Removes rules subsumed modulo Ea: drops s'->r' when another rule s->r
/// admits alpha with s·alpha strictly-equal-mod-Ea s' and r·alpha =_Ea r'.
/// The callbacks decide Ea-matching; see variant.hpp for the nested case.
using EaMatcher = std::function<std::vector<Substitution>(const PairList&)>;
RewriteSystem cleanup(const RewriteSystem& rs, const EaMatcher& ea_match);
/// Cleanup with Ea = E-down.
RewriteSystem cleanup_mod_edown(const RewriteSystem& rs, const EDown& e,
                                const AcLimits& limits = {});

/// True when every non-identity rule l -> r satisfies compare(l, r) = Greater.
bool check_convergence(const RewriteSystem& rs, const OrderSpec& spec,
                       const EDown& e, const Signature& sig);

}  // namespace fvp
