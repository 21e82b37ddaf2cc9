#pragma once

#include <memory>

#include "fvp/order.hpp"
#include "fvp/rewrite.hpp"

namespace fvp {

/// The tuple (>, R, Rdown, E-down, Ea). Ea is either E-down itself (ea ==
/// nullptr) or a nested theory deciding equality/unification modulo Ea
/// (recursion depth 1).
struct RewriteTheory {
  Signature sig;
  OrderSpec::Kind order_kind = OrderSpec::CountOrder;
  RewriteSystem r;
  RewriteSystem rdown;
  EDown edown;
  std::shared_ptr<const RewriteTheory> ea;
  AcLimits limits;

  bool ea_is_edown() const { return ea == nullptr; }
  OrderSpec order_spec() const {
    OrderSpec s;
    s.kind = order_kind;
    s.base = order_kind == OrderSpec::ComposedOrder ? &rdown : nullptr;
    return s;
  }
};

/// S1 + S3 of the rewrite-theory definition: identity rules present for every
/// signature symbol, vars(rhs) within vars(lhs) for every rule. Throws.
void validate_theory(const RewriteTheory& th);

struct Variant {
  Term term;
  Substitution theta;
};

/// All close evaluations of a TE-term (the term must satisfy TE layering).
std::vector<Term> close_eval(const Term& t, const RewriteTheory& th);

struct OpenEvalResult {
  std::vector<Term> terms;
  Substitution sigma;
};

/// All open evaluations of a sequence of TE-terms.
std::vector<OpenEvalResult> open_eval(const std::vector<Term>& list,
                                      const RewriteTheory& th);

/// Complete set of E-variants of t modulo Ea, deduplicated modulo Ea plus
/// canonical variable renaming.
std::vector<Variant> variants(const Term& t, const RewriteTheory& th);

bool eq_modulo_e(const Term& t, const Term& s, const RewriteTheory& th);

struct EUnifyOptions {
  bool minimize_ea = true;    // drop Ea-instances of other unifiers
  bool minimize_full = false; // drop E-instances (costly, uses E-matching)
};

/// Complete set of E-unifiers of t and s.
std::vector<Substitution> e_unify(const Term& t, const Term& s,
                                  const RewriteTheory& th,
                                  const EUnifyOptions& opts = {});

/// Complete E-matching: substitutions over the patterns' variables sending
/// each pattern onto its subject modulo E. Subject variables are frozen.
std::vector<Substitution> e_match(const PairList& problem,
                                  const RewriteTheory& th);

/// Equality, matching and unification modulo the theory's Ea.
bool ea_equal(const Term& t, const Term& s, const RewriteTheory& th);
std::vector<Substitution> ea_match(const PairList& problem,
                                   const RewriteTheory& th);
std::vector<Substitution> ea_unify(const PairList& problem,
                                   const RewriteTheory& th);

}  // namespace fvp
