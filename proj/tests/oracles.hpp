#pragma once

#include <random>

#include "fvp/ac.hpp"
#include "fvp/term.hpp"

namespace fvp::test {

/// AC equality decided independently of ac_canonical: recursive multiset
/// matching with backtracking.
bool naive_ac_eq(const Term& t, const Term& s, const EDown& e);

/// Unique syntactic matcher of pattern against subject, if any.
std::optional<Substitution> match_syntactic(const Term& pattern,
                                            const Term& subject);

/// Terms reachable from t by at most `depth` single
/// associativity/commutativity steps (any position, both directions).
std::vector<Term> ac_step_closure(const Term& t, const EDown& e, size_t depth,
                                  size_t max_terms = 20000);

/// Bidirectional closure under the given equations (both orientations, via
/// syntactic matching) plus single A/C steps; the brute-force =_E oracle.
/// Returns true when s is reached from t within the bounds.
bool eq_closure_reaches(const Term& t, const Term& s,
                        const std::vector<std::pair<Term, Term>>& eqs,
                        const EDown& e, size_t depth, size_t max_terms = 60000,
                        uint32_t max_weight = 24);

/// All terms reachable (the closure itself), for min-representative oracles.
std::vector<Term> eq_closure(const Term& t,
                             const std::vector<std::pair<Term, Term>>& eqs,
                             const EDown& e, size_t depth,
                             size_t max_terms = 60000,
                             uint32_t max_weight = 24);

/// All ground terms of weight <= max_weight over the given symbols.
std::vector<Term> enumerate_ground_terms(const Signature& sig,
                                         const std::vector<SymbolId>& symbols,
                                         uint32_t max_weight);

/// Random term generator over a signature subset plus a few variables.
class TermGen {
 public:
  TermGen(const Signature& sig, std::vector<SymbolId> symbols, size_t num_vars,
          uint32_t seed)
      : sig_(sig), symbols_(std::move(symbols)), num_vars_(num_vars), rng_(seed) {}

  Term gen(uint32_t max_weight);

 private:
  const Signature& sig_;
  std::vector<SymbolId> symbols_;
  size_t num_vars_;
  std::mt19937 rng_;
};

}  // namespace fvp::test
