#pragma once

#include <set>
#include <vector>

#include "fvp/term.hpp"

namespace fvp {

class ResourceLimitError : public std::runtime_error {
 public:
  explicit ResourceLimitError(const std::string& what)
      : std::runtime_error("resource limit exceeded: " + what) {}
};

/// E-down: the per-symbol AC theory used for matching and normalisation.
/// An empty set encodes the empty theory.
class EDown {
 public:
  EDown() = default;
  explicit EDown(std::set<SymbolId> ac_symbols) : ac_(std::move(ac_symbols)) {}
  bool is_ac(SymbolId f) const { return ac_.count(f) != 0; }
  bool empty() const { return ac_.empty(); }
  const std::set<SymbolId>& ac_symbols() const { return ac_; }

 private:
  std::set<SymbolId> ac_;
};

/// Caps for the unification / matching search.
struct AcLimits {
  size_t max_basis = 10000;
  size_t max_solutions = 200000;
  size_t max_nodes = 2000000;  // search steps
};

/// Flattens nested applications of each AC symbol into a right comb over the
/// sorted argument multiset. Idempotent; t =_AC s iff canonical forms equal.
Term ac_canonical(const Term& t, const EDown& e);

bool eq_mod(const Term& t, const Term& s, const EDown& e);

/// Same root symbol and arguments pairwise =_E (atoms: plain equality).
bool strict_eq_mod(const Term& t, const Term& s, const EDown& e);

/// Arguments of t under AC symbol f, nested occurrences flattened.
void flatten(const Term& t, SymbolId f, std::vector<Term>& out);
/// Right comb f(a1, f(a2, ... )) over args as given; args must be non-empty.
Term build_comb(SymbolId f, const std::vector<Term>& args);

/// Homogeneous linear Diophantine system A v = 0 over non-negative integers.
struct DioSystem {
  // one inner vector per equation; columns are variables
  std::vector<std::vector<int64_t>> rows;
};

/// Complete set of componentwise-minimal non-zero non-negative solutions
/// (Contejean–Devie).
std::vector<std::vector<uint32_t>> dio_minimal_basis(const DioSystem& sys,
                                                     size_t max_basis = 10000);

/// One unification problem: a conjunction of term pairs solved simultaneously.
using PairList = std::vector<std::pair<Term, Term>>;

struct UnifyOptions {
  AcLimits limits;
  bool minimize = true;        // drop E-instances of other unifiers
  FreshSource* fresh = nullptr;  // source for fresh variables (required when
                                 // AC symbols are involved); when null an
                                 // internal source starting beyond the
                                 // problem's variables is used
};

/// Complete set of E-unifiers of the simultaneous problem, each restricted to
/// the problem's variables plus fresh variables occurring in images.
std::vector<Substitution> unify_mod(const PairList& problem, const EDown& e,
                                    const UnifyOptions& opts = {});
std::vector<Substitution> unify_mod(const Term& t, const Term& s,
                                    const EDown& e,
                                    const UnifyOptions& opts = {});

/// Complete set of matchers: dom(sigma) within vars(pattern), pattern·sigma
/// =_E subject. Subject variables are frozen (treated as constants). The
/// caller must keep pattern and subject variables disjoint.
std::vector<Substitution> match_mod(const PairList& problem, const EDown& e,
                                    const UnifyOptions& opts = {});
std::vector<Substitution> match_mod(const Term& pattern, const Term& subject,
                                    const EDown& e,
                                    const UnifyOptions& opts = {});

/// True when some matcher maps `general` onto `instance` modulo E, i.e.
/// instance is an E-instance of general.
bool is_instance_mod(const Term& instance, const Term& general, const EDown& e,
                     const UnifyOptions& opts = {});

}  // namespace fvp
