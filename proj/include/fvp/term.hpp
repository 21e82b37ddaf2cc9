#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fvp {

using SymbolId = uint32_t;
using VarId = uint32_t;
using NameId = uint32_t;

struct Symbol {
  std::string name;
  uint32_t arity = 0;
  bool ac = false;
};

class SignatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ranked alphabet. Symbol ids are dense indices in declaration order.
/// A distinguished minimal constant is always available: the first declared
/// constant if any, otherwise a reserved constant "a_min" appended on demand.
class Signature {
 public:
  SymbolId add(std::string name, uint32_t arity, bool ac = false);
  SymbolId ensure_min_constant();  // appends "a_min" if no constant declared

  const Symbol& symbol(SymbolId id) const { return symbols_.at(id); }
  std::optional<SymbolId> find(const std::string& name) const;
  size_t size() const { return symbols_.size(); }

  // Minimal constant if one exists (first declared constant, or the reserved
  // one once ensure_min_constant has run).
  std::optional<SymbolId> min_constant() const { return min_const_; }
  bool has_reserved_min() const { return reserved_min_; }

 private:
  std::vector<Symbol> symbols_;
  std::map<std::string, SymbolId> by_name_;
  std::optional<SymbolId> min_const_;
  bool reserved_min_ = false;
};

class Term;
using Position = std::vector<uint32_t>;  // 1-based child indices, empty = root

namespace detail {
enum class Kind : uint8_t { Var, Name, App };

struct TermNode {
  Kind kind;
  bool eval_mark = false;  // TE mark, only meaningful on App nodes
  uint32_t id = 0;         // VarId / NameId / SymbolId
  uint32_t weight = 0;     // #function symbols + #names in the subtree
  size_t hash = 0;
  bool ground = true;
  bool has_mark = false;  // any TE mark in the subtree
  std::vector<Term> children;
};
}  // namespace detail

class InvalidPositionError : public std::runtime_error {
 public:
  InvalidPositionError() : std::runtime_error("invalid position") {}
};

/// Immutable first-order term with structural sharing. Cheap to copy.
class Term {
 public:
  Term() = default;  // empty handle; only valid after assignment

  static Term var(VarId v);
  static Term name(NameId n);
  static Term app(SymbolId f, std::vector<Term> children, bool eval_mark = false);

  bool is_var() const { return node_->kind == detail::Kind::Var; }
  bool is_name() const { return node_->kind == detail::Kind::Name; }
  bool is_app() const { return node_->kind == detail::Kind::App; }
  bool valid() const { return node_ != nullptr; }

  VarId var_id() const { return node_->id; }
  NameId name_id() const { return node_->id; }
  SymbolId sym() const { return node_->id; }
  const std::vector<Term>& children() const { return node_->children; }
  bool eval_mark() const { return node_->eval_mark; }
  bool has_mark() const { return node_->has_mark; }
  bool ground() const { return node_->ground; }

  // #function symbols + #names (the count measure of the ordering).
  uint32_t weight() const { return node_->weight; }
  size_t hash() const { return node_->hash; }

  bool operator==(const Term& o) const;
  bool operator!=(const Term& o) const { return !(*this == o); }

  // Identity of the shared node, usable as a memoization key.
  const void* raw() const { return node_.get(); }

 private:
  explicit Term(std::shared_ptr<const detail::TermNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::TermNode> node_;
};

/// Total syntactic order on terms: Var < Name < App, then ids, then symbol,
/// then children lexicographically. Marks compare after structure.
int compare_syntactic(const Term& a, const Term& b);
struct TermLess {
  bool operator()(const Term& a, const Term& b) const {
    return compare_syntactic(a, b) < 0;
  }
};

Term subterm_at(const Term& t, const Position& p);
Term replace_at(const Term& t, const Position& p, const Term& u);

/// All positions of t in preorder (root first).
std::vector<Position> positions(const Term& t);
/// Positions whose subterm is not a variable.
std::vector<Position> non_var_positions(const Term& t);

bool is_strict_subterm(const Term& s, const Term& t);  // syntactic

void collect_vars(const Term& t, std::map<VarId, uint32_t>& counts);
std::vector<VarId> vars_of(const Term& t);
std::vector<NameId> names_of(const Term& t);

/// Finite map from variables to terms; identity bindings are never stored.
/// apply() is a single simultaneous replacement.
class Substitution {
 public:
  Substitution() = default;

  void bind(VarId v, const Term& t);
  const Term* lookup(VarId v) const;
  bool empty() const { return map_.empty(); }
  size_t size() const { return map_.size(); }
  const std::map<VarId, Term>& bindings() const { return map_; }

  Term apply(const Term& t) const;

  /// Composition: x(this.then(s)) == s.apply(this.apply(x)).
  Substitution then(const Substitution& s) const;
  /// Restriction of the domain to the given variables.
  Substitution restrict(const std::vector<VarId>& vars) const;

  bool operator==(const Substitution& o) const;

 private:
  std::map<VarId, Term> map_;
};

/// Marks every App node of t as to-evaluate. The TE layering invariant holds
/// by construction: a mark is only placed on nodes whose ancestors are marked.
Term mark_evaluate(const Term& t);
Term strip_marks(const Term& t);
bool te_layering_ok(const Term& t);

/// Counter-based fresh variable/name source.
class FreshSource {
 public:
  explicit FreshSource(VarId first_var = 0, NameId first_name = 0)
      : next_var_(first_var), next_name_(first_name) {}
  VarId fresh_var() { return next_var_++; }
  NameId fresh_name() { return next_name_++; }
  VarId peek_var() const { return next_var_; }
  void reserve_vars(VarId at_least) {
    if (next_var_ < at_least) next_var_ = at_least;
  }

 private:
  VarId next_var_;
  NameId next_name_;
};

/// Rebuilds t with variables renumbered v0,v1,... in preorder of first
/// occurrence; `map` accumulates across calls so several terms can share one
/// renumbering (e.g. both sides of a rule).
Term renumber_vars(const Term& t, std::map<VarId, VarId>& map);

/// Printing. Variable names resolve through `var_names` when provided,
/// falling back to x<i>; names print as @n<i>.
struct PrintNames {
  const std::map<VarId, std::string>* vars = nullptr;
};
std::string to_string(const Term& t, const Signature& sig,
                      const PrintNames& names = {});

}  // namespace fvp
