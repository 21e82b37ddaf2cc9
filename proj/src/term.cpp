#include "fvp/term.hpp"

#include <algorithm>
#include <functional>

namespace fvp {

SymbolId Signature::add(std::string name, uint32_t arity, bool ac) {
  if (ac && arity != 2)
    throw SignatureError("AC symbol '" + name + "' must be binary");
  if (by_name_.count(name))
    throw SignatureError("duplicate symbol '" + name + "'");
  SymbolId id = static_cast<SymbolId>(symbols_.size());
  symbols_.push_back(Symbol{name, arity, ac});
  by_name_.emplace(std::move(name), id);
  if (arity == 0 && !min_const_) min_const_ = id;
  return id;
}

SymbolId Signature::ensure_min_constant() {
  if (min_const_) return *min_const_;
  SymbolId id = add("a_min", 0, false);
  reserved_min_ = true;
  min_const_ = id;
  return id;
}

std::optional<SymbolId> Signature::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

namespace {

size_t mix(size_t h, size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::shared_ptr<const detail::TermNode> make_node(detail::Kind kind,
                                                  uint32_t id, bool mark,
                                                  std::vector<Term> children) {
  auto n = std::make_shared<detail::TermNode>();
  n->kind = kind;
  n->id = id;
  n->eval_mark = mark;
  n->children = std::move(children);
  size_t h = mix(static_cast<size_t>(kind) * 31 + (mark ? 7 : 0), id);
  uint32_t w = kind == detail::Kind::Var ? 0 : 1;
  bool ground = kind != detail::Kind::Var;
  bool has_mark = mark;
  for (const Term& c : n->children) {
    h = mix(h, c.hash());
    w += c.weight();
    ground = ground && c.ground();
    has_mark = has_mark || c.has_mark();
  }
  n->hash = h;
  n->weight = w;
  n->ground = ground;
  n->has_mark = has_mark;
  return n;
}

struct TermAccess;

}  // namespace

Term Term::var(VarId v) {
  Term t;
  t.node_ = make_node(detail::Kind::Var, v, false, {});
  return t;
}

Term Term::name(NameId n) {
  Term t;
  t.node_ = make_node(detail::Kind::Name, n, false, {});
  return t;
}

Term Term::app(SymbolId f, std::vector<Term> children, bool eval_mark) {
  Term t;
  t.node_ = make_node(detail::Kind::App, f, eval_mark, std::move(children));
  return t;
}

bool Term::operator==(const Term& o) const {
  if (node_ == o.node_) return true;
  if (!node_ || !o.node_) return false;
  if (node_->hash != o.node_->hash || node_->kind != o.node_->kind ||
      node_->id != o.node_->id || node_->eval_mark != o.node_->eval_mark ||
      node_->children.size() != o.node_->children.size())
    return false;
  for (size_t i = 0; i < node_->children.size(); ++i)
    if (!(node_->children[i] == o.node_->children[i])) return false;
  return true;
}

int compare_syntactic(const Term& a, const Term& b) {
  if (a.raw() == b.raw()) return 0;
  auto rank = [](const Term& t) {
    return t.is_var() ? 0 : t.is_name() ? 1 : 2;
  };
  if (rank(a) != rank(b)) return rank(a) < rank(b) ? -1 : 1;
  if (a.is_var()) return a.var_id() < b.var_id() ? -1 : a.var_id() > b.var_id() ? 1 : 0;
  if (a.is_name())
    return a.name_id() < b.name_id() ? -1 : a.name_id() > b.name_id() ? 1 : 0;
  if (a.sym() != b.sym()) return a.sym() < b.sym() ? -1 : 1;
  if (a.children().size() != b.children().size())
    return a.children().size() < b.children().size() ? -1 : 1;
  for (size_t i = 0; i < a.children().size(); ++i) {
    int c = compare_syntactic(a.children()[i], b.children()[i]);
    if (c != 0) return c;
  }
  if (a.eval_mark() != b.eval_mark()) return a.eval_mark() ? 1 : -1;
  return 0;
}

Term subterm_at(const Term& t, const Position& p) {
  Term cur = t;
  for (uint32_t i : p) {
    if (!cur.is_app() || i == 0 || i > cur.children().size())
      throw InvalidPositionError();
    cur = cur.children()[i - 1];
  }
  return cur;
}

Term replace_at(const Term& t, const Position& p, const Term& u) {
  std::function<Term(const Term&, size_t)> go = [&](const Term& cur,
                                                    size_t depth) -> Term {
    if (depth == p.size()) return u;
    uint32_t i = p[depth];
    if (!cur.is_app() || i == 0 || i > cur.children().size())
      throw InvalidPositionError();
    std::vector<Term> kids = cur.children();
    kids[i - 1] = go(kids[i - 1], depth + 1);
    return Term::app(cur.sym(), std::move(kids), cur.eval_mark());
  };
  return go(t, 0);
}

namespace {
void positions_rec(const Term& t, Position& cur, bool skip_vars,
                   std::vector<Position>& out) {
  if (!skip_vars || !t.is_var()) out.push_back(cur);
  if (t.is_app()) {
    for (uint32_t i = 0; i < t.children().size(); ++i) {
      cur.push_back(i + 1);
      positions_rec(t.children()[i], cur, skip_vars, out);
      cur.pop_back();
    }
  }
}
}  // namespace

std::vector<Position> positions(const Term& t) {
  std::vector<Position> out;
  Position cur;
  positions_rec(t, cur, false, out);
  return out;
}

std::vector<Position> non_var_positions(const Term& t) {
  std::vector<Position> out;
  Position cur;
  positions_rec(t, cur, true, out);
  return out;
}

bool is_strict_subterm(const Term& s, const Term& t) {
  if (!t.is_app()) return false;
  for (const Term& c : t.children())
    if (c == s || is_strict_subterm(s, c)) return true;
  return false;
}

void collect_vars(const Term& t, std::map<VarId, uint32_t>& counts) {
  if (t.is_var()) {
    counts[t.var_id()]++;
  } else if (t.is_app()) {
    for (const Term& c : t.children()) collect_vars(c, counts);
  }
}

std::vector<VarId> vars_of(const Term& t) {
  std::map<VarId, uint32_t> counts;
  collect_vars(t, counts);
  std::vector<VarId> out;
  out.reserve(counts.size());
  for (auto& [v, _] : counts) out.push_back(v);
  return out;
}

std::vector<NameId> names_of(const Term& t) {
  std::vector<NameId> out;
  std::function<void(const Term&)> go = [&](const Term& u) {
    if (u.is_name()) {
      if (std::find(out.begin(), out.end(), u.name_id()) == out.end())
        out.push_back(u.name_id());
    } else if (u.is_app()) {
      for (const Term& c : u.children()) go(c);
    }
  };
  go(t);
  return out;
}

void Substitution::bind(VarId v, const Term& t) {
  if (t.is_var() && t.var_id() == v) {
    map_.erase(v);
    return;
  }
  map_[v] = t;
}

const Term* Substitution::lookup(VarId v) const {
  auto it = map_.find(v);
  return it == map_.end() ? nullptr : &it->second;
}

Term Substitution::apply(const Term& t) const {
  if (map_.empty()) return t;
  if (t.is_var()) {
    const Term* b = lookup(t.var_id());
    return b ? *b : t;
  }
  if (!t.is_app() || t.ground()) return t;
  std::vector<Term> kids;
  kids.reserve(t.children().size());
  bool changed = false;
  for (const Term& c : t.children()) {
    kids.push_back(apply(c));
    changed = changed || !(kids.back() == c);
  }
  if (!changed) return t;
  return Term::app(t.sym(), std::move(kids), t.eval_mark());
}

Substitution Substitution::then(const Substitution& s) const {
  Substitution out;
  for (auto& [v, t] : map_) out.bind(v, s.apply(t));
  for (auto& [v, t] : s.map_)
    if (!map_.count(v)) out.bind(v, t);
  return out;
}

Substitution Substitution::restrict(const std::vector<VarId>& vars) const {
  Substitution out;
  for (VarId v : vars) {
    const Term* b = lookup(v);
    if (b) out.bind(v, *b);
  }
  return out;
}

bool Substitution::operator==(const Substitution& o) const {
  if (map_.size() != o.map_.size()) return false;
  auto it = o.map_.begin();
  for (auto& [v, t] : map_) {
    if (it->first != v || !(it->second == t)) return false;
    ++it;
  }
  return true;
}

Term mark_evaluate(const Term& t) {
  if (!t.is_app()) return t;
  std::vector<Term> kids;
  kids.reserve(t.children().size());
  for (const Term& c : t.children()) kids.push_back(mark_evaluate(c));
  return Term::app(t.sym(), std::move(kids), true);
}

Term strip_marks(const Term& t) {
  if (!t.is_app() || !t.has_mark()) return t;
  std::vector<Term> kids;
  kids.reserve(t.children().size());
  for (const Term& c : t.children()) kids.push_back(strip_marks(c));
  return Term::app(t.sym(), std::move(kids), false);
}

bool te_layering_ok(const Term& t) {
  if (!t.is_app()) return true;
  if (t.eval_mark()) {
    for (const Term& c : t.children())
      if (!te_layering_ok(c)) return false;
    return true;
  }
  return !t.has_mark();
}

Term renumber_vars(const Term& t, std::map<VarId, VarId>& map) {
  if (t.is_var()) {
    auto it = map.find(t.var_id());
    if (it == map.end())
      it = map.emplace(t.var_id(), static_cast<VarId>(map.size())).first;
    return Term::var(it->second);
  }
  if (!t.is_app()) return t;
  std::vector<Term> kids;
  kids.reserve(t.children().size());
  for (const Term& c : t.children()) kids.push_back(renumber_vars(c, map));
  return Term::app(t.sym(), std::move(kids), t.eval_mark());
}

std::string to_string(const Term& t, const Signature& sig,
                      const PrintNames& names) {
  if (t.is_var()) {
    if (names.vars) {
      auto it = names.vars->find(t.var_id());
      if (it != names.vars->end()) return it->second;
    }
    return "x" + std::to_string(t.var_id());
  }
  if (t.is_name()) return "@n" + std::to_string(t.name_id());
  std::string s = sig.symbol(t.sym()).name;
  if (t.eval_mark()) s += "!";
  if (t.children().empty()) return s;
  s += "(";
  for (size_t i = 0; i < t.children().size(); ++i) {
    if (i) s += ",";
    s += to_string(t.children()[i], sig, names);
  }
  s += ")";
  return s;
}

}  // namespace fvp
