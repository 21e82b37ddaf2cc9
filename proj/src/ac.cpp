#include "fvp/ac.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>

namespace fvp {

void flatten(const Term& t, SymbolId f, std::vector<Term>& out) {
  if (t.is_app() && t.sym() == f && !t.eval_mark()) {
    for (const Term& c : t.children()) flatten(c, f, out);
  } else {
    out.push_back(t);
  }
}

Term build_comb(SymbolId f, const std::vector<Term>& args) {
  if (args.empty()) throw std::logic_error("build_comb: empty argument list");
  Term acc = args.back();
  for (size_t i = args.size() - 1; i-- > 0;)
    acc = Term::app(f, {args[i], acc});
  return acc;
}

Term ac_canonical(const Term& t, const EDown& e) {
  if (!t.is_app()) return t;
  std::vector<Term> kids;
  kids.reserve(t.children().size());
  for (const Term& c : t.children()) kids.push_back(ac_canonical(c, e));
  if (!e.is_ac(t.sym()) || t.eval_mark())
    return Term::app(t.sym(), std::move(kids), t.eval_mark());
  std::vector<Term> args;
  for (const Term& k : kids) flatten(k, t.sym(), args);
  std::sort(args.begin(), args.end(), TermLess{});
  return build_comb(t.sym(), args);
}

bool eq_mod(const Term& t, const Term& s, const EDown& e) {
  if (t == s) return true;
  if (e.empty()) return false;
  if (t.weight() != s.weight()) return false;
  return ac_canonical(t, e) == ac_canonical(s, e);
}

bool strict_eq_mod(const Term& t, const Term& s, const EDown& e) {
  if (!t.is_app() || !s.is_app()) return t == s;
  if (t.sym() != s.sym() || t.eval_mark() != s.eval_mark()) return false;
  for (size_t i = 0; i < t.children().size(); ++i)
    if (!eq_mod(t.children()[i], s.children()[i], e)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Contejean–Devie minimal solutions of A v = 0, v >= 0, v != 0.

namespace {

bool dominates(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
  // true when a >= b componentwise
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] < b[i]) return false;
  return true;
}

}  // namespace

std::vector<std::vector<uint32_t>> dio_minimal_basis(const DioSystem& sys,
                                                     size_t max_basis) {
  const size_t rows = sys.rows.size();
  if (rows == 0) return {};
  const size_t cols = sys.rows[0].size();
  auto defect = [&](const std::vector<uint32_t>& v) {
    std::vector<int64_t> d(rows, 0);
    for (size_t r = 0; r < rows; ++r)
      for (size_t c = 0; c < cols; ++c)
        d[r] += sys.rows[r][c] * static_cast<int64_t>(v[c]);
    return d;
  };

  std::vector<std::vector<uint32_t>> sols;
  std::vector<std::vector<uint32_t>> frontier;
  std::set<std::vector<uint32_t>> seen;
  for (size_t j = 0; j < cols; ++j) {
    std::vector<uint32_t> e(cols, 0);
    e[j] = 1;
    frontier.push_back(e);
    seen.insert(std::move(e));
  }
  size_t steps = 0;
  while (!frontier.empty()) {
    std::vector<std::vector<uint32_t>> next;
    for (const auto& v : frontier) {
      if (++steps > max_basis * 200)
        throw ResourceLimitError("diophantine search");
      auto d = defect(v);
      bool zero = std::all_of(d.begin(), d.end(), [](int64_t x) { return x == 0; });
      if (zero) {
        bool minimal = true;
        for (const auto& s : sols)
          if (dominates(v, s)) {
            minimal = false;
            break;
          }
        if (minimal) {
          sols.push_back(v);
          if (sols.size() > max_basis)
            throw ResourceLimitError("diophantine basis size");
        }
        continue;
      }
      for (size_t j = 0; j < cols; ++j) {
        // increase x_j only if it moves the defect toward zero
        int64_t dot = 0;
        for (size_t r = 0; r < rows; ++r) dot += d[r] * sys.rows[r][j];
        if (dot >= 0) continue;
        auto w = v;
        w[j] += 1;
        bool dominated = false;
        for (const auto& s : sols)
          if (dominates(w, s)) {
            dominated = true;
            break;
          }
        if (dominated || seen.count(w)) continue;
        seen.insert(w);
        next.push_back(std::move(w));
      }
    }
    frontier = std::move(next);
  }
  std::sort(sols.begin(), sols.end());
  return sols;
}

// ---------------------------------------------------------------------------
// AC unification: variable abstraction + Diophantine basis + subset selection.

namespace {

// column of the per-symbol Diophantine slice
struct SliceCol {
  bool is_abstraction;
  VarId var;   // original variable (when !is_abstraction)
  Term atom;   // abstracted rigid atom (when is_abstraction)
  int64_t lhs_coeff = 0;
  int64_t rhs_coeff = 0;
};

struct Solver {
  const EDown& e;
  const AcLimits& limits;
  FreshSource fresh;
  size_t nodes = 0;
  std::vector<Substitution> out;

  Solver(const EDown& e_, const AcLimits& lim, VarId first_fresh)
      : e(e_), limits(lim), fresh(first_fresh) {}

  void tick() {
    if (++nodes > limits.max_nodes) throw ResourceLimitError("unification search");
  }

  void emit(const Substitution& sigma) {
    if (out.size() >= limits.max_solutions)
      throw ResourceLimitError("unifier count");
    out.push_back(sigma);
  }

  static bool occurs(VarId v, const Term& t) {
    if (t.is_var()) return t.var_id() == v;
    if (!t.is_app()) return false;
    for (const Term& c : t.children())
      if (occurs(v, c)) return true;
    return false;
  }

  void solve(PairList eqs, Substitution sigma) {
    tick();
    while (true) {
      if (eqs.empty()) {
        emit(sigma);
        return;
      }
      // prefer a non AC/AC equation to propagate bindings cheaply
      size_t pick = eqs.size();
      for (size_t i = 0; i < eqs.size(); ++i) {
        const Term a = sigma.apply(eqs[i].first);
        const Term b = sigma.apply(eqs[i].second);
        eqs[i] = {a, b};
        bool acac = a.is_app() && b.is_app() && a.sym() == b.sym() &&
                    e.is_ac(a.sym());
        if (!acac && pick == eqs.size()) pick = i;
      }
      if (pick == eqs.size()) pick = 0;
      auto [t, s] = eqs[pick];
      eqs.erase(eqs.begin() + pick);

      if (t == s) continue;
      if (t.is_var() || s.is_var()) {
        if (!t.is_var()) std::swap(t, s);
        if (occurs(t.var_id(), s)) return;  // no unifier modulo AC either
        Substitution b;
        b.bind(t.var_id(), s);
        sigma = sigma.then(b);
        continue;
      }
      if (t.is_name() || s.is_name()) return;  // distinct atoms
      if (t.sym() != s.sym() || t.eval_mark() != s.eval_mark()) return;
      if (!e.is_ac(t.sym())) {
        for (size_t i = 0; i < t.children().size(); ++i)
          eqs.emplace_back(t.children()[i], s.children()[i]);
        continue;
      }
      solve_ac(t, s, std::move(eqs), std::move(sigma));
      return;
    }
  }

  void solve_ac(const Term& t, const Term& s, PairList rest, Substitution sigma) {
    tick();
    const SymbolId f = t.sym();
    std::vector<Term> lhs, rhs;
    flatten(t, f, lhs);
    flatten(s, f, rhs);

    // multisets keyed by AC-canonical form
    struct Entry {
      Term rep;  // first representative (syntactic)
      uint32_t count = 0;
    };
    auto group = [&](const std::vector<Term>& args) {
      std::map<Term, Entry, TermLess> m;
      for (const Term& a : args) {
        Term key = ac_canonical(a, e);
        auto it = m.find(key);
        if (it == m.end())
          m.emplace(key, Entry{a, 1});
        else
          it->second.count++;
      }
      return m;
    };
    auto L = group(lhs);
    auto R = group(rhs);
    // cancel common arguments
    for (auto it = L.begin(); it != L.end();) {
      auto jt = R.find(it->first);
      if (jt != R.end()) {
        uint32_t c = std::min(it->second.count, jt->second.count);
        it->second.count -= c;
        jt->second.count -= c;
        if (jt->second.count == 0) R.erase(jt);
      }
      if (it->second.count == 0)
        it = L.erase(it);
      else
        ++it;
    }
    if (L.empty() && R.empty()) {
      solve(std::move(rest), std::move(sigma));
      return;
    }
    if (L.empty() || R.empty()) return;  // no unit element

    std::vector<SliceCol> cols;
    auto add_side = [&](std::map<Term, Entry, TermLess>& side, bool left) {
      for (auto& [key, entry] : side) {
        SliceCol* col = nullptr;
        if (entry.rep.is_var()) {
          for (auto& c : cols)
            if (!c.is_abstraction && c.var == entry.rep.var_id()) col = &c;
          if (!col) {
            cols.push_back(SliceCol{false, entry.rep.var_id(), Term(), 0, 0});
            col = &cols.back();
          }
        } else {
          cols.push_back(SliceCol{true, 0, entry.rep, 0, 0});
          col = &cols.back();
        }
        (left ? col->lhs_coeff : col->rhs_coeff) += entry.count;
      }
    };
    add_side(L, true);
    add_side(R, false);

    DioSystem sys;
    sys.rows.emplace_back();
    for (auto& c : cols) sys.rows[0].push_back(c.lhs_coeff - c.rhs_coeff);
    auto basis = dio_minimal_basis(sys, limits.max_basis);

    // vectors assigning >= 2 to an abstraction slot can never be used
    std::vector<std::vector<uint32_t>> usable;
    for (auto& b : basis) {
      bool ok = true;
      for (size_t j = 0; j < cols.size(); ++j)
        if (cols[j].is_abstraction && b[j] > 1) ok = false;
      if (ok) usable.push_back(b);
    }

    // enumerate subsets: abstraction totals exactly 1, variable totals >= 1
    std::vector<uint32_t> totals(cols.size(), 0);
    std::vector<size_t> chosen;
    std::function<void(size_t)> enumerate = [&](size_t idx) {
      tick();
      if (idx == usable.size()) {
        for (size_t j = 0; j < cols.size(); ++j)
          if (cols[j].is_abstraction ? totals[j] != 1 : totals[j] < 1) return;
        apply_choice(chosen, usable, cols, f, rest, sigma);
        return;
      }
      // prune: can remaining vectors still fix uncovered columns?
      bool feasible = true;
      for (size_t j = 0; j < cols.size() && feasible; ++j) {
        if (totals[j] >= 1) continue;
        bool coverable = false;
        for (size_t k = idx; k < usable.size() && !coverable; ++k)
          if (usable[k][j] > 0) coverable = true;
        if (!coverable) feasible = false;
      }
      if (!feasible) return;
      // include usable[idx] if abstraction budget allows
      bool can_take = true;
      for (size_t j = 0; j < cols.size(); ++j)
        if (cols[j].is_abstraction && totals[j] + usable[idx][j] > 1)
          can_take = false;
      if (can_take) {
        for (size_t j = 0; j < cols.size(); ++j) totals[j] += usable[idx][j];
        chosen.push_back(idx);
        enumerate(idx + 1);
        chosen.pop_back();
        for (size_t j = 0; j < cols.size(); ++j) totals[j] -= usable[idx][j];
      }
      enumerate(idx + 1);
    };
    enumerate(0);
  }

  void apply_choice(const std::vector<size_t>& chosen,
                    const std::vector<std::vector<uint32_t>>& usable,
                    const std::vector<SliceCol>& cols, SymbolId f,
                    const PairList& rest, const Substitution& sigma) {
    // fresh variable per chosen basis vector
    std::vector<Term> zs;
    zs.reserve(chosen.size());
    for (size_t i = 0; i < chosen.size(); ++i) zs.push_back(Term::var(fresh.fresh_var()));

    Substitution assign;
    PairList eqs = rest;
    for (size_t j = 0; j < cols.size(); ++j) {
      std::vector<Term> parts;
      for (size_t i = 0; i < chosen.size(); ++i) {
        uint32_t mult = usable[chosen[i]][j];
        for (uint32_t k = 0; k < mult; ++k) parts.push_back(zs[i]);
      }
      Term value = parts.size() == 1 ? parts[0] : build_comb(f, parts);
      if (cols[j].is_abstraction) {
        eqs.emplace_back(value, cols[j].atom);  // value is a single variable
      } else {
        assign.bind(cols[j].var, value);
      }
    }
    solve(std::move(eqs), sigma.then(assign));
  }
};

std::vector<VarId> problem_vars(const PairList& problem) {
  std::set<VarId> vs;
  for (auto& [a, b] : problem) {
    for (VarId v : vars_of(a)) vs.insert(v);
    for (VarId v : vars_of(b)) vs.insert(v);
  }
  return {vs.begin(), vs.end()};
}

VarId max_var_plus_one(const PairList& problem) {
  VarId m = 0;
  for (auto& [a, b] : problem) {
    for (VarId v : vars_of(a)) m = std::max(m, v + 1);
    for (VarId v : vars_of(b)) m = std::max(m, v + 1);
  }
  return m;
}

/// Restrict to the problem's variables and renumber fresh image variables
/// canonically starting right after the problem's own.
Substitution canonicalize(const Substitution& sigma,
                          const std::vector<VarId>& pvars, VarId fresh_base) {
  Substitution restricted = sigma.restrict(pvars);
  std::map<VarId, VarId> renum;
  std::set<VarId> pset(pvars.begin(), pvars.end());
  VarId next = fresh_base;
  std::function<Term(const Term&)> go = [&](const Term& t) -> Term {
    if (t.is_var()) {
      if (pset.count(t.var_id())) return t;
      auto it = renum.find(t.var_id());
      if (it == renum.end()) it = renum.emplace(t.var_id(), next++).first;
      return Term::var(it->second);
    }
    if (!t.is_app()) return t;
    std::vector<Term> kids;
    kids.reserve(t.children().size());
    for (const Term& c : t.children()) kids.push_back(go(c));
    return Term::app(t.sym(), std::move(kids), t.eval_mark());
  };
  Substitution out;
  for (auto& [v, t] : restricted.bindings()) out.bind(v, go(t));
  return out;
}

int compare_subst(const Substitution& a, const Substitution& b) {
  auto ia = a.bindings().begin(), ea = a.bindings().end();
  auto ib = b.bindings().begin(), eb = b.bindings().end();
  for (; ia != ea && ib != eb; ++ia, ++ib) {
    if (ia->first != ib->first) return ia->first < ib->first ? -1 : 1;
    int c = compare_syntactic(ia->second, ib->second);
    if (c != 0) return c;
  }
  if (ia != ea) return 1;
  if (ib != eb) return -1;
  return 0;
}

/// sigma-as-term tuple for instance checks: the images of pvars in order.
std::vector<Term> subst_tuple(const Substitution& s,
                              const std::vector<VarId>& pvars) {
  std::vector<Term> out;
  out.reserve(pvars.size());
  for (VarId v : pvars) {
    const Term* b = s.lookup(v);
    out.push_back(b ? *b : Term::var(v));
  }
  return out;
}

Term freeze_vars(const Term& t, std::map<VarId, NameId>& frozen,
                 NameId& next_name) {
  if (t.is_var()) {
    auto it = frozen.find(t.var_id());
    if (it == frozen.end()) it = frozen.emplace(t.var_id(), next_name++).first;
    return Term::name(it->second);
  }
  if (!t.is_app()) return t;
  std::vector<Term> kids;
  kids.reserve(t.children().size());
  for (const Term& c : t.children()) kids.push_back(freeze_vars(c, frozen, next_name));
  return Term::app(t.sym(), std::move(kids), t.eval_mark());
}

NameId max_name_plus_one(const Term& t) {
  NameId m = 0;
  for (NameId n : names_of(t)) m = std::max(m, n + 1);
  return m;
}

Term unfreeze(const Term& t, const std::map<NameId, VarId>& thaw) {
  if (t.is_name()) {
    auto it = thaw.find(t.name_id());
    if (it != thaw.end()) return Term::var(it->second);
    return t;
  }
  if (!t.is_app()) return t;
  std::vector<Term> kids;
  kids.reserve(t.children().size());
  for (const Term& c : t.children()) kids.push_back(unfreeze(c, thaw));
  return Term::app(t.sym(), std::move(kids), t.eval_mark());
}

std::vector<Substitution> dedup_sorted(std::vector<Substitution> subs,
                                       const EDown& e,
                                       const std::vector<VarId>& pvars) {
  // canonical AC form of every image, then sort + unique
  std::vector<Substitution> canon;
  canon.reserve(subs.size());
  for (auto& s : subs) {
    Substitution c;
    for (auto& [v, t] : s.bindings()) c.bind(v, ac_canonical(t, e));
    canon.push_back(std::move(c));
  }
  std::vector<size_t> idx(subs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    return compare_subst(canon[a], canon[b]) < 0;
  });
  std::vector<Substitution> out;
  for (size_t k = 0; k < idx.size(); ++k) {
    if (k > 0 && compare_subst(canon[idx[k]], canon[idx[k - 1]]) == 0) continue;
    out.push_back(subs[idx[k]]);
  }
  (void)pvars;
  return out;
}

}  // namespace

std::vector<Substitution> unify_mod(const PairList& problem, const EDown& e,
                                    const UnifyOptions& opts) {
  auto pvars = problem_vars(problem);
  VarId base = max_var_plus_one(problem);
  VarId first_fresh = opts.fresh ? std::max(opts.fresh->peek_var(), base) : base;

  Solver solver(e, opts.limits, first_fresh);
  solver.solve(problem, Substitution{});

  std::vector<Substitution> res;
  res.reserve(solver.out.size());
  for (auto& s : solver.out) res.push_back(canonicalize(s, pvars, base));
  res = dedup_sorted(std::move(res), e, pvars);

  if (opts.minimize && res.size() > 1) {
    // drop any unifier that is an E-instance of another
    std::vector<bool> dead(res.size(), false);
    for (size_t i = 0; i < res.size(); ++i) {
      if (dead[i]) continue;
      for (size_t j = 0; j < res.size(); ++j) {
        if (i == j || dead[j] || dead[i]) continue;
        // is res[i] an instance of res[j]?
        PairList m;
        auto ti = subst_tuple(res[i], pvars);
        auto tj = subst_tuple(res[j], pvars);
        for (size_t k = 0; k < pvars.size(); ++k) m.emplace_back(tj[k], ti[k]);
        if (!match_mod(m, e, UnifyOptions{opts.limits, false, nullptr}).empty())
          dead[i] = true;
      }
    }
    std::vector<Substitution> kept;
    for (size_t i = 0; i < res.size(); ++i)
      if (!dead[i]) kept.push_back(res[i]);
    res = std::move(kept);
  }
  if (opts.fresh) opts.fresh->reserve_vars(first_fresh);
  return res;
}

std::vector<Substitution> unify_mod(const Term& t, const Term& s,
                                    const EDown& e, const UnifyOptions& opts) {
  return unify_mod(PairList{{t, s}}, e, opts);
}

std::vector<Substitution> match_mod(const PairList& problem, const EDown& e,
                                    const UnifyOptions& opts) {
  // freeze subject variables as fresh names, solve, thaw
  NameId next_name = 0;
  for (auto& [p, s] : problem) {
    next_name = std::max(next_name, max_name_plus_one(p));
    next_name = std::max(next_name, max_name_plus_one(s));
  }
  std::map<VarId, NameId> frozen;
  PairList prob2;
  prob2.reserve(problem.size());
  for (auto& [p, s] : problem)
    prob2.emplace_back(p, freeze_vars(s, frozen, next_name));

  std::set<VarId> pattern_vars;
  for (auto& [p, s] : prob2)
    for (VarId v : vars_of(p)) pattern_vars.insert(v);

  UnifyOptions o = opts;
  o.minimize = false;
  auto subs = unify_mod(prob2, e, o);

  std::map<NameId, VarId> thaw;
  for (auto& [v, n] : frozen) thaw.emplace(n, v);
  std::vector<Substitution> out;
  for (auto& s : subs) {
    Substitution m;
    for (auto& [v, t] : s.bindings()) {
      if (!pattern_vars.count(v)) continue;
      m.bind(v, unfreeze(t, thaw));
    }
    out.push_back(std::move(m));
  }
  return dedup_sorted(std::move(out), e, {pattern_vars.begin(), pattern_vars.end()});
}

std::vector<Substitution> match_mod(const Term& pattern, const Term& subject,
                                    const EDown& e, const UnifyOptions& opts) {
  return match_mod(PairList{{pattern, subject}}, e, opts);
}

bool is_instance_mod(const Term& instance, const Term& general, const EDown& e,
                     const UnifyOptions& opts) {
  return !match_mod(general, instance, e, opts).empty();
}

}  // namespace fvp
