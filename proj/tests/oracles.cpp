#include "oracles.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

namespace fvp::test {

namespace {

void naive_flatten(const Term& t, SymbolId f, std::vector<Term>& out) {
  if (t.is_app() && t.sym() == f) {
    for (const Term& c : t.children()) naive_flatten(c, f, out);
  } else {
    out.push_back(t);
  }
}

bool multiset_match(std::vector<Term>& xs, std::vector<Term>& ys, size_t i,
                    std::vector<bool>& used, const EDown& e) {
  if (i == xs.size()) return true;
  for (size_t j = 0; j < ys.size(); ++j) {
    if (used[j]) continue;
    if (naive_ac_eq(xs[i], ys[j], e)) {
      used[j] = true;
      if (multiset_match(xs, ys, i + 1, used, e)) return true;
      used[j] = false;
    }
  }
  return false;
}

}  // namespace

bool naive_ac_eq(const Term& t, const Term& s, const EDown& e) {
  if (t.is_var() || s.is_var())
    return t.is_var() && s.is_var() && t.var_id() == s.var_id();
  if (t.is_name() || s.is_name())
    return t.is_name() && s.is_name() && t.name_id() == s.name_id();
  if (t.sym() != s.sym()) return false;
  if (!e.is_ac(t.sym())) {
    for (size_t i = 0; i < t.children().size(); ++i)
      if (!naive_ac_eq(t.children()[i], s.children()[i], e)) return false;
    return true;
  }
  std::vector<Term> xs, ys;
  naive_flatten(t, t.sym(), xs);
  naive_flatten(s, s.sym(), ys);
  if (xs.size() != ys.size()) return false;
  std::vector<bool> used(ys.size(), false);
  return multiset_match(xs, ys, 0, used, e);
}

std::optional<Substitution> match_syntactic(const Term& pattern,
                                            const Term& subject) {
  Substitution s;
  std::function<bool(const Term&, const Term&)> go = [&](const Term& p,
                                                         const Term& t) {
    if (p.is_var()) {
      const Term* b = s.lookup(p.var_id());
      if (b) return *b == t;
      if (p == t) return true;  // identity binding
      s.bind(p.var_id(), t);
      return true;
    }
    if (p.is_name()) return t.is_name() && p.name_id() == t.name_id();
    if (!t.is_app() || p.sym() != t.sym()) return false;
    for (size_t i = 0; i < p.children().size(); ++i)
      if (!go(p.children()[i], t.children()[i])) return false;
    return true;
  };
  if (!go(pattern, subject)) return std::nullopt;
  return s;
}

namespace {

/// Single A/C axiom steps at every position.
std::vector<Term> ac_neighbors(const Term& t, const EDown& e) {
  std::vector<Term> out;
  for (const Position& p : positions(t)) {
    Term sub = subterm_at(t, p);
    if (!sub.is_app() || !e.is_ac(sub.sym())) continue;
    SymbolId f = sub.sym();
    const Term& a = sub.children()[0];
    const Term& b = sub.children()[1];
    out.push_back(replace_at(t, p, Term::app(f, {b, a})));  // comm
    if (a.is_app() && a.sym() == f) {
      // (x+y)+z -> x+(y+z)
      out.push_back(replace_at(
          t, p,
          Term::app(f, {a.children()[0], Term::app(f, {a.children()[1], b})})));
    }
    if (b.is_app() && b.sym() == f) {
      // x+(y+z) -> (x+y)+z
      out.push_back(replace_at(
          t, p,
          Term::app(f, {Term::app(f, {a, b.children()[0]}), b.children()[1]})));
    }
  }
  return out;
}

std::vector<Term> eq_neighbors(const Term& t,
                               const std::vector<std::pair<Term, Term>>& eqs,
                               uint32_t max_weight) {
  std::vector<Term> out;
  VarId shift = 0;
  for (VarId v : vars_of(t)) shift = std::max(shift, v + 1);
  for (const Position& p : positions(t)) {
    Term sub = subterm_at(t, p);
    for (auto& [l0, r0] : eqs) {
      for (int dir = 0; dir < 2; ++dir) {
        std::map<VarId, VarId> renum;
        Term l = renumber_vars(dir ? r0 : l0, renum);
        Term r = renumber_vars(dir ? l0 : r0, renum);
        // keep oracle variables clear of the subject's
        Substitution lift;
        for (auto& [from, to] : renum) lift.bind(to, Term::var(to + shift));
        l = lift.apply(l);
        r = lift.apply(r);
        auto m = match_syntactic(l, sub);
        if (!m) continue;
        // variables the equation introduces (non-regular direction) are
        // closed with every constant in scope
        std::set<VarId> lv;
        for (VarId v : vars_of(m->apply(l))) lv.insert(v);
        Term inst = m->apply(r);
        std::vector<VarId> extra;
        for (VarId v : vars_of(inst))
          if (!lv.count(v)) extra.push_back(v);
        std::vector<Term> insts;
        if (extra.empty()) {
          insts.push_back(inst);
        } else {
          // close them with the constants appearing in the problem
          std::set<SymbolId> cs;
          std::function<void(const Term&)> scan = [&](const Term& u) {
            if (u.is_app()) {
              if (u.children().empty()) cs.insert(u.sym());
              for (const Term& c : u.children()) scan(c);
            }
          };
          for (auto& [a, b] : eqs) {
            scan(a);
            scan(b);
          }
          scan(t);
          for (SymbolId c : cs) {
            Substitution close;
            for (VarId v : extra) close.bind(v, Term::app(c, {}));
            insts.push_back(close.apply(inst));
          }
        }
        for (const Term& one : insts) {
          Term next = replace_at(t, p, one);
          if (next.weight() <= max_weight) out.push_back(next);
        }
      }
    }
  }
  return out;
}

}  // namespace

std::vector<Term> ac_step_closure(const Term& t, const EDown& e, size_t depth,
                                  size_t max_terms) {
  std::set<Term, TermLess> seen{t};
  std::deque<std::pair<Term, size_t>> q{{t, 0}};
  std::vector<Term> out{t};
  while (!q.empty()) {
    auto [cur, d] = q.front();
    q.pop_front();
    if (d == depth) continue;
    for (const Term& n : ac_neighbors(cur, e)) {
      if (seen.count(n)) continue;
      seen.insert(n);
      out.push_back(n);
      if (out.size() >= max_terms) return out;
      q.emplace_back(n, d + 1);
    }
  }
  return out;
}

std::vector<Term> eq_closure(const Term& t,
                             const std::vector<std::pair<Term, Term>>& eqs,
                             const EDown& e, size_t depth, size_t max_terms,
                             uint32_t max_weight) {
  std::set<Term, TermLess> seen{t};
  std::deque<std::pair<Term, size_t>> q{{t, 0}};
  std::vector<Term> out{t};
  while (!q.empty()) {
    auto [cur, d] = q.front();
    q.pop_front();
    if (d == depth) continue;
    std::vector<Term> ns = ac_neighbors(cur, e);
    auto more = eq_neighbors(cur, eqs, max_weight);
    ns.insert(ns.end(), more.begin(), more.end());
    for (const Term& n : ns) {
      if (seen.count(n)) continue;
      seen.insert(n);
      out.push_back(n);
      if (out.size() >= max_terms) return out;
      q.emplace_back(n, d + 1);
    }
  }
  return out;
}

bool eq_closure_reaches(const Term& t, const Term& s,
                        const std::vector<std::pair<Term, Term>>& eqs,
                        const EDown& e, size_t depth, size_t max_terms,
                        uint32_t max_weight) {
  for (const Term& u : eq_closure(t, eqs, e, depth, max_terms, max_weight))
    if (u == s) return true;
  return false;
}

std::vector<Term> enumerate_ground_terms(const Signature& sig,
                                         const std::vector<SymbolId>& symbols,
                                         uint32_t max_weight) {
  std::vector<std::vector<Term>> by_weight(max_weight + 1);
  for (SymbolId f : symbols)
    if (sig.symbol(f).arity == 0) by_weight[1].push_back(Term::app(f, {}));
  for (uint32_t w = 2; w <= max_weight; ++w) {
    for (SymbolId f : symbols) {
      uint32_t n = sig.symbol(f).arity;
      if (n == 0 || n >= w) continue;
      // distribute w-1 among n children
      std::vector<std::vector<Term>> parts(n);
      std::function<void(uint32_t, uint32_t, std::vector<Term>&)> pick =
          [&](uint32_t k, uint32_t left, std::vector<Term>& acc) {
            if (k == n) {
              if (left == 0) {
                std::vector<Term> kids = acc;
                by_weight[w].push_back(Term::app(f, std::move(kids)));
              }
              return;
            }
            for (uint32_t wk = 1; wk + (n - k - 1) <= left; ++wk) {
              for (const Term& c : by_weight[wk]) {
                acc.push_back(c);
                pick(k + 1, left - wk, acc);
                acc.pop_back();
              }
            }
          };
      std::vector<Term> acc;
      pick(0, w - 1, acc);
    }
  }
  std::vector<Term> out;
  for (auto& v : by_weight) out.insert(out.end(), v.begin(), v.end());
  return out;
}

Term TermGen::gen(uint32_t max_weight) {
  std::uniform_int_distribution<int> coin(0, 99);
  if (max_weight <= 1) {
    // leaf: variable or constant
    std::vector<SymbolId> consts;
    for (SymbolId f : symbols_)
      if (sig_.symbol(f).arity == 0) consts.push_back(f);
    bool pick_var = num_vars_ > 0 && (consts.empty() || coin(rng_) < 50);
    if (pick_var) {
      std::uniform_int_distribution<size_t> dv(0, num_vars_ - 1);
      return Term::var(static_cast<VarId>(dv(rng_)));
    }
    std::uniform_int_distribution<size_t> dc(0, consts.size() - 1);
    return Term::app(consts[dc(rng_)], {});
  }
  std::uniform_int_distribution<size_t> ds(0, symbols_.size() + num_vars_ - 1);
  size_t k = ds(rng_);
  if (k >= symbols_.size())
    return Term::var(static_cast<VarId>(k - symbols_.size()));
  SymbolId f = symbols_[k];
  uint32_t n = sig_.symbol(f).arity;
  if (n == 0) return Term::app(f, {});
  if (n >= max_weight) return gen(1);
  uint32_t budget = max_weight - 1;
  std::vector<Term> kids;
  for (uint32_t i = 0; i < n; ++i) {
    uint32_t reserve = n - i - 1;
    std::uniform_int_distribution<uint32_t> dw(1, std::max(1u, budget - reserve));
    uint32_t w = dw(rng_);
    kids.push_back(gen(w));
    budget -= std::min(w, budget);
  }
  return Term::app(f, std::move(kids));
}

}  // namespace fvp::test
