#include "fvp/variant.hpp"

#include <algorithm>
#include <functional>

namespace fvp {

void validate_theory(const RewriteTheory& th) {
  for (SymbolId f = 0; f < th.sig.size(); ++f) {
    std::vector<Term> xs;
    for (uint32_t i = 0; i < th.sig.symbol(f).arity; ++i)
      xs.push_back(Term::var(i));
    Term id_t = Term::app(f, xs);
    if (!th.r.contains(RewriteRule(id_t, id_t)))
      throw SignatureError("missing identity rule for symbol '" +
                           th.sig.symbol(f).name + "'");
  }
  for (const RewriteRule& r : th.r.rules()) {
    std::map<VarId, uint32_t> lv, rv;
    collect_vars(r.lhs, lv);
    collect_vars(r.rhs, rv);
    for (auto& [v, _] : rv)
      if (!lv.count(v))
        throw SignatureError("rule with uncovered rhs variable: " +
                             to_string(r.lhs, th.sig) + " -> " +
                             to_string(r.rhs, th.sig));
  }
  if (th.ea && !th.ea->ea_is_edown())
    throw SignatureError("nested Ea theories may not nest further");
}

bool ea_equal(const Term& t, const Term& s, const RewriteTheory& th) {
  if (th.ea_is_edown()) return eq_mod(t, s, th.edown);
  return eq_modulo_e(t, s, *th.ea);
}

std::vector<Substitution> ea_match(const PairList& problem,
                                   const RewriteTheory& th) {
  if (th.ea_is_edown()) {
    UnifyOptions opts;
    opts.limits = th.limits;
    return match_mod(problem, th.edown, opts);
  }
  return e_match(problem, *th.ea);
}

std::vector<Substitution> ea_unify(const PairList& problem,
                                   const RewriteTheory& th) {
  if (th.ea_is_edown()) {
    UnifyOptions opts;
    opts.limits = th.limits;
    return unify_mod(problem, th.edown, opts);
  }
  // unification modulo Ea through the nested theory: open-evaluate the
  // two tuples, then unify the evaluated tuples modulo the nested Ea
  const RewriteTheory& ea = *th.ea;
  PairList marked;
  std::vector<Term> lst;
  for (auto& [a, b] : problem) lst.push_back(mark_evaluate(a));
  for (auto& [a, b] : problem) lst.push_back(mark_evaluate(b));
  std::vector<Substitution> out;
  for (const OpenEvalResult& oe : open_eval(lst, ea)) {
    PairList prob2;
    for (size_t i = 0; i < problem.size(); ++i)
      prob2.emplace_back(oe.terms[i], oe.terms[problem.size() + i]);
    UnifyOptions opts;
    opts.limits = ea.limits;
    for (const Substitution& su : unify_mod(prob2, ea.edown, opts))
      out.push_back(oe.sigma.then(su));
  }
  return out;
}

namespace {

VarId max_var_over(const std::vector<Term>& ts, VarId m = 0) {
  for (const Term& t : ts)
    for (VarId v : vars_of(t)) m = std::max(m, v + 1);
  return m;
}

RewriteRule shift_rule(const RewriteRule& r, VarId base) {
  std::map<VarId, VarId> m;
  std::function<Term(const Term&)> go = [&](const Term& t) -> Term {
    if (t.is_var()) {
      auto it = m.find(t.var_id());
      if (it == m.end())
        it = m.emplace(t.var_id(), base + static_cast<VarId>(m.size())).first;
      return Term::var(it->second);
    }
    if (!t.is_app()) return t;
    std::vector<Term> kids;
    for (const Term& c : t.children()) kids.push_back(go(c));
    return Term::app(t.sym(), std::move(kids), t.eval_mark());
  };
  return RewriteRule(go(r.lhs), go(r.rhs), r.origin);
}

struct Evaluator {
  const RewriteTheory& th;
  std::map<const void*, std::vector<Term>> memo;
  std::map<SymbolId, std::vector<RewriteRule>> by_root;

  explicit Evaluator(const RewriteTheory& t) : th(t) {
    for (const RewriteRule& r : th.r.rules())
      if (r.lhs.is_app()) by_root[r.lhs.sym()].push_back(r);
  }

  std::vector<Term> dedup_terms(std::vector<Term> ts) const {
    std::sort(ts.begin(), ts.end(), [&](const Term& a, const Term& b) {
      return TermLess{}(ac_canonical(a, th.edown), ac_canonical(b, th.edown));
    });
    ts.erase(std::unique(ts.begin(), ts.end(),
                         [&](const Term& a, const Term& b) {
                           return eq_mod(a, b, th.edown);
                         }),
             ts.end());
    if (th.ea) {
      std::vector<Term> kept;
      for (const Term& t : ts) {
        bool dup = false;
        for (const Term& k : kept)
          if (ea_equal(t, k, th)) {
            dup = true;
            break;
          }
        if (!dup) kept.push_back(t);
      }
      ts = std::move(kept);
    }
    return ts;
  }

  std::vector<Term> close(const Term& t) {
    if (!t.has_mark()) return {t};
    auto it = memo.find(t.raw());
    if (it != memo.end()) return it->second;

    // t is a marked application
    std::vector<std::vector<Term>> child_sets;
    child_sets.reserve(t.children().size());
    for (const Term& c : t.children()) child_sets.push_back(close(c));

    std::vector<Term> results;
    std::vector<size_t> idx(child_sets.size(), 0);
    std::vector<Term> picked(child_sets.size(), Term::var(0));
    std::function<void(size_t)> walk = [&](size_t k) {
      if (k == child_sets.size()) {
        VarId base = max_var_over(picked, max_var_over({t}));
        auto rit = by_root.find(t.sym());
        if (rit == by_root.end()) return;
        for (const RewriteRule& rule0 : rit->second) {
          RewriteRule rule = shift_rule(rule0, base);
          PairList prob;
          for (size_t i = 0; i < picked.size(); ++i)
            prob.emplace_back(rule.lhs.children()[i], picked[i]);
          for (const Substitution& m : ea_match(prob, th))
            results.push_back(m.apply(rule.rhs));
        }
        return;
      }
      for (const Term& choice : child_sets[k]) {
        picked[k] = choice;
        walk(k + 1);
      }
    };
    walk(0);
    results = dedup_terms(std::move(results));
    if (results.size() > th.limits.max_solutions)
      throw ResourceLimitError("close evaluation breadth");
    memo.emplace(t.raw(), results);
    return results;
  }
};

/// Canonical key for deduplicating open-eval results: the result terms plus
/// the substitution restricted to the observable variables, with all other
/// variables renumbered jointly.
std::string result_key(const OpenEvalResult& r,
                       const std::vector<VarId>& observable, const EDown& e,
                       const Signature& sig) {
  std::set<VarId> obs(observable.begin(), observable.end());
  std::map<VarId, VarId> renum;
  VarId next = 1u << 30;
  std::function<Term(const Term&)> ren = [&](const Term& t) -> Term {
    if (t.is_var()) {
      if (obs.count(t.var_id())) return t;
      auto it = renum.find(t.var_id());
      if (it == renum.end()) it = renum.emplace(t.var_id(), next++).first;
      return Term::var(it->second);
    }
    if (!t.is_app()) return t;
    std::vector<Term> kids;
    for (const Term& c : t.children()) kids.push_back(ren(c));
    return Term::app(t.sym(), std::move(kids), t.eval_mark());
  };
  std::string key;
  for (const Term& t : r.terms)
    key += to_string(ac_canonical(ren(t), e), sig) + "|";
  key += "//";
  for (VarId v : observable) {
    const Term* b = r.sigma.lookup(v);
    if (!b) continue;
    key += std::to_string(v) + ":" +
           to_string(ac_canonical(ren(*b), e), sig) + "|";
  }
  return key;
}

struct OpenEvaluator {
  const RewriteTheory& th;
  std::map<SymbolId, std::vector<RewriteRule>> by_root;
  size_t produced = 0;

  explicit OpenEvaluator(const RewriteTheory& t) : th(t) {
    for (const RewriteRule& r : th.r.rules())
      if (r.lhs.is_app()) by_root[r.lhs.sym()].push_back(r);
  }

  void tick() {
    if (++produced > th.limits.max_solutions * 10)
      throw ResourceLimitError("open evaluation breadth");
  }

  std::vector<OpenEvalResult> eval(const std::vector<Term>& list,
                                   std::set<VarId> obs) {
    for (const Term& t : list)
      for (VarId v : vars_of(t)) obs.insert(v);
    std::vector<OpenEvalResult> out;
    if (list.empty()) {
      out.push_back({{}, Substitution{}});
      return out;
    }
    if (list.size() == 1) {
      const Term& t = list[0];
      if (!t.has_mark()) {
        out.push_back({{t}, Substitution{}});
        return out;
      }
      // marked application: evaluate children as a sequence, then apply rules
      std::vector<Term> children(t.children().begin(), t.children().end());
      for (const OpenEvalResult& sub : eval(children, obs)) {
        VarId base = max_var_over(sub.terms, max_var_over(list));
        for (auto& [v, b] : sub.sigma.bindings()) {
          base = std::max(base, v + 1);
          base = max_var_over({b}, base);
        }
        auto rit = by_root.find(t.sym());
        if (rit == by_root.end()) continue;
        for (const RewriteRule& rule0 : rit->second) {
          RewriteRule rule = shift_rule(rule0, base);
          PairList prob;
          for (size_t i = 0; i < sub.terms.size(); ++i)
            prob.emplace_back(sub.terms[i], rule.lhs.children()[i]);
          for (const Substitution& su : ea_unify(prob, th)) {
            tick();
            out.push_back({{su.apply(rule.rhs)}, sub.sigma.then(su)});
          }
        }
      }
      return dedup(std::move(out), obs);
    }
    // sequence clause
    std::vector<Term> head{list[0]};
    std::vector<Term> tail(list.begin() + 1, list.end());
    for (const OpenEvalResult& h : eval(head, obs)) {
      std::vector<Term> tail_inst;
      tail_inst.reserve(tail.size());
      for (const Term& t : tail) tail_inst.push_back(h.sigma.apply(t));
      for (const OpenEvalResult& r : eval(tail_inst, obs)) {
        tick();
        OpenEvalResult combined;
        combined.terms.push_back(r.sigma.apply(h.terms[0]));
        for (const Term& t : r.terms) combined.terms.push_back(t);
        combined.sigma = h.sigma.then(r.sigma);
        out.push_back(std::move(combined));
      }
    }
    return dedup(std::move(out), obs);
  }

  std::vector<OpenEvalResult> dedup(std::vector<OpenEvalResult> rs,
                                    const std::set<VarId>& observable) {
    std::vector<VarId> obs(observable.begin(), observable.end());
    std::set<std::string> seen;
    std::vector<OpenEvalResult> out;
    for (auto& r : rs) {
      std::string k = result_key(r, obs, th.edown, th.sig);
      if (seen.insert(std::move(k)).second) out.push_back(std::move(r));
    }
    return out;
  }
};

Substitution restrict_renumber(const Substitution& s,
                               const std::vector<VarId>& keep) {
  Substitution r = s.restrict(keep);
  VarId base = 0;
  for (VarId v : keep) base = std::max(base, v + 1);
  for (auto& [v, t] : r.bindings()) base = max_var_over({t}, base);
  std::set<VarId> kset(keep.begin(), keep.end());
  std::map<VarId, VarId> renum;
  VarId next = base;
  std::function<Term(const Term&)> go = [&](const Term& t) -> Term {
    if (t.is_var()) {
      if (kset.count(t.var_id())) return t;
      auto it = renum.find(t.var_id());
      if (it == renum.end()) it = renum.emplace(t.var_id(), next++).first;
      return Term::var(it->second);
    }
    if (!t.is_app()) return t;
    std::vector<Term> kids;
    for (const Term& c : t.children()) kids.push_back(go(c));
    return Term::app(t.sym(), std::move(kids), t.eval_mark());
  };
  Substitution out;
  for (auto& [v, t] : r.bindings()) out.bind(v, go(t));
  return out;
}

}  // namespace

std::vector<Term> close_eval(const Term& t, const RewriteTheory& th) {
  if (!te_layering_ok(t)) throw std::invalid_argument("TE layering violated");
  Evaluator ev(th);
  return ev.close(t);
}

std::vector<OpenEvalResult> open_eval(const std::vector<Term>& list,
                                      const RewriteTheory& th) {
  for (const Term& t : list)
    if (!te_layering_ok(t)) throw std::invalid_argument("TE layering violated");
  OpenEvaluator ev(th);
  return ev.eval(list, {});
}

std::vector<Variant> variants(const Term& t, const RewriteTheory& th) {
  std::vector<VarId> tvars = vars_of(t);
  std::vector<Variant> out;
  std::set<std::string> seen;
  for (const OpenEvalResult& r : open_eval({mark_evaluate(t)}, th)) {
    Variant v{r.terms[0], restrict_renumber(r.sigma, tvars)};
    OpenEvalResult key{{v.term}, v.theta};
    std::string k = result_key(key, tvars, th.edown, th.sig);
    if (!seen.insert(k).second) continue;
    out.push_back(std::move(v));
  }
  if (th.ea) {
    // second pass modulo the nested Ea
    std::vector<Variant> kept;
    for (const Variant& v : out) {
      bool dup = false;
      for (const Variant& k : kept) {
        if (!ea_equal(v.term, k.term, th)) continue;
        if (!(v.theta.bindings().size() == k.theta.bindings().size())) continue;
        bool same = true;
        auto it = k.theta.bindings().begin();
        for (auto& [var, img] : v.theta.bindings()) {
          if (it->first != var || !ea_equal(img, it->second, th)) same = false;
          ++it;
        }
        if (same) dup = true;
        if (dup) break;
      }
      if (!dup) kept.push_back(v);
    }
    out = std::move(kept);
  }
  return out;
}

bool eq_modulo_e(const Term& t, const Term& s, const RewriteTheory& th) {
  auto et = close_eval(mark_evaluate(t), th);
  auto es = close_eval(mark_evaluate(s), th);
  if (th.ea_is_edown()) {
    std::set<Term, TermLess> canon;
    for (const Term& a : et) canon.insert(ac_canonical(a, th.edown));
    for (const Term& b : es)
      if (canon.count(ac_canonical(b, th.edown))) return true;
    return false;
  }
  for (const Term& a : et)
    for (const Term& b : es)
      if (ea_equal(a, b, th)) return true;
  return false;
}

std::vector<Substitution> e_unify(const Term& t, const Term& s,
                                  const RewriteTheory& th,
                                  const EUnifyOptions& opts) {
  std::vector<VarId> pvars;
  {
    std::set<VarId> vs;
    for (VarId v : vars_of(t)) vs.insert(v);
    for (VarId v : vars_of(s)) vs.insert(v);
    pvars.assign(vs.begin(), vs.end());
  }
  std::vector<Substitution> out;
  for (const OpenEvalResult& r : open_eval({mark_evaluate(t), mark_evaluate(s)}, th)) {
    PairList prob{{r.terms[0], r.terms[1]}};
    for (const Substitution& su : ea_unify(prob, th))
      out.push_back(restrict_renumber(r.sigma.then(su), pvars));
  }
  // dedup
  {
    std::set<std::string> seen;
    std::vector<Substitution> kept;
    for (auto& s2 : out) {
      OpenEvalResult key{{}, s2};
      std::string k = result_key(key, pvars, th.edown, th.sig);
      if (seen.insert(k).second) kept.push_back(std::move(s2));
    }
    out = std::move(kept);
  }
  auto tuple_of = [&](const Substitution& s2) {
    std::vector<Term> ts;
    for (VarId v : pvars) {
      const Term* b = s2.lookup(v);
      ts.push_back(b ? *b : Term::var(v));
    }
    return ts;
  };
  auto drop_instances = [&](auto instance_of) {
    std::vector<bool> dead(out.size(), false);
    for (size_t i = 0; i < out.size(); ++i) {
      if (dead[i]) continue;
      for (size_t j = 0; j < out.size(); ++j) {
        if (i == j || dead[j] || dead[i]) continue;
        if (instance_of(out[i], out[j])) dead[i] = true;
      }
    }
    std::vector<Substitution> kept;
    for (size_t i = 0; i < out.size(); ++i)
      if (!dead[i]) kept.push_back(out[i]);
    out = std::move(kept);
  };
  if (opts.minimize_ea && out.size() > 1) {
    drop_instances([&](const Substitution& inst, const Substitution& gen) {
      PairList prob;
      auto ti = tuple_of(inst), tg = tuple_of(gen);
      for (size_t k = 0; k < pvars.size(); ++k) prob.emplace_back(tg[k], ti[k]);
      return !ea_match(prob, th).empty();
    });
  }
  if (opts.minimize_full && out.size() > 1) {
    drop_instances([&](const Substitution& inst, const Substitution& gen) {
      PairList prob;
      auto ti = tuple_of(inst), tg = tuple_of(gen);
      for (size_t k = 0; k < pvars.size(); ++k) prob.emplace_back(tg[k], ti[k]);
      return !e_match(prob, th).empty();
    });
  }
  return out;
}

std::vector<Substitution> e_match(const PairList& problem,
                                  const RewriteTheory& th) {
  // freeze subject variables as names, unify modulo E, thaw
  NameId next_name = 0;
  for (auto& [p, s] : problem) {
    for (NameId n : names_of(p)) next_name = std::max(next_name, n + 1);
    for (NameId n : names_of(s)) next_name = std::max(next_name, n + 1);
  }
  std::map<VarId, NameId> frozen;
  std::function<Term(const Term&)> freeze = [&](const Term& t) -> Term {
    if (t.is_var()) {
      auto it = frozen.find(t.var_id());
      if (it == frozen.end()) it = frozen.emplace(t.var_id(), next_name++).first;
      return Term::name(it->second);
    }
    if (!t.is_app()) return t;
    std::vector<Term> kids;
    for (const Term& c : t.children()) kids.push_back(freeze(c));
    return Term::app(t.sym(), std::move(kids), t.eval_mark());
  };

  std::vector<Term> lst;
  for (auto& [p, s] : problem) lst.push_back(mark_evaluate(p));
  for (auto& [p, s] : problem) lst.push_back(freeze(mark_evaluate(s)));

  std::set<VarId> pattern_vars;
  for (auto& [p, s] : problem)
    for (VarId v : vars_of(p)) pattern_vars.insert(v);

  std::map<NameId, VarId> thaw;
  for (auto& [v, n] : frozen) thaw.emplace(n, v);
  std::function<Term(const Term&)> unfreeze = [&](const Term& t) -> Term {
    if (t.is_name()) {
      auto it = thaw.find(t.name_id());
      return it == thaw.end() ? t : Term::var(it->second);
    }
    if (!t.is_app()) return t;
    std::vector<Term> kids;
    for (const Term& c : t.children()) kids.push_back(unfreeze(c));
    return Term::app(t.sym(), std::move(kids), t.eval_mark());
  };

  std::vector<Substitution> out;
  for (const OpenEvalResult& r : open_eval(lst, th)) {
    PairList prob;
    size_t n = problem.size();
    for (size_t i = 0; i < n; ++i)
      prob.emplace_back(r.terms[i], r.terms[n + i]);
    for (const Substitution& su : ea_unify(prob, th)) {
      Substitution whole = r.sigma.then(su);
      Substitution m;
      for (VarId v : pattern_vars) {
        const Term* b = whole.lookup(v);
        if (b) m.bind(v, unfreeze(*b));
      }
      out.push_back(std::move(m));
    }
  }
  return out;
}

}  // namespace fvp
