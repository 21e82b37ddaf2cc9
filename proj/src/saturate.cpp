#include "fvp/saturate.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <thread>

namespace fvp {

namespace {

VarId max_var_base(const Term& a, const Term& b) {
  VarId m = 0;
  for (VarId v : vars_of(a)) m = std::max(m, v + 1);
  for (VarId v : vars_of(b)) m = std::max(m, v + 1);
  return m;
}

RewriteRule shift_rule_vars(const RewriteRule& r, VarId base) {
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

}  // namespace

std::vector<RewriteRule> overlaps(const RewriteRule& rule1, const Position& p,
                                  const RewriteRule& rule2, const EDown& e,
                                  const AcLimits& limits) {
  Term sub;
  try {
    sub = subterm_at(rule1.rhs, p);
  } catch (const InvalidPositionError&) {
    return {};
  }
  if (sub.is_var()) return {};
  RewriteRule r2 = shift_rule_vars(rule2, max_var_base(rule1.lhs, rule1.rhs));
  UnifyOptions opts;
  opts.limits = limits;
  std::vector<RewriteRule> out;
  for (const Substitution& s : unify_mod(sub, r2.lhs, e, opts)) {
    Term lhs = s.apply(rule1.lhs);
    Term rhs = replace_at(s.apply(rule1.rhs), p, s.apply(r2.rhs));
    out.emplace_back(std::move(lhs), std::move(rhs), RuleOrigin::Generated);
  }
  return out;
}

std::vector<RewriteRule> overlaps_eq(const RewriteRule& rule1,
                                     const Position& p,
                                     const RewriteRule& rule2, const EDown& e,
                                     const AcLimits& limits) {
  std::vector<RewriteRule> out = overlaps(rule1, p, rule2, e, limits);
  size_t n = out.size();
  for (size_t i = 0; i < n; ++i) out.push_back(out[i].reversed());
  return out;
}

namespace {

struct SubsumeCache {
  std::map<const void*, bool> eligible;  // keyed on lhs node identity
};

/// Sub side conditions on the subsuming rule: rhs irreducible and every
/// proper subterm of the lhs irreducible, through the class relation.
bool sub_eligible(const RewriteRule& r, const RewriteSystem& rdown,
                  const EDown& e, const AcLimits& limits, SubsumeCache& cache) {
  auto it = cache.eligible.find(r.lhs.raw());
  if (it != cache.eligible.end()) return it->second;
  bool ok = is_class_irreducible(r.rhs, rdown, e, limits);
  if (ok && r.lhs.is_app()) {
    for (const Term& c : r.lhs.children()) {
      std::function<bool(const Term&)> all = [&](const Term& u) {
        if (!is_class_irreducible(u, rdown, e, limits)) return false;
        return true;
      };
      if (!all(c)) {
        ok = false;
        break;
      }
    }
  }
  cache.eligible.emplace(r.lhs.raw(), ok);
  return ok;
}

/// Does `general` subsume `target` (rule Sub)?
bool subsumes(const RewriteRule& general, const RewriteRule& target,
              const EDown& e, const AcLimits& limits) {
  UnifyOptions opts;
  opts.limits = limits;
  RewriteRule g = shift_rule_vars(general, max_var_base(target.lhs, target.rhs));
  // hole at the root: strict equality argument-wise plus the rhs condition
  if (g.lhs.is_app() && target.lhs.is_app() && g.lhs.sym() == target.lhs.sym()) {
    PairList prob;
    for (size_t i = 0; i < g.lhs.children().size(); ++i)
      prob.emplace_back(g.lhs.children()[i], target.lhs.children()[i]);
    prob.emplace_back(g.rhs, target.rhs);
    if (!match_mod(prob, e, opts).empty()) return true;
  }
  // hole at a proper position q of the target's lhs
  for (const Position& q : non_var_positions(target.lhs)) {
    if (q.empty()) continue;
    Term sub = subterm_at(target.lhs, q);
    for (const Substitution& m : match_mod(g.lhs, sub, e, opts)) {
      Term replaced = replace_at(target.lhs, q, m.apply(g.rhs));
      if (eq_mod(replaced, target.rhs, e)) return true;
    }
  }
  return false;
}

}  // namespace

NormalizeOutcome normalize_rules(const RewriteSystem& rs,
                                 const RewriteSystem& rdown, const EDown& e,
                                 const Signature& sig,
                                 const GenerationConfig& cfg,
                                 bool collect_promotions) {
  size_t steps = 0;
  auto tick = [&]() {
    if (++steps > cfg.normalize_step_cap)
      throw StepLimitError("normalize_rules");
  };

  std::deque<RewriteRule> queue(rs.rules().begin(), rs.rules().end());
  RewriteSystem out;
  std::optional<SymbolId> amin = sig.min_constant();

  while (!queue.empty()) {
    RewriteRule r = queue.front();
    queue.pop_front();
    tick();

    // Eq
    if (eq_mod(r.lhs, r.rhs, e)) continue;
    // Ord: drop s -> t when t > s or s is a strict subterm of t
    if (cfg.enable_ord) {
      if (is_strict_subterm(r.lhs, r.rhs)) continue;
      if (compare(r.rhs, r.lhs, cfg.order_spec, e, sig) == OrderVerdict::Greater)
        continue;
    }
    // NormR: normalise the rhs through rdown modulo E
    {
      Term nf = class_normal_form(r.rhs, rdown, e, cfg.normalize_step_cap,
                                  cfg.limits);
      if (!eq_mod(nf, r.rhs, e)) {
        queue.push_front(RewriteRule(r.lhs, nf, r.origin));
        continue;
      }
    }
    // Var: eliminate rhs-only variables with the minimal constant
    if (cfg.enable_var) {
      std::map<VarId, uint32_t> lv, rv;
      collect_vars(r.lhs, lv);
      collect_vars(r.rhs, rv);
      Substitution rho;
      for (auto& [v, _] : rv)
        if (!lv.count(v)) rho.bind(v, Term::app(*amin, {}));
      if (!rho.empty()) {
        Term trho = rho.apply(r.rhs);
        queue.push_front(RewriteRule(r.rhs, trho, r.origin));
        queue.push_front(RewriteRule(r.lhs, trho, r.origin));
        continue;
      }
    }
    // NormL: normalise one direct argument of the lhs, emit both orientations
    if (r.lhs.is_app()) {
      bool transformed = false;
      for (size_t i = 0; i < r.lhs.children().size() && !transformed; ++i) {
        auto step =
            class_rewrite_once(r.lhs.children()[i], rdown, e, cfg.limits);
        if (step) {
          std::vector<Term> kids = r.lhs.children();
          kids[i] = *step;
          Term w = Term::app(r.lhs.sym(), std::move(kids), false);
          queue.push_front(RewriteRule(r.rhs, w, r.origin));
          queue.push_front(RewriteRule(w, r.rhs, r.origin));
          transformed = true;
        }
      }
      if (transformed) continue;
    }
    out.add(r);
  }

  // Sub: drop rules subsumed by another rule
  out.sort_canonical();
  SubsumeCache cache;
  std::vector<RewriteRule> rules = out.rules();
  std::vector<bool> dead(rules.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < rules.size(); ++i) {
      if (dead[i]) continue;
      for (size_t j = 0; j < rules.size(); ++j) {
        if (i == j || dead[j]) continue;
        tick();
        if (!sub_eligible(rules[j], rdown, e, cfg.limits, cache)) continue;
        if (subsumes(rules[j], rules[i], e, cfg.limits)) {
          dead[i] = true;
          changed = true;
          break;
        }
      }
    }
  }
  RewriteSystem survivors;
  for (size_t i = 0; i < rules.size(); ++i)
    if (!dead[i]) survivors.add(rules[i]);

  NormalizeOutcome outcome;
  outcome.rules = std::move(survivors);
  if (collect_promotions) {
    for (const RewriteRule& r : outcome.rules.rules()) {
      if (rdown.contains(r)) continue;
      if (compare(r.lhs, r.rhs, cfg.order_spec, e, sig) ==
          OrderVerdict::Greater)
        outcome.promotions.push_back(r);
    }
  }
  return outcome;
}

namespace {

std::vector<RewriteRule> edown_rules(const EDown& e) {
  std::vector<RewriteRule> out;
  for (SymbolId f : e.ac_symbols()) {
    Term x = Term::var(0), y = Term::var(1), z = Term::var(2);
    auto ap = [&](const Term& a, const Term& b) { return Term::app(f, {a, b}); };
    out.emplace_back(ap(x, y), ap(y, x), RuleOrigin::Generated);
    out.emplace_back(ap(ap(x, y), z), ap(x, ap(y, z)), RuleOrigin::Generated);
    out.emplace_back(ap(x, ap(y, z)), ap(ap(x, y), z), RuleOrigin::Generated);
  }
  return out;
}

std::vector<RewriteRule> process_pair(const RewriteRule& rule1,
                                      const RewriteRule& rule2, const EDown& e,
                                      const AcLimits& limits) {
  std::vector<RewriteRule> out;
  RewriteRule rev1 = rule1.reversed();
  for (const Position& p : non_var_positions(rev1.rhs)) {
    auto os = overlaps_eq(rev1, p, rule2, e, limits);
    out.insert(out.end(), os.begin(), os.end());
  }
  for (const Position& p : non_var_positions(rule1.rhs)) {
    auto os = overlaps_eq(rule1, p, rule2, e, limits);
    out.insert(out.end(), os.begin(), os.end());
  }
  out.push_back(rev1);
  return out;
}

bool same_rules(const RewriteSystem& a, const RewriteSystem& b) {
  if (a.size() != b.size()) return false;
  auto sa = a.sorted(), sb = b.sorted();
  for (size_t i = 0; i < sa.rules().size(); ++i)
    if (compare_rules(sa.rules()[i], sb.rules()[i]) != 0) return false;
  return true;
}

}  // namespace

GenerationResult gen_extended(const std::vector<std::pair<Term, Term>>& eqs,
                              const RewriteSystem& rdown0, const EDown& e,
                              Signature& sig, const GenerationConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
  };
  auto wall_seconds = [&] { return elapsed().count() / 1000.0; };

  GenerationResult res;
  if (cfg.enable_var) sig.ensure_min_constant();

  RewriteSystem rdown = rdown0;
  GenerationStats stats;

  auto initial_r = [&]() {
    RewriteSystem r;
    for (const RewriteRule& rd : rdown.rules()) r.add(rd);
    for (auto& [s, t] : eqs) {
      r.add(RewriteRule(s, t, RuleOrigin::User));
      r.add(RewriteRule(t, s, RuleOrigin::User));
    }
    return r;
  };

  try {
    RewriteSystem r;
    // initial normalisation, promoting orientable rules into rdown
    for (size_t restart = 0;; ++restart) {
      r = initial_r();
      auto norm = normalize_rules(r, rdown, e, sig, cfg, cfg.enable_ord);
      r = std::move(norm.rules);
      if (norm.promotions.empty() || restart >= cfg.max_restarts) {
        stats.restarts = restart;
        break;
      }
      for (const RewriteRule& p : norm.promotions)
        rdown.add(RewriteRule(p.lhs, p.rhs, RuleOrigin::Rdown));
    }

    auto e_rules = edown_rules(e);
    bool fixpoint = false;
    for (size_t iter = 0; iter < cfg.max_loop_iterations; ++iter) {
      if (elapsed() > cfg.wall_clock_budget) {
        res.reason = "wall clock budget exceeded";
        break;
      }
      RewriteSystem r0 = r;
      std::vector<RewriteRule> rule1s = r.rules();
      rule1s.insert(rule1s.end(), e_rules.begin(), e_rules.end());

      std::vector<std::vector<RewriteRule>> chunks(rule1s.size());
      auto work = [&](size_t i) {
        std::vector<RewriteRule> acc;
        for (const RewriteRule& rule2 : r.rules()) {
          auto rs = process_pair(rule1s[i], rule2, e, cfg.limits);
          acc.insert(acc.end(), rs.begin(), rs.end());
        }
        return acc;
      };
      if (cfg.workers > 1 && rule1s.size() > 1) {
        std::atomic<size_t> next{0};
        auto drain = [&]() {
          for (size_t i = next.fetch_add(1); i < rule1s.size();
               i = next.fetch_add(1))
            chunks[i] = work(i);
        };
        std::vector<std::thread> pool;
        size_t n = std::min(cfg.workers, rule1s.size());
        for (size_t w = 0; w + 1 < n; ++w) pool.emplace_back(drain);
        drain();
        for (auto& th : pool) th.join();
      } else {
        for (size_t i = 0; i < rule1s.size(); ++i) chunks[i] = work(i);
      }

      RewriteSystem pool = r;
      for (auto& chunk : chunks) {
        stats.rules_generated_total += chunk.size();
        for (const RewriteRule& nr : chunk) pool.add(nr);
      }
      if (stats.rules_generated_total > cfg.max_total_rules) {
        res.reason = "generated rule cap exceeded";
        break;
      }
      auto norm = normalize_rules(pool, rdown, e, sig, cfg, false);
      r = std::move(norm.rules);
      if (same_rules(r, r0)) {
        fixpoint = true;
        break;
      }
    }
    if (!fixpoint && res.reason.empty())
      res.reason = "iteration cap exceeded";

    // identity rules for every signature symbol
    for (SymbolId f = 0; f < sig.size(); ++f) {
      std::vector<Term> xs;
      for (uint32_t i = 0; i < sig.symbol(f).arity; ++i)
        xs.push_back(Term::var(i));
      Term id_t = Term::app(f, xs);
      r.add(RewriteRule(id_t, id_t, RuleOrigin::Identity));
    }

    if (fixpoint) {
      for (const RewriteRule& rule : r.rules()) {
        std::map<VarId, uint32_t> lv, rv;
        collect_vars(rule.lhs, lv);
        collect_vars(rule.rhs, rv);
        for (auto& [v, _] : rv)
          if (!lv.count(v)) {
            fixpoint = false;
            res.reason = "rule with uncovered right-hand side variables";
          }
      }
    }

    if (fixpoint && cfg.enable_cleanup) r = cleanup_mod_edown(r, e, cfg.limits);

    res.final_r = r.sorted();
    res.final_rdown = rdown;
    res.status = fixpoint ? GenStatus::Completed : GenStatus::Inconclusive;
  } catch (const ResourceLimitError& ex) {
    res.status = GenStatus::Inconclusive;
    res.reason = ex.what();
  } catch (const StepLimitError& ex) {
    res.status = GenStatus::Inconclusive;
    res.reason = ex.what();
  }

  stats.final_count = res.final_r.size();
  stats.convergent = res.status == GenStatus::Completed &&
                     check_convergence(res.final_r, cfg.order_spec, e, sig);
  stats.wall_seconds = wall_seconds();
  res.stats = stats;
  return res;
}

RewriteSystem cleanup(const RewriteSystem& rs, const EaMatcher& ea_match) {
  std::vector<RewriteRule> rules = rs.sorted().rules();
  std::vector<bool> dead(rules.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < rules.size() && !changed; ++i) {
      if (dead[i]) continue;
      for (size_t j = 0; j < rules.size(); ++j) {
        if (i == j || dead[j]) continue;
        // does rules[j] subsume rules[i] modulo Ea?
        const RewriteRule g =
            shift_rule_vars(rules[j], max_var_base(rules[i].lhs, rules[i].rhs));
        if (!(g.lhs.is_app() && rules[i].lhs.is_app() &&
              g.lhs.sym() == rules[i].lhs.sym() &&
              g.lhs.eval_mark() == rules[i].lhs.eval_mark()))
          continue;
        PairList prob;
        for (size_t k = 0; k < g.lhs.children().size(); ++k)
          prob.emplace_back(g.lhs.children()[k], rules[i].lhs.children()[k]);
        prob.emplace_back(g.rhs, rules[i].rhs);
        if (!ea_match(prob).empty()) {
          dead[i] = true;
          changed = true;
          break;
        }
      }
    }
  }
  RewriteSystem out;
  for (size_t i = 0; i < rules.size(); ++i)
    if (!dead[i]) out.add(rules[i]);
  return out;
}

RewriteSystem cleanup_mod_edown(const RewriteSystem& rs, const EDown& e,
                                const AcLimits& limits) {
  UnifyOptions opts;
  opts.limits = limits;
  EaMatcher m = [&e, opts](const PairList& prob) {
    return match_mod(prob, e, opts);
  };
  return cleanup(rs, m);
}

bool check_convergence(const RewriteSystem& rs, const OrderSpec& spec,
                       const EDown& e, const Signature& sig) {
  for (const RewriteRule& r : rs.rules()) {
    if (r.is_identity()) continue;
    if (compare(r.lhs, r.rhs, spec, e, sig) != OrderVerdict::Greater)
      return false;
  }
  return true;
}

}  // namespace fvp
