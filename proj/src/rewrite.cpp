#include "fvp/rewrite.hpp"

#include <algorithm>

namespace fvp {

RewriteRule RewriteRule::renumbered() const {
  std::map<VarId, VarId> m;
  Term l = renumber_vars(lhs, m);
  Term r = renumber_vars(rhs, m);
  return RewriteRule(std::move(l), std::move(r), origin);
}

int compare_rules(const RewriteRule& a, const RewriteRule& b) {
  int c = compare_syntactic(a.lhs, b.lhs);
  if (c != 0) return c;
  return compare_syntactic(a.rhs, b.rhs);
}

bool RewriteSystem::find_dup(const RewriteRule& canon) const {
  if (!index_.count({canon.lhs.hash(), canon.rhs.hash()})) return false;
  for (const RewriteRule& r : rules_)
    if (r.lhs == canon.lhs && r.rhs == canon.rhs) return true;
  return false;
}

bool RewriteSystem::add(const RewriteRule& r) {
  RewriteRule canon = r.renumbered();
  if (find_dup(canon)) return false;
  index_.insert({canon.lhs.hash(), canon.rhs.hash()});
  rules_.push_back(std::move(canon));
  return true;
}

bool RewriteSystem::contains(const RewriteRule& r) const {
  return find_dup(r.renumbered());
}

void RewriteSystem::sort_canonical() {
  std::sort(rules_.begin(), rules_.end(),
            [](const RewriteRule& a, const RewriteRule& b) {
              return compare_rules(a, b) < 0;
            });
}

RewriteSystem RewriteSystem::sorted() const {
  RewriteSystem out = *this;
  out.sort_canonical();
  return out;
}

namespace {

/// Renames rule variables out of the way of the subject's variables.
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
  Term l = go(r.lhs);
  Term rr = go(r.rhs);
  return RewriteRule(std::move(l), std::move(rr), r.origin);
}

VarId var_base(const Term& t) {
  VarId m = 0;
  for (VarId v : vars_of(t)) m = std::max(m, v + 1);
  return m;
}

}  // namespace

std::vector<RewriteStep> rewrite_steps(const Term& t, const RewriteSystem& rs,
                                       const EDown& e, const AcLimits& limits) {
  std::vector<RewriteStep> out;
  VarId base = var_base(t);
  UnifyOptions opts;
  opts.limits = limits;
  for (const Position& p : positions(t)) {
    Term sub = subterm_at(t, p);
    if (sub.is_var()) continue;
    for (size_t ri = 0; ri < rs.rules().size(); ++ri) {
      RewriteRule rule = shift_rule(rs.rules()[ri], base);
      for (const Substitution& m : match_mod(rule.lhs, sub, e, opts))
        out.push_back({replace_at(t, p, m.apply(rule.rhs)), ri, p});
    }
  }
  return out;
}

namespace {

/// Class rewriting at one AC-canonical term, all results, canonical forms.
/// `first_only` stops at the first redex under the deterministic strategy.
void class_steps_rec(const Term& t, const RewriteSystem& rs, const EDown& e,
                     const AcLimits& limits, bool first_only,
                     std::vector<Term>& out) {
  const Term canon = ac_canonical(t, e);
  VarId base = var_base(canon);
  UnifyOptions opts;
  opts.limits = limits;

  std::vector<Term> results;

  // Enumerate canonical positions; AC nodes inside a same-symbol spine are
  // covered by the extended match at the top of that spine.
  std::vector<std::pair<Position, Term>> spots;
  std::function<void(const Term&, Position&, bool)> collect =
      [&](const Term& cur, Position& pos, bool under_same_ac) {
        if (!cur.is_app()) return;
        bool ac_root = e.is_ac(cur.sym());
        if (!(ac_root && under_same_ac)) spots.emplace_back(pos, cur);
        for (uint32_t i = 0; i < cur.children().size(); ++i) {
          pos.push_back(i + 1);
          collect(cur.children()[i], pos,
                  ac_root && cur.children()[i].is_app() &&
                      cur.children()[i].sym() == cur.sym());
          pos.pop_back();
        }
      };
  Position p0;
  collect(canon, p0, false);
  // innermost-first, stable: deeper spots first, then left to right
  std::stable_sort(spots.begin(), spots.end(),
                   [](const auto& a, const auto& b) {
                     if (a.first.size() != b.first.size())
                       return a.first.size() > b.first.size();
                     return a.first < b.first;
                   });

  for (auto& [pos, sub] : spots) {
    for (size_t ri = 0; ri < rs.rules().size(); ++ri) {
      RewriteRule rule = shift_rule(rs.rules()[ri], base + 1);
      const bool ac_slice = sub.is_app() && e.is_ac(sub.sym()) &&
                            rule.lhs.is_app() && rule.lhs.sym() == sub.sym();
      std::vector<Term> reps;
      // exact match at this spot
      for (const Substitution& m : match_mod(rule.lhs, sub, e, opts))
        reps.push_back(m.apply(rule.rhs));
      if (ac_slice) {
        // extended match: lhs + extension variable against the AC layer
        Term ext = Term::var(base);
        Term pat = Term::app(sub.sym(), {rule.lhs, ext});
        for (const Substitution& m : match_mod(pat, sub, e, opts)) {
          Term tail = m.apply(ext);
          reps.push_back(Term::app(sub.sym(), {m.apply(rule.rhs), tail}));
        }
      }
      for (const Term& rep : reps) {
        results.push_back(ac_canonical(replace_at(canon, pos, rep), e));
        if (first_only) {
          out = std::move(results);
          return;
        }
      }
    }
  }
  out = std::move(results);
}

}  // namespace

std::vector<Term> class_rewrite_steps(const Term& t, const RewriteSystem& rs,
                                      const EDown& e, const AcLimits& limits) {
  std::vector<Term> out;
  class_steps_rec(t, rs, e, limits, false, out);
  std::sort(out.begin(), out.end(), TermLess{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<Term> class_rewrite_once(const Term& t, const RewriteSystem& rs,
                                       const EDown& e, const AcLimits& limits) {
  std::vector<Term> out;
  class_steps_rec(t, rs, e, limits, true, out);
  if (out.empty()) return std::nullopt;
  return out.front();
}

Term normal_form(const Term& t, const RewriteSystem& rdown, const EDown& e,
                 size_t max_steps, const AcLimits& limits) {
  Term cur = t;
  for (size_t step = 0; step < max_steps; ++step) {
    // leftmost-innermost: smallest position depth last; we scan positions in
    // preorder and pick the deepest-first match deterministically
    std::vector<Position> pos = positions(cur);
    std::stable_sort(pos.begin(), pos.end(),
                     [](const Position& a, const Position& b) {
                       if (a.size() != b.size()) return a.size() > b.size();
                       return a < b;
                     });
    bool stepped = false;
    VarId base = var_base(cur);
    UnifyOptions opts;
    opts.limits = limits;
    for (const Position& p : pos) {
      Term sub = subterm_at(cur, p);
      if (sub.is_var()) continue;
      for (size_t ri = 0; ri < rdown.rules().size() && !stepped; ++ri) {
        RewriteRule rule = shift_rule(rdown.rules()[ri], base);
        auto ms = match_mod(rule.lhs, sub, e, opts);
        if (!ms.empty()) {
          cur = replace_at(cur, p, ms.front().apply(rule.rhs));
          stepped = true;
        }
      }
      if (stepped) break;
    }
    if (!stepped) return cur;
  }
  throw StepLimitError("normal_form");
}

Term class_normal_form(const Term& t, const RewriteSystem& rdown,
                       const EDown& e, size_t max_steps,
                       const AcLimits& limits) {
  Term cur = ac_canonical(t, e);
  for (size_t step = 0; step < max_steps; ++step) {
    auto next = class_rewrite_once(cur, rdown, e, limits);
    if (!next) return cur;
    cur = *next;
  }
  throw StepLimitError("class_normal_form");
}

bool is_irreducible(const Term& t, const RewriteSystem& rdown, const EDown& e,
                    const AcLimits& limits) {
  return rewrite_steps(t, rdown, e, limits).empty();
}

bool is_class_irreducible(const Term& t, const RewriteSystem& rdown,
                          const EDown& e, const AcLimits& limits) {
  return !class_rewrite_once(t, rdown, e, limits).has_value();
}

}  // namespace fvp
