#include "fvp/order.hpp"

#include <algorithm>
#include <map>

#include "fvp/rewrite.hpp"

namespace fvp {

namespace {

// counts comparison: 1 = greater, -1 = less, 0 = all counts equal,
// 2 = incomparable
int compare_counts(const Term& t, const Term& s) {
  std::map<VarId, uint32_t> vt, vs;
  collect_vars(t, vt);
  collect_vars(s, vs);
  bool ge = t.weight() >= s.weight();
  bool le = t.weight() <= s.weight();
  for (auto& [v, c] : vt) {
    uint32_t o = vs.count(v) ? vs[v] : 0;
    if (c > o) le = false;
    if (c < o) ge = false;
  }
  for (auto& [v, c] : vs)
    if (!vt.count(v)) ge = false;
  bool strict = t.weight() != s.weight();
  if (!strict) {
    for (auto& [v, c] : vt)
      if ((vs.count(v) ? vs[v] : 0) != c) strict = true;
    for (auto& [v, c] : vs)
      if (!vt.count(v)) strict = true;
  }
  if (ge && le) return 0;
  if (ge && strict) return 1;
  if (le && strict) return -1;
  return 2;
}

}  // namespace

int ground_compare(const Term& a, const Term& b, const Signature& sig,
                   const EDown& e) {
  if (a.weight() != b.weight()) return a.weight() < b.weight() ? -1 : 1;
  auto amin = sig.min_constant();
  bool a_is_min = a.is_app() && amin && a.sym() == *amin;
  bool b_is_min = b.is_app() && amin && b.sym() == *amin;
  if (a_is_min || b_is_min) {
    if (a_is_min && b_is_min) return 0;
    return a_is_min ? -1 : 1;
  }
  if (a.is_name() || b.is_name()) {
    if (a.is_name() && b.is_name())
      return a.name_id() < b.name_id() ? -1 : a.name_id() > b.name_id() ? 1 : 0;
    return a.is_name() ? -1 : 1;
  }
  if (a.sym() != b.sym()) return a.sym() < b.sym() ? -1 : 1;
  if (!e.is_ac(a.sym())) {
    for (size_t i = 0; i < a.children().size(); ++i) {
      int c = ground_compare(a.children()[i], b.children()[i], sig, e);
      if (c != 0) return c;
    }
    return 0;
  }
  // AC root: compare flattened argument lists sorted under this same order,
  // length first. Sorting and comparing with one order keeps the comparison
  // closed under contexts.
  std::vector<Term> xs, ys;
  flatten(a, a.sym(), xs);
  flatten(b, b.sym(), ys);
  auto less = [&](const Term& u, const Term& v) {
    return ground_compare(u, v, sig, e) < 0;
  };
  std::sort(xs.begin(), xs.end(), less);
  std::sort(ys.begin(), ys.end(), less);
  if (xs.size() != ys.size()) return xs.size() < ys.size() ? -1 : 1;
  for (size_t i = 0; i < xs.size(); ++i) {
    int c = ground_compare(xs[i], ys[i], sig, e);
    if (c != 0) return c;
  }
  return 0;
}

OrderVerdict compare(const Term& t, const Term& s, const OrderSpec& spec,
                     const EDown& e, const Signature& sig) {
  if (eq_mod(t, s, e)) return OrderVerdict::EquivModEDown;
  int c = compare_counts(t, s);
  if (c == 1) return OrderVerdict::Greater;
  if (c == -1) return OrderVerdict::Less;
  if (t.ground() && s.ground()) {
    int g = ground_compare(t, s, sig, e);
    if (g > 0) return OrderVerdict::Greater;
    if (g < 0) return OrderVerdict::Less;
    return OrderVerdict::EquivModEDown;  // unreachable after eq_mod
  }
  if (spec.kind == OrderSpec::ComposedOrder && spec.base) {
    for (const Term& u : class_rewrite_steps(t, *spec.base, e))
      if (eq_mod(u, s, e)) return OrderVerdict::Greater;
    for (const Term& u : class_rewrite_steps(s, *spec.base, e))
      if (eq_mod(u, t, e)) return OrderVerdict::Less;
  }
  return OrderVerdict::Unknown;
}

void validate_composed_base(const RewriteSystem& base, const Signature& sig) {
  for (const RewriteRule& r : base.rules()) {
    if (compare_counts(r.lhs, r.rhs) != 1)
      throw SignatureError(
          "composed order base rule does not strictly decrease the count "
          "measure: " +
          to_string(r.lhs, sig) + " -> " + to_string(r.rhs, sig));
  }
}

}  // namespace fvp
