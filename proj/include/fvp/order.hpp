#pragma once

#include "fvp/ac.hpp"
#include "fvp/term.hpp"

namespace fvp {

enum class OrderVerdict { Greater, Less, EquivModEDown, Unknown };

class RewriteSystem;  // rewrite.hpp

/// Sound partial comparator approximating an E-down-strong reduction order.
///
/// CountOrder: t > s when #symbols+#names(t) >= #(s), every per-variable
/// occurrence count in t >= the one in s, and at least one inequality is
/// strict. AC-invariant. Ground incomparable pairs are resolved by a
/// lexicographic tie-break on AC-canonical forms (declaration-order symbol
/// precedence, names by index, the minimal constant globally smallest).
///
/// ComposedOrder: CountOrder refined with a user base system whose rules must
/// all be count-decreasing; additionally certifies Greater when t rewrites to
/// s (modulo E-down) by a base rule.
struct OrderSpec {
  enum Kind { CountOrder, ComposedOrder } kind = CountOrder;
  const RewriteSystem* base = nullptr;  // ComposedOrder only
};

OrderVerdict compare(const Term& t, const Term& s, const OrderSpec& spec,
                     const EDown& e, const Signature& sig);

/// The AC-compatible total order on ground terms: count measure first, then
/// the lexicographic tie-break (minimal constant least, names by index,
/// declaration-order symbol precedence; AC argument multisets compared under
/// this same order).
int ground_compare(const Term& a, const Term& b, const Signature& sig,
                   const EDown& e);

/// Validates that every base rule strictly decreases the count measure.
void validate_composed_base(const RewriteSystem& base, const Signature& sig);

}  // namespace fvp
