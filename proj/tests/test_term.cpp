#include <doctest.h>

#include <functional>
#include <map>

#include "fvp/term.hpp"

using namespace fvp;

namespace {

struct Sig {
  Signature sig;
  SymbolId f, g, a, b, c, dec, enc, k;
  Sig() {
    f = sig.add("f", 2);
    g = sig.add("g", 1);
    a = sig.add("a", 0);
    b = sig.add("b", 0);
    c = sig.add("c", 0);
    dec = sig.add("dec", 2);
    enc = sig.add("enc", 3);
    k = sig.add("k", 0);
  }
  Term A() { return Term::app(a, {}); }
  Term B() { return Term::app(b, {}); }
  Term C() { return Term::app(c, {}); }
  Term F(Term x, Term y) { return Term::app(f, {x, y}); }
  Term G(Term x) { return Term::app(g, {x}); }
};

}  // namespace

TEST_CASE("subterm_at basics") {
  Sig s;
  Term x = Term::var(0);
  Term t = s.F(s.A(), s.G(s.B()));
  CHECK(subterm_at(t, {2, 1}) == s.B());
  CHECK(subterm_at(x, {}) == x);
  CHECK_THROWS_AS(subterm_at(s.G(s.A()), {2}), InvalidPositionError);
}

TEST_CASE("replace_at basics") {
  Sig s;
  Term x = Term::var(0);
  CHECK(replace_at(s.F(s.A(), s.B()), {1}, s.C()) == s.F(s.C(), s.B()));
  CHECK(replace_at(x, {}, s.G(s.A())) == s.G(s.A()));
  CHECK_THROWS_AS(replace_at(s.G(s.A()), {1, 1}, s.B()), InvalidPositionError);
}

TEST_CASE("replace/subterm round trip") {
  Sig s;
  Term t = s.F(s.G(s.A()), s.F(Term::var(1), s.B()));
  for (const Position& p : positions(t))
    CHECK(replace_at(t, p, subterm_at(t, p)) == t);
}

TEST_CASE("apply_subst") {
  Sig s;
  Term x = Term::var(0), y = Term::var(1);
  Substitution m;
  m.bind(0, s.A());
  CHECK(m.apply(s.F(x, y)) == s.F(s.A(), y));

  Substitution g;
  g.bind(0, s.G(x));  // x -> g(x), single simultaneous pass
  CHECK(g.apply(s.G(x)) == s.G(s.G(x)));
  CHECK(g.apply(s.A()) == s.A());
}

TEST_CASE("substitution distributes over replace_at at non-variable positions") {
  Sig s;
  Term x = Term::var(0);
  Term t = s.F(s.G(x), s.B());
  Term u = s.G(s.A());
  Substitution m;
  m.bind(0, s.C());
  Position p{1};
  CHECK(m.apply(replace_at(t, p, u)) == replace_at(m.apply(t), p, m.apply(u)));
}

TEST_CASE("renaming invertibility") {
  Sig s;
  Term t = s.F(Term::name(0), s.G(Term::name(1)));
  // names 0->5, 1->7 and back
  std::map<NameId, NameId> rho{{0, 5}, {1, 7}};
  std::function<Term(const Term&, bool)> rename = [&](const Term& u,
                                                      bool inverse) -> Term {
    if (u.is_name()) {
      if (!inverse) return Term::name(rho.at(u.name_id()));
      for (auto& [a, b] : rho)
        if (b == u.name_id()) return Term::name(a);
      return u;
    }
    if (!u.is_app()) return u;
    std::vector<Term> kids;
    for (const Term& c : u.children()) kids.push_back(rename(c, inverse));
    return Term::app(u.sym(), std::move(kids), u.eval_mark());
  };
  CHECK(rename(rename(t, false), true) == t);
}

TEST_CASE("mark_evaluate and TE layering") {
  Sig s;
  Term x = Term::var(0);
  Term t = Term::app(s.dec, {x, Term::app(s.k, {})});
  Term marked = mark_evaluate(t);
  CHECK(marked.is_app());
  CHECK(marked.eval_mark());
  CHECK(marked.children()[1].eval_mark());  // k is a constant app, marked
  CHECK(!marked.children()[0].is_app());    // variable unmarked
  CHECK(te_layering_ok(marked));
  CHECK(mark_evaluate(x) == x);

  Term fga = s.F(s.G(s.A()), s.B());
  Term m2 = mark_evaluate(fga);
  CHECK(m2.eval_mark());
  CHECK(m2.children()[0].eval_mark());
  CHECK(te_layering_ok(m2));
  CHECK(strip_marks(m2) == fga);

  // a mark below an unmarked app violates layering
  Term bad = Term::app(s.g, {mark_evaluate(s.A())}, false);
  CHECK(!te_layering_ok(bad));

  // substitution with unmarked images preserves layering
  Substitution sub;
  sub.bind(0, s.G(s.A()));
  CHECK(te_layering_ok(sub.apply(marked)));
}

TEST_CASE("renumber_vars canonicalizes") {
  Sig s;
  Term t1 = s.F(Term::var(7), Term::var(3));
  Term t2 = s.F(Term::var(1), Term::var(9));
  std::map<VarId, VarId> m1, m2;
  CHECK(renumber_vars(t1, m1) == renumber_vars(t2, m2));
}
