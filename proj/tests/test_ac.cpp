#include <doctest.h>

#include <algorithm>

#include "fvp/ac.hpp"
#include "oracles.hpp"

using namespace fvp;

namespace {

struct AcSig {
  Signature sig;
  SymbolId plus, zero, a, b, f, g, dec, enc, m, r, kp;
  EDown e;
  AcSig() {
    plus = sig.add("+", 2, true);
    zero = sig.add("0", 0);
    a = sig.add("a", 0);
    b = sig.add("b", 0);
    f = sig.add("f", 1);
    g = sig.add("g", 2);
    dec = sig.add("dec", 2);
    enc = sig.add("enc", 3);
    m = sig.add("m", 0);
    r = sig.add("r", 0);
    kp = sig.add("k", 0);
    e = EDown({plus});
  }
  Term P(Term x, Term y) { return Term::app(plus, {x, y}); }
  Term A() { return Term::app(a, {}); }
  Term B() { return Term::app(b, {}); }
  Term Z() { return Term::app(zero, {}); }
  Term x() { return Term::var(0); }
  Term y() { return Term::var(1); }
};

size_t count_unifiers(const std::vector<Substitution>& v) { return v.size(); }

}  // namespace

TEST_CASE("ac_canonical identifies AC-equal terms") {
  AcSig s;
  CHECK(ac_canonical(s.P(s.P(s.A(), s.B()), Term::app(s.zero, {})), s.e) ==
        ac_canonical(s.P(s.A(), s.P(Term::app(s.zero, {}), s.B())), s.e));
  Term fa = Term::app(s.f, {s.A()});
  CHECK(ac_canonical(fa, s.e) == fa);
  CHECK(ac_canonical(s.P(s.x(), s.P(s.x(), s.y())), s.e) ==
        ac_canonical(s.P(s.P(s.y(), s.x()), s.x()), s.e));
  // idempotent
  Term t = s.P(s.P(s.B(), s.A()), s.P(s.A(), s.Z()));
  CHECK(ac_canonical(ac_canonical(t, s.e), s.e) == ac_canonical(t, s.e));
}

TEST_CASE("eq_mod basics") {
  AcSig s;
  CHECK(eq_mod(s.P(s.A(), s.B()), s.P(s.B(), s.A()), s.e));
  CHECK(!eq_mod(s.P(s.A(), s.B()), s.P(s.A(), Term::app(s.zero, {})), s.e));
  EDown empty;
  Term d = Term::app(s.dec, {s.x(), Term::app(s.kp, {})});
  CHECK(eq_mod(d, d, empty));
}

TEST_CASE("strict_eq_mod") {
  AcSig s;
  Term c = Term::app(s.kp, {});
  CHECK(strict_eq_mod(Term::app(s.g, {s.P(s.A(), s.B()), c}),
                      Term::app(s.g, {s.P(s.B(), s.A()), c}), s.e));
  // argument-wise: x+0 vs 0+x fails (x != 0 positionally)
  CHECK(!strict_eq_mod(s.P(s.x(), s.Z()), s.P(s.Z(), s.x()), s.e));
  CHECK(strict_eq_mod(s.x(), s.x(), s.e));
  CHECK(!strict_eq_mod(s.x(), s.y(), s.e));
}

TEST_CASE("ac decision procedure agrees with oracles on random terms") {
  AcSig s;
  test::TermGen gen(s.sig, {s.plus, s.zero, s.a, s.b, s.f}, 3, 20250809);
  int positives = 0;
  for (int i = 0; i < 250; ++i) {
    Term t = gen.gen(8);
    // positive pairs: random AC-step neighbours must be eq_mod-equal
    auto cls = test::ac_step_closure(t, s.e, 3, 200);
    for (size_t k = 0; k < cls.size(); k += std::max<size_t>(1, cls.size() / 4)) {
      CHECK(eq_mod(t, cls[k], s.e));
      ++positives;
    }
    // independent random pair: eq_mod must agree with the naive decision
    Term u = gen.gen(8);
    CHECK(eq_mod(t, u, s.e) == test::naive_ac_eq(t, u, s.e));
  }
  CHECK(positives > 250);
}

TEST_CASE("dio_minimal_basis examples") {
  // x1 + x2 = y1 + y2
  DioSystem sys;
  sys.rows = {{1, 1, -1, -1}};
  auto basis = dio_minimal_basis(sys);
  std::vector<std::vector<uint32_t>> expect = {
      {0, 1, 0, 1}, {0, 1, 1, 0}, {1, 0, 0, 1}, {1, 0, 1, 0}};
  CHECK(basis == expect);

  // 2x = 2y
  DioSystem sys2;
  sys2.rows = {{2, -2}};
  CHECK(dio_minimal_basis(sys2) ==
        std::vector<std::vector<uint32_t>>{{1, 1}});

  // x = y + z
  DioSystem sys3;
  sys3.rows = {{1, -1, -1}};
  CHECK(dio_minimal_basis(sys3) ==
        std::vector<std::vector<uint32_t>>{{1, 0, 1}, {1, 1, 0}});
}

TEST_CASE("dio_minimal_basis minimality property") {
  DioSystem sys;
  sys.rows = {{2, 1, -1, -3}};
  auto basis = dio_minimal_basis(sys);
  CHECK(!basis.empty());
  for (auto& v : basis) {
    int64_t sum = 0;
    for (size_t i = 0; i < v.size(); ++i) sum += sys.rows[0][i] * v[i];
    CHECK(sum == 0);
    CHECK(std::any_of(v.begin(), v.end(), [](uint32_t x) { return x > 0; }));
    for (auto& w : basis) {
      if (&v == &w) continue;
      bool dominated = true;
      for (size_t i = 0; i < v.size(); ++i)
        if (w[i] > v[i]) dominated = false;
      CHECK(!(dominated));
    }
  }
}

TEST_CASE("match_mod examples") {
  AcSig s;
  // x+y against a+b+c: all 6 two-block splits
  Term pat = s.P(Term::var(10), Term::var(11));
  Term subj = s.P(s.P(s.A(), s.B()), Term::app(s.zero, {}));
  auto ms = match_mod(pat, subj, s.e);
  CHECK(ms.size() == 6);
  for (const Substitution& m : ms)
    CHECK(eq_mod(m.apply(pat), subj, s.e));

  EDown empty;
  auto ms2 = match_mod(Term::app(s.f, {Term::var(5)}), Term::app(s.f, {s.A()}),
                       empty);
  REQUIRE(ms2.size() == 1);
  CHECK(*ms2[0].lookup(5) == s.A());

  // x+x against a+b: no split
  Term xx = s.P(Term::var(9), Term::var(9));
  CHECK(match_mod(xx, s.P(s.A(), s.B()), s.e).empty());
  // ... but a+a works
  CHECK(match_mod(xx, s.P(s.A(), s.A()), s.e).size() == 1);
}

TEST_CASE("unify_mod syntactic example") {
  AcSig s;
  EDown empty;
  // dec(x,k) =? dec(enc(m,r,k'),y)
  Term kc = Term::app(s.kp, {});
  Term en = Term::app(s.enc, {Term::app(s.m, {}), Term::app(s.r, {}), kc});
  Term t = Term::app(s.dec, {Term::var(0), kc});
  Term u = Term::app(s.dec, {en, Term::var(1)});
  auto us = unify_mod(t, u, empty);
  REQUIRE(us.size() == 1);
  CHECK(*us[0].lookup(0) == en);
  CHECK(*us[0].lookup(1) == kc);
}

TEST_CASE("unify_mod AC examples") {
  AcSig s;
  // x+y =? a+b -> exactly the two splits after minimization
  Term t = s.P(Term::var(0), Term::var(1));
  Term u = s.P(s.A(), s.B());
  auto us = unify_mod(t, u, s.e);
  CHECK(us.size() == 2);
  for (auto& m : us) CHECK(eq_mod(m.apply(t), m.apply(u), s.e));

  // x+x =? a+a -> {x -> a}
  Term xx = s.P(Term::var(0), Term::var(0));
  Term aa = s.P(s.A(), s.A());
  auto us2 = unify_mod(xx, aa, s.e);
  REQUIRE(us2.size() == 1);
  CHECK(*us2[0].lookup(0) == s.A());
}

TEST_CASE("unify_mod returns unifiers and minimal set") {
  AcSig s;
  Term t = s.P(Term::var(0), Term::var(1));
  Term u = s.P(Term::var(2), Term::var(3));
  auto us = unify_mod(t, u, s.e);
  CHECK(!us.empty());
  for (auto& m : us) CHECK(eq_mod(m.apply(t), m.apply(u), s.e));
  // no unifier is an instance of another
  for (size_t i = 0; i < us.size(); ++i)
    for (size_t j = 0; j < us.size(); ++j) {
      if (i == j) continue;
      PairList prob;
      for (VarId v : {0u, 1u, 2u, 3u}) {
        const Term* bi = us[i].lookup(v);
        const Term* bj = us[j].lookup(v);
        prob.emplace_back(bj ? *bj : Term::var(v), bi ? *bi : Term::var(v));
      }
      CHECK(match_mod(prob, s.e).empty());
    }
}

TEST_CASE("unifier soundness on random problems") {
  AcSig s;
  test::TermGen gen(s.sig, {s.plus, s.zero, s.a, s.b}, 3, 424242);
  int solved = 0;
  for (int i = 0; i < 120; ++i) {
    Term t = gen.gen(5);
    Term u = gen.gen(5);
    UnifyOptions opts;
    opts.limits.max_solutions = 5000;
    std::vector<Substitution> us;
    try {
      us = unify_mod(t, u, s.e, opts);
    } catch (const ResourceLimitError&) {
      continue;
    }
    for (auto& m : us) {
      CHECK(eq_mod(m.apply(t), m.apply(u), s.e));
      ++solved;
    }
  }
  CHECK(solved > 50);
}

TEST_CASE("unifier completeness against ground enumeration") {
  AcSig s;
  // small problems over a 2-constant AC signature
  test::TermGen gen(s.sig, {s.plus, s.a, s.b}, 2, 777);
  auto universe = test::enumerate_ground_terms(s.sig, {s.plus, s.a, s.b}, 5);
  for (int i = 0; i < 40; ++i) {
    Term t = gen.gen(4);
    Term u = gen.gen(4);
    auto us = unify_mod(t, u, s.e);
    std::vector<VarId> vars;
    {
      std::set<VarId> vs;
      for (VarId v : vars_of(t)) vs.insert(v);
      for (VarId v : vars_of(u)) vs.insert(v);
      vars.assign(vs.begin(), vs.end());
    }
    if (vars.size() > 2) continue;
    // enumerate ground substitutions
    std::vector<Substitution> grounds;
    if (vars.empty()) {
      grounds.emplace_back();
    } else if (vars.size() == 1) {
      for (const Term& g1 : universe) {
        Substitution m;
        m.bind(vars[0], g1);
        grounds.push_back(m);
      }
    } else {
      for (const Term& g1 : universe)
        for (const Term& g2 : universe) {
          if (g1.weight() + g2.weight() > 7) continue;
          Substitution m;
          m.bind(vars[0], g1);
          m.bind(vars[1], g2);
          grounds.push_back(m);
        }
    }
    for (const Substitution& gsub : grounds) {
      if (!eq_mod(gsub.apply(t), gsub.apply(u), s.e)) continue;
      // some returned unifier must generalize gsub
      bool covered = false;
      for (const Substitution& m : us) {
        PairList prob;
        for (VarId v : vars) {
          const Term* b = m.lookup(v);
          const Term* gb = gsub.lookup(v);
          prob.emplace_back(b ? *b : Term::var(v), gb ? *gb : Term::var(v));
        }
        if (!match_mod(prob, s.e).empty()) {
          covered = true;
          break;
        }
      }
      CHECK_MESSAGE(covered, "ground unifier not covered");
      if (!covered) return;
    }
  }
}

TEST_CASE("renaming stability of unify_mod") {
  AcSig s;
  Term t = s.P(Term::var(0), s.P(Term::var(1), s.A()));
  Term u = s.P(Term::var(2), s.B());
  auto us1 = count_unifiers(unify_mod(t, u, s.e));
  // rename variables 0,1,2 -> 5,6,7
  Substitution rho;
  rho.bind(0, Term::var(5));
  rho.bind(1, Term::var(6));
  rho.bind(2, Term::var(7));
  auto us2 = count_unifiers(unify_mod(rho.apply(t), rho.apply(u), s.e));
  CHECK(us1 == us2);
}
