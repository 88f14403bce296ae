import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

import law_checks
from nlpabs.sampling import TermSampler
from nlpabs.syntax import parse_atom, parse_term
from nlpabs.terms import (
    EMPTY, Atom, FreshNames, Struct, Substitution, Var, apply, canonical_restriction, canonicalize,
    compose, format_subst, format_term, is_ground, mgu, rename_apart, restrict, unify_open,
    variant_eq, vars_of,
)

X, Y, Z, L, K = (Var(n) for n in "XYZLK")


def t(text):
    return parse_term(text)


def subst(**kw):
    return Substitution({Var(k): t(v) for k, v in kw.items()})


# -- terms strategy --------------------------------------------------------

VARS = st.sampled_from([Var(n) for n in ("X", "Y", "Z", "W")])
CONSTS = st.sampled_from([Struct("a"), Struct("b"), Struct("[]")])
terms = st.recursive(
    st.one_of(VARS, CONSTS),
    lambda sub: st.one_of(
        st.builds(lambda a: Struct("f", (a,)), sub),
        st.builds(lambda a, b: Struct("g", (a, b)), sub, sub),
    ),
    max_leaves=6,
)


class TestVarsApply:
    def test_vars_of_member_head(self):
        assert vars_of(parse_atom("member(X, [X|L])")) == {X, L}

    def test_vars_of_constant(self):
        assert vars_of(t("a")) == frozenset()

    def test_apply_binding(self):
        assert apply(subst(X="2"), parse_atom("member(X, K)")) == parse_atom("member(2, K)")

    def test_apply_renamed_call(self):
        sigma = Substitution({Var("X1"): X, L: t("[2,1]"), K: t("[3,1]")})
        assert apply(sigma, parse_atom("member(X, L)")) == parse_atom("member(X, [2,1])")

    def test_apply_empty(self):
        a = parse_atom("p(X, f(Y))")
        assert apply(EMPTY, a) is a or apply(EMPTY, a) == a

    @given(terms, terms, terms)
    def test_apply_idempotent_on_mgu(self, a, b, c):
        theta = mgu([(a, b)])
        if theta is not None:
            once = apply(theta, c)
            assert apply(theta, once) == once
            assert theta.is_solved()


class TestCompose:
    def test_identity_left(self):
        s = subst(Y="a")
        assert compose(EMPTY, s) == s

    def test_chain(self):
        assert compose(subst(X="Y"), subst(Y="a")) == subst(X="a", Y="a")

    @given(terms, terms, terms, terms)
    def test_apply_law(self, a, b, c, d):
        t1, t2 = mgu([(a, b)]), mgu([(c, d)])
        if t1 is None or t2 is None:
            return
        for e in (a, b, c, d):
            assert apply(compose(t1, t2), e) == apply(t2, apply(t1, e))


class TestRestrict:
    def test_restriction_drops_renamed_var(self):
        s = Substitution({X: t("2"), Var("X1"): t("2"), L: t("[2,1]"), K: t("[3,1]")})
        assert restrict(s, {X, L, K}) == Substitution({X: t("2"), L: t("[2,1]"), K: t("[3,1]")})

    def test_empty_set(self):
        assert restrict(subst(X="a"), ()) == EMPTY


class TestMgu:
    def test_simple(self):
        assert mgu([(parse_atom("p(X)"), parse_atom("p(a)"))]) == subst(X="a")

    def test_worked_example(self):
        A = parse_atom("g(U0, f(V0, f(W0, W0)), V0)")
        B = parse_atom("g(f(X, Y), Z, X)")
        assert mgu([(A, B)]) == Substitution({
            Var("U0"): t("f(V0, Y)"), Z: t("f(V0, f(W0, W0))"), X: Var("V0"),
        })

    def test_occur_check(self):
        assert mgu([(X, t("f(X)"))]) is None

    def test_clash(self):
        assert mgu([(t("f(a)"), t("g(a, b)"))]) is None

    def test_member_call(self):
        theta = mgu([(parse_atom("member(X0, L0)"), parse_atom("member(X, [X|L])"))])
        assert format_subst(theta) == "{L0/[X|L], X0/X}"

    def test_deterministic(self):
        eqs = [(t("g(X, Y)"), t("g(Y, Z)"))]
        assert mgu(eqs) == mgu(list(eqs))

    @given(terms, terms)
    def test_unifies(self, a, b):
        theta = mgu([(a, b)])
        if theta is not None:
            assert apply(theta, a) == apply(theta, b)

    def test_most_general_bruteforce(self, seed):
        trials, live, bad = law_checks.check_most_general(400, seed)
        assert live > 100 and bad == []


class TestRenaming:
    def test_rename_apart_member(self):
        renamed, rho = rename_apart(parse_atom("member(X, L)"), {X})
        assert vars_of(renamed).isdisjoint({X, L})
        assert set(rho) == {X, L}

    def test_rename_constant(self):
        renamed, rho = rename_apart(t("a"), {X})
        assert renamed == t("a") and rho == EMPTY

    @given(terms, st.sets(VARS))
    def test_disjoint_from_avoid(self, term, avoid):
        renamed, rho = rename_apart(term, avoid)
        assert vars_of(renamed).isdisjoint(avoid)
        assert len(set(rho.values())) == len(rho)

    def test_fresh_generators_isolated(self):
        f1, f2 = FreshNames(), FreshNames()
        assert f1.fresh() == f2.fresh()


class TestUnifyOpen:
    def test_member_return(self):
        theta = unify_open(parse_atom("member(X, L)"), subst(L="[2,1]"),
                           parse_atom("member(X, [X|L])"), EMPTY)
        head = restrict(theta, {X, L})
        assert head == subst(X="2", L="[1]")

    def test_failure(self):
        assert unify_open(parse_atom("p(a)"), EMPTY, parse_atom("p(b)"), EMPTY) is None

    def test_renaming_invariant(self, seed):
        rng = random.Random(seed)
        sampler = TermSampler(rng)
        U, V = [Var("X"), Var("Y")], [Var("X"), Var("Z")]
        checked = 0
        for _ in range(300):
            A, B = sampler.atom_pair(U, V)
            th, om = sampler.substitution(U), sampler.substitution(V)
            r1 = unify_open(A, th, B, om, FreshNames(0))
            r2 = unify_open(A, th, B, om, FreshNames(500))
            assert (r1 is None) == (r2 is None)
            if r1 is not None:
                checked += 1
                vb = vars_of(B) | om.domain
                assert variant_eq(restrict(r1, vb), restrict(r2, vb), over=vb)
        assert checked > 50


class TestVariants:
    def test_variant_true(self):
        assert variant_eq(t("p(X, Y)"), t("p(U, V)"))

    def test_variant_false(self):
        assert not variant_eq(t("p(X, X)"), t("p(U, V)"))

    def test_canonicalize(self):
        assert format_term(canonicalize(t("p(Y, X, Y)"))) == "p(v0,v1,v0)"

    def test_canonicalize_equal(self):
        assert canonicalize(t("p(A, B)")) == canonicalize(t("p(X, Y)"))

    @given(terms)
    def test_canonicalize_idempotent(self, term):
        once = canonicalize(term)
        assert canonicalize(once) == once

    @given(terms, st.sets(VARS))
    def test_renamed_is_variant(self, term, avoid):
        renamed, _ = rename_apart(term, avoid)
        assert variant_eq(term, renamed)
        if vars_of(term):
            assert not variant_eq(term, Struct("h", (term,)))

    def test_canonical_restriction_unbound(self):
        assert canonical_restriction(subst(X="Y"), {X, Y}) == canonical_restriction(subst(Y="X"), {X, Y})

    def test_ground(self):
        assert is_ground(t("f(a, [b])")) and not is_ground(t("f(X)"))


@pytest.mark.parametrize("check", [
    law_checks.check_renaming_choice, law_checks.check_renamed_right_atom, law_checks.check_restrict_compose, law_checks.check_incremental_mgu,
])
def test_renaming_and_composition_laws(check, seed):
    trials, live, bad = check(300, seed)
    assert bad == []
    assert live > trials // 4


def test_incremental_mgu_check_detects_bad_composition(seed, monkeypatch):
    # the check must notice a composition that skips applying sigma to theta's bindings
    def broken(theta, sigma):
        out = dict(sigma)
        out.update(theta)
        return Substitution(out)

    monkeypatch.setattr(law_checks, "compose", broken)
    _, _, bad = law_checks.check_incremental_mgu(300, seed)
    assert bad


def test_atom_is_struct():
    a = Atom("p", (X,))
    assert a.pred == "p" and len(a.args) == 1
