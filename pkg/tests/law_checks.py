"""Randomized checks of renaming and composition laws over a bounded term universe.

Each ``check_*`` returns ``(trials, non_vacuous, counterexamples)``.
"""

from __future__ import annotations

import itertools
import random

from nlpabs.sampling import TermSampler
from nlpabs.terms import (
    Struct, Substitution, Var, apply, compose, is_instance_of, mgu, restrict, variant_eq, vars_of,
)

A_VARS = [Var(n) for n in ("X0", "X1", "X2")]
B_VARS = [Var(n) for n in ("Y0", "Y1", "Y2")]


def _renaming(sampler, domain, taken, prefix):
    return sampler.renaming(domain, taken=frozenset(taken) | frozenset(domain), prefix=prefix)


def check_renaming_choice(trials: int, seed: int):
    """Renaming the right atom apart in two ways: (a) unifiability, (b) and (c) answers."""
    rng = random.Random(seed)
    sampler = TermSampler(rng)
    bad, live = [], 0
    for _ in range(trials):
        shared = rng.random() < 0.3
        A, B = sampler.atom_pair(A_VARS, A_VARS if shared else B_VARS)
        dom = vars_of(B) | frozenset(rng.sample(B_VARS, rng.randint(0, 2)))
        taken = vars_of(A) | vars_of(B)
        r1 = _renaming(sampler, dom, taken, "R")
        r2 = _renaming(sampler, dom, taken | r1.range_vars(), "S")
        m1, m2 = mgu([(A, apply(r1, B))]), mgu([(A, apply(r2, B))])
        if (m1 is None) != (m2 is None):
            bad.append(("a", A, B, r1, r2))
            continue
        if m1 is None:
            continue
        live += 1
        if not variant_eq(restrict(m1, vars_of(A)), restrict(m2, vars_of(A)), over=vars_of(A)):
            bad.append(("b", A, B, r1, r2))
        c1 = restrict(compose(r1, m1), r1.domain)
        c2 = restrict(compose(r2, m2), r2.domain)
        if not variant_eq(c1, c2, over=r1.domain):
            bad.append(("c", A, B, r1, r2))
    return trials, live, bad


def check_renamed_right_atom(trials: int, seed: int):
    """mgu(A,B) and rho o mgu(A,B rho) agree on vars(B) modulo renaming."""
    rng = random.Random(seed)
    sampler = TermSampler(rng)
    bad, live = [], 0
    for _ in range(trials):
        A, B = sampler.atom_pair(A_VARS, B_VARS)
        dom = vars_of(B) | frozenset(rng.sample(B_VARS, rng.randint(0, 1)))
        rho = _renaming(sampler, dom, vars_of(A) | vars_of(B), "R")
        direct, renamed = mgu([(A, B)]), mgu([(A, apply(rho, B))])
        if (direct is None) != (renamed is None):
            bad.append(("unifiability", A, B, rho))
            continue
        if direct is None:
            continue
        live += 1
        vb = vars_of(B)
        if not variant_eq(restrict(direct, vb), restrict(compose(rho, renamed), vb), over=vb):
            bad.append(("answer", A, B, rho))
    return trials, live, bad


def check_restrict_compose(trials: int, seed: int):
    """(t1 o t2) restricted to V equals ((t1 restricted to V) o t2) restricted to V."""
    rng = random.Random(seed)
    sampler = TermSampler(rng)
    pool = A_VARS + B_VARS
    bad = []
    for _ in range(trials):
        t1 = sampler.substitution(rng.sample(pool, rng.randint(0, 4)), pool)
        t2 = sampler.substitution(rng.sample(pool, rng.randint(0, 4)), pool)
        V = rng.sample(pool, rng.randint(0, len(pool)))
        lhs = restrict(compose(t1, t2), V)
        rhs = restrict(compose(restrict(t1, V), t2), V)
        if lhs != rhs:
            bad.append((t1, t2, V))
    return trials, trials, bad


def _equations(sampler, rng, pool, n):
    return [(sampler.term(pool, 2), sampler.term(pool, 2)) for _ in range(n)]


def check_incremental_mgu(trials: int, seed: int):
    """mgu(E1) o mgu(E2 mgu(E1)) is an mgu of E1 and E2 together."""
    rng = random.Random(seed)
    sampler = TermSampler(rng, var_weight=0.5)
    pool = A_VARS + B_VARS[:1]
    bad, live = [], 0
    for _ in range(trials):
        e1 = _equations(sampler, rng, pool, rng.randint(0, 2))
        e2 = _equations(sampler, rng, pool, rng.randint(0, 2))
        both = mgu(e1 + e2)
        t1 = mgu(e1)
        t2 = None if t1 is None else mgu(apply(t1, e2))
        if t2 is None:
            if both is not None:
                bad.append((e1, e2))
            continue
        live += 1
        over = vars_of(e1 + e2)
        if both is None or not variant_eq(compose(t1, t2), both, over=over):
            bad.append((e1, e2))
    return trials, live, bad


# -- most generality by brute force ----------------------------------------

SMALL_GROUND = (Struct("a"), Struct("b"), Struct("f", (Struct("a"),)), Struct("f", (Struct("b"),)))


def brute_force_unifiers(equations):
    vs = sorted(vars_of(equations))
    for combo in itertools.product(SMALL_GROUND, repeat=len(vs)):
        delta = dict(zip(vs, combo))
        if all(apply(delta, l) == apply(delta, r) for l, r in equations):
            yield delta


def check_most_general(trials: int, seed: int):
    rng = random.Random(seed)
    sampler = TermSampler(rng, constants=("a", "b"), functors=(("f", 1), ("g", 2)), max_depth=2, var_weight=0.5)
    pool = [Var("X"), Var("Y"), Var("Z")]
    bad, live = [], 0
    for _ in range(trials):
        eqs = [(sampler.term(pool, 2), sampler.term(pool, 2)) for _ in range(rng.randint(1, 2))]
        theta = mgu(eqs)
        over = sorted(vars_of(eqs))
        found = list(brute_force_unifiers(eqs))
        if theta is None:
            if found:
                bad.append(("missed", eqs))
            continue
        if any(apply(theta, l) != apply(theta, r) for l, r in eqs):
            bad.append(("not a unifier", eqs))
            continue
        live += 1
        for delta in found:
            if not is_instance_of(Substitution(delta), theta, over):
                bad.append(("not most general", eqs, delta))
                break
    return trials, live, bad
