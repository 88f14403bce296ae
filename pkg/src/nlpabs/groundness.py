"""Groundness domain: an element is the set of variables known to be ground.

Ordered by reverse inclusion, so bottom is the whole universe, top is the
empty set, join is intersection and meet is union.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .domain import AbstractDomain
from .syntax import annotation_variables
from .terms import (
    Atom, FreshNames, Substitution, Var, apply, compose, format_var, is_ground, mgu,
    rename_apart, var_key, vars_of,
)


@dataclass(frozen=True)
class GroundSet:
    ground: frozenset
    universe: frozenset

    def __post_init__(self):
        if not self.ground <= self.universe:
            extra = ", ".join(sorted(v.name for v in self.ground - self.universe))
            raise ValueError(f"ground variables outside the universe: {extra}")

    def __contains__(self, v):
        return v in self.ground

    def __str__(self):
        return render_vars(self.ground)


def render_vars(vs) -> str:
    return "{" + ", ".join(format_var(v) for v in sorted(vs, key=var_key)) + "}"


def downwards(E: Substitution, ground: frozenset) -> frozenset:
    """Ground variables plus every variable in the binding of a ground variable."""
    out = set(ground)
    for x, t in E.items():
        if x in ground:
            out |= vars_of(t)
    return frozenset(out)


def upwards(E: Substitution, ground: frozenset) -> frozenset:
    """Ground variables plus every variable bound to a term over ground variables."""
    out = set(ground)
    for x, t in E.items():
        if vars_of(t) <= ground:
            out.add(x)
    return frozenset(out)


@dataclass(frozen=True)
class UnifyTrace:
    renaming: Optional[Substitution]
    zeta: frozenset
    e0: Optional[Substitution]
    eta: frozenset
    beta: frozenset
    result: GroundSet


def g_gamma_contains(element: GroundSet, theta: Substitution) -> bool:
    return all(is_ground(apply(theta, v)) for v in element.ground)


def g_unify_trace(a: Atom, theta: GroundSet, b: Atom, sigma: GroundSet,
                  renaming: Optional[Substitution] = None,
                  fresh: Optional[FreshNames] = None) -> UnifyTrace:
    """Abstract unification with every intermediate set exposed.

    ``renaming`` may fix the renaming applied to ``a``'s side; it must map
    ``vars(a)`` and ``theta`` injectively away from ``sigma.universe``.
    """
    V = sigma.universe
    if renaming is None:
        _, renaming = rename_apart(tuple(sorted(theta.universe | vars_of(a), key=var_key)),
                                   V | vars_of(b), fresh)
    a_renamed = apply(renaming, a)
    zeta = frozenset(apply(renaming, v) for v in theta.ground) | sigma.ground
    e0 = mgu([(a_renamed, b)])
    if e0 is None:
        return UnifyTrace(renaming, zeta, None, frozenset(), frozenset(), GroundSet(V, V))
    eta = downwards(e0, zeta)
    beta = upwards(e0, eta)
    return UnifyTrace(renaming, zeta, e0, eta, beta, GroundSet(beta & V, V))


def g_unify(a: Atom, theta: GroundSet, b: Atom, sigma: GroundSet,
            fresh: Optional[FreshNames] = None) -> GroundSet:
    return g_unify_trace(a, theta, b, sigma, fresh=fresh).result


class GroundnessDomain(AbstractDomain):
    name = "groundness"

    def __init__(self):
        self._fresh = FreshNames()

    def _check(self, a: GroundSet, b: GroundSet):
        if a.universe != b.universe:
            raise ValueError("elements over different variable sets")

    def leq(self, a, b) -> bool:
        self._check(a, b)
        return a.ground >= b.ground

    def join(self, a, b):
        self._check(a, b)
        return GroundSet(a.ground & b.ground, a.universe)

    def meet(self, a, b):
        self._check(a, b)
        return GroundSet(a.ground | b.ground, a.universe)

    def bot(self, variables):
        vs = frozenset(variables)
        return GroundSet(vs, vs)

    def top(self, variables):
        return GroundSet(frozenset(), frozenset(variables))

    def abstract_id(self, variables):
        return self.top(variables)

    def abstract_unify(self, a, theta, b, sigma):
        return g_unify(a, theta, b, sigma, self._fresh)

    def gamma_contains(self, element, theta) -> bool:
        return g_gamma_contains(element, theta)

    def height(self, variables) -> int:
        return len(frozenset(variables)) + 1

    def parse_annotation(self, payload, variables):
        vs = frozenset(variables)
        listed = annotation_variables(payload)
        unknown = [v.name for v in listed if v not in vs]
        if unknown:
            raise ValueError(f"annotation names variables not in the query: {', '.join(unknown)}")
        return GroundSet(frozenset(listed), vs)

    def render(self, element) -> str:
        return render_vars(element.ground)

    def to_json(self, element):
        return sorted((format_var(v) for v in element.ground), key=lambda n: var_key(Var(n)))

    def sample_element(self, rng: random.Random, variables):
        vs = sorted(frozenset(variables), key=var_key)
        return GroundSet(frozenset(v for v in vs if rng.random() < 0.5), frozenset(vs))

    def sample_concrete(self, rng, sampler, element, variables):
        theta = sampler.substitution(variables)
        loose = frozenset().union(*(vars_of(apply(theta, v)) for v in element.ground))
        grounding = Substitution({w: sampler.ground_term(2) for w in sorted(loose, key=var_key)})
        return compose(theta, grounding)
