"""Random terms, atoms and substitutions over a small bounded universe.

Used by the domain conformance harness and by the randomized substitution law checks.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass

from .terms import Atom, Struct, Substitution, Var, mgu

DEFAULT_SEED = 20240611


def seed_from_env(default: int = DEFAULT_SEED) -> int:
    value = os.environ.get("NLPABS_SEED")
    return int(value) if value else default


@dataclass
class TermSampler:
    rng: random.Random
    constants: tuple = ("a", "b", "c")
    functors: tuple = (("f", 1), ("g", 2))
    predicates: tuple = (("p", 1), ("q", 2), ("r", 3))
    max_depth: int = 3
    var_weight: float = 0.35

    def term(self, variables, depth: int | None = None):
        depth = self.max_depth if depth is None else depth
        variables = list(variables)
        r = self.rng.random()
        if variables and (depth == 0 or r < self.var_weight):
            if depth == 0 and self.rng.random() < 0.5:
                return Struct(self.rng.choice(self.constants))
            return self.rng.choice(variables)
        if depth == 0 or r < self.var_weight + 0.25:
            return Struct(self.rng.choice(self.constants))
        name, arity = self.rng.choice(self.functors)
        return Struct(name, tuple(self.term(variables, depth - 1) for _ in range(arity)))

    def ground_term(self, depth: int | None = None):
        return self.term((), depth)

    def atom(self, variables, pred=None) -> Atom:
        name, arity = pred or self.rng.choice(self.predicates)
        return Atom(name, tuple(self.term(variables, self.max_depth - 1) for _ in range(arity)))

    def atom_pair(self, u_vars, v_vars, unifiable_bias: float = 0.6):
        """Two atoms over ``u_vars`` and ``v_vars`` sharing a predicate most of the time."""
        pred = self.rng.choice(self.predicates)
        a = self.atom(u_vars, pred)
        if self.rng.random() < unifiable_bias:
            # shape B after A so the pair often unifies
            b = Atom(pred[0], tuple(self._loosen(t, v_vars) for t in a.args))
        else:
            b = self.atom(v_vars, pred)
        return a, b

    def _loosen(self, t, variables):
        variables = list(variables)
        if type(t) is Var or self.rng.random() < 0.3:
            return self.rng.choice(variables) if variables else self.ground_term(1)
        if isinstance(t, Struct) and t.args:
            return Struct(t.functor, tuple(self._loosen(a, variables) for a in t.args))
        return t

    def substitution(self, domain, range_vars=None) -> Substitution:
        """A random idempotent substitution binding a random subset of ``domain``."""
        domain = sorted(set(domain), key=lambda v: v.name)
        pool = list(range_vars) if range_vars is not None else [Var(f"W{i}") for i in range(3)]
        eqs = []
        for v in domain:
            if self.rng.random() < 0.75:
                eqs.append((v, self.term(pool + domain, 2)))
        theta = mgu(eqs)
        return theta if theta is not None else Substitution()

    def renaming(self, variables, taken=frozenset(), prefix="R") -> Substitution:
        """An injective variable renaming of ``variables`` into names outside ``taken``."""
        out = {}
        used = set(v.name for v in taken)
        n = self.rng.randrange(1000)
        for v in sorted(set(variables), key=lambda v: v.name):
            while f"{prefix}{n}" in used:
                n += 1
            used.add(f"{prefix}{n}")
            out[v] = Var(f"{prefix}{n}")
            n += self.rng.randrange(1, 4)
        return Substitution(out)

    def variables(self, prefix: str, n: int) -> list:
        return [Var(f"{prefix}{i}") for i in range(n)]
