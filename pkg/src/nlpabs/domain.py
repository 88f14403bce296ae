"""Abstract domain interface and its conformance harness.

A domain is parameterized by a finite variable set ``V``.  The generic
semantics only use ``join``, ``bot``, ``abstract_id`` and
``abstract_unify``; the remaining operations exist so that the lattice
and concretization conditions can be checked on samples.
"""

from __future__ import annotations

import abc
import random
from dataclasses import dataclass, field

from .sampling import TermSampler
from .terms import Atom, FreshNames, Substitution, Var, unify_open


class AbstractDomain(abc.ABC):
    name = "abstract"

    @abc.abstractmethod
    def leq(self, a, b) -> bool: ...

    @abc.abstractmethod
    def join(self, a, b): ...

    @abc.abstractmethod
    def meet(self, a, b): ...

    @abc.abstractmethod
    def bot(self, variables): ...

    @abc.abstractmethod
    def top(self, variables): ...

    @abc.abstractmethod
    def abstract_id(self, variables):
        """Least element whose concretization contains the empty substitution."""

    @abc.abstractmethod
    def abstract_unify(self, a: Atom, theta, b: Atom, sigma):
        """Describe ``unify(a, t, b, s)`` for ``t`` in gamma(theta), ``s`` in gamma(sigma).

        ``theta`` ranges over the variables of ``a``'s owner, ``sigma`` and
        the result over those of ``b``'s owner.
        """

    @abc.abstractmethod
    def gamma_contains(self, element, theta: Substitution) -> bool: ...

    @abc.abstractmethod
    def height(self, variables) -> int:
        """Bound on the length of strictly increasing chains over ``variables``."""

    @abc.abstractmethod
    def parse_annotation(self, payload, variables): ...

    @abc.abstractmethod
    def render(self, element) -> str: ...

    def universe(self, element) -> frozenset:
        """Variable set the element ranges over."""
        return element.universe

    def to_json(self, element):
        return self.render(element)

    def join_all(self, elements, variables):
        result = self.bot(variables)
        for e in elements:
            result = self.join(result, e)
        return result

    # sampling hooks for the conformance harness

    def sample_element(self, rng: random.Random, variables):
        raise NotImplementedError

    def sample_concrete(self, rng: random.Random, sampler: TermSampler, element, variables):
        """A substitution in gamma(element) over ``variables``, by rejection."""
        for _ in range(200):
            theta = sampler.substitution(variables)
            if self.gamma_contains(element, theta):
                return theta
        return None


@dataclass
class LawResult:
    law: str
    trials: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass
class ConformanceReport:
    domain: str
    laws: dict = field(default_factory=dict)

    def law(self, name) -> LawResult:
        return self.laws.setdefault(name, LawResult(name))

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.laws.values())

    def failed(self) -> list:
        return [name for name, r in self.laws.items() if not r.ok]

    def summary(self) -> str:
        lines = []
        for name, r in self.laws.items():
            status = "pass" if r.ok else f"FAIL ({len(r.failures)})"
            lines.append(f"{name:<28} {r.trials:>6} trials  {status}")
        return "\n".join(lines)


def _record(report, name, ok, detail):
    r = report.law(name)
    r.trials += 1
    if not ok and len(r.failures) < 20:
        r.failures.append(detail)


def conformance_suite(domain: AbstractDomain, trials: int = 1000, seed: int = 0,
                      max_vars: int = 4) -> ConformanceReport:
    """Check the lattice, concretization and abstract-unification laws on samples.

    Laws: C1 (lattice: bounds, idempotence, commutativity, associativity,
    absorption, lub/glb, antisymmetry), C2 (gamma monotone; join keeps
    concretizations), C3 (empty substitution in gamma of the abstract
    identity), C4 (abstract unification covers sampled concrete unification),
    plus monotonicity of abstract_unify in both abstract arguments and the
    chain-height bound.
    """
    rng = random.Random(seed)
    sampler = TermSampler(rng)
    fresh = FreshNames()
    report = ConformanceReport(domain.name)

    for t in range(trials):
        n = rng.randint(0, max_vars)
        V = [Var(n_) for n_ in ("X", "Y", "Z", "W")[:n]]
        a = domain.sample_element(rng, V)
        b = domain.sample_element(rng, V)
        c = domain.sample_element(rng, V)
        bot, top = domain.bot(V), domain.top(V)
        leq, join, meet = domain.leq, domain.join, domain.meet
        ctx = (domain.render(a), domain.render(b), domain.render(c))

        _record(report, "C1 bounds", leq(bot, a) and leq(a, top), ctx)
        _record(report, "C1 idempotence", join(a, a) == a and meet(a, a) == a, ctx)
        _record(report, "C1 commutativity", join(a, b) == join(b, a) and meet(a, b) == meet(b, a), ctx)
        _record(report, "C1 associativity",
                join(join(a, b), c) == join(a, join(b, c)) and meet(meet(a, b), c) == meet(a, meet(b, c)), ctx)
        _record(report, "C1 absorption", join(a, meet(a, b)) == a and meet(a, join(a, b)) == a, ctx)
        j, m = join(a, b), meet(a, b)
        _record(report, "C1 lub/glb",
                leq(a, j) and leq(b, j) and leq(m, a) and leq(m, b)
                and (not (leq(a, c) and leq(b, c)) or leq(j, c))
                and (not (leq(c, a) and leq(c, b)) or leq(c, m)), ctx)
        _record(report, "C1 antisymmetry", not (leq(a, b) and leq(b, a)) or a == b, ctx)

        theta = domain.sample_concrete(rng, sampler, a, V)
        if theta is not None:
            _record(report, "C2 gamma monotone",
                    domain.gamma_contains(a, theta) and domain.gamma_contains(join(a, b), theta)
                    and (not leq(a, c) or domain.gamma_contains(c, theta)),
                    ctx + (str(theta),))
        _record(report, "C3 identity", domain.gamma_contains(domain.abstract_id(V), Substitution()), ctx)

        # abstract unification: A over U, B over V
        U = [Var(n_) for n_ in ("U", "V", "W", "X")[:rng.randint(0, max_vars)]]
        Vb = [Var(n_) for n_ in ("X", "Y", "Z")[:rng.randint(0, 3)]]
        A, B = sampler.atom_pair(U, Vb)
        th_a = domain.sample_element(rng, U)
        sg_b = domain.sample_element(rng, Vb)
        result = domain.abstract_unify(A, th_a, B, sg_b)
        th_c = domain.sample_concrete(rng, sampler, th_a, U)
        sg_c = domain.sample_concrete(rng, sampler, sg_b, Vb)
        if th_c is not None and sg_c is not None:
            eta = unify_open(A, th_c, B, sg_c, fresh)
            if eta is not None:
                _record(report, "C4 unify soundness", domain.gamma_contains(result, eta),
                        (str(A), domain.render(th_a), str(B), domain.render(sg_b), str(th_c), str(sg_c), str(eta)))
        th_up = domain.join(th_a, domain.sample_element(rng, U))
        sg_up = domain.join(sg_b, domain.sample_element(rng, Vb))
        _record(report, "unify monotone",
                domain.leq(result, domain.abstract_unify(A, th_up, B, sg_up)),
                (str(A), str(B), domain.render(th_a), domain.render(th_up)))

        if t % 10 == 0:
            _record(report, "height bound", _longest_chain(domain, rng, V) <= domain.height(V), ctx)
    return report


def _longest_chain(domain, rng, V) -> int:
    """Length of a greedily built strictly increasing chain from bottom."""
    current = domain.bot(V)
    length = 1
    top = domain.top(V)
    for _ in range(64):
        if current == top:
            break
        candidate = domain.join(current, domain.sample_element(rng, V))
        if candidate != current:
            if not domain.leq(current, candidate):
                return 10 ** 6
            current = candidate
            length += 1
    return length
