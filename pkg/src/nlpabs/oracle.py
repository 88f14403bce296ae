"""Bounded execution of the stack transition system over sample queries.

A state is a tuple of stack items, top first; the empty stack is implicit.
Each item's substitution is kept as the canonical restriction to the
variables of the clause or query owning the item's destination point, so
two states are equal exactly when they agree modulo renaming item by item.
Rule 0 (stability of final states) is realized as "no successors".
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional

from .graph import Edge, ProgramGraph
from .syntax import ParseError, PointedProgram, _Parser
from .terms import (
    FreshNames, Substitution, Var, canonical_restriction, format_subst, format_var,
    mgu, unify_open, var_key,
)

DEFAULT_DEPTH = 10_000
DEFAULT_MAX_STATES = 100_000


@dataclass(frozen=True)
class StackItem:
    edge: Edge
    theta: Substitution

    def __str__(self):
        return f"||{self.edge}, {format_subst(self.theta)}||"


# -- sample queries --------------------------------------------------------


@dataclass
class SampleQuerySet:
    """Concrete substitutions per query index."""

    samples: dict = field(default_factory=dict)

    def add(self, k: int, theta: Substitution):
        self.samples.setdefault(k, []).append(theta)

    def for_query(self, k: int) -> list:
        return self.samples.get(k, [])

    def __len__(self):
        return sum(len(v) for v in self.samples.values())

    def validate(self, program: PointedProgram, domain, thetas: dict) -> None:
        for k, thetas_k in self.samples.items():
            if not program.is_query(k):
                raise ValueError(f"sample refers to unknown query {k}")
            for theta in thetas_k:
                if not domain.gamma_contains(thetas[k], theta):
                    raise ValueError(
                        f"sample {format_subst(theta)} for query {k} does not satisfy "
                        f"its annotation {domain.render(thetas[k])}")


def parse_samples(text: str, program: PointedProgram) -> SampleQuerySet:
    """Read ``sample(K, Var = Term, ...).`` lines; ``K`` is a query index or name."""
    parser = _Parser(text, allowed_ops={"="})
    out = SampleQuerySet()
    while parser.tok.kind != "eof":
        parser.anon = 0
        t = parser.tok
        if not (t.kind == "name" and t.text == "sample"):
            raise parser.error(f"expected 'sample' but found '{t.text}'")
        parser.advance()
        parser.expect("(")
        kt = parser.advance()
        try:
            key = int(kt.text) if kt.kind == "int" else kt.text
            query = program.query(key)
        except KeyError:
            raise ParseError(f"unknown query '{kt.text}'", kt.line, kt.col) from None
        allowed = program.variables(query.index)
        equations = []
        while parser.at(",", "punct"):
            parser.advance()
            vt = parser.tok
            v = parser.term()
            if type(v) is not Var:
                raise ParseError("a binding must start with a query variable", vt.line, vt.col)
            if v not in allowed:
                raise ParseError(f"variable {v.name} does not occur in query {query.index}", vt.line, vt.col)
            parser.expect("=")
            equations.append((v, parser.term()))
        parser.expect(")")
        parser.expect(".", "end")
        theta = mgu(equations)
        if theta is None:
            raise ParseError(f"bindings of sample for query {query.index} are inconsistent", t.line, t.col)
        out.add(query.index, theta)
    return out


# -- transition system -----------------------------------------------------


class TransitionSystem:
    def __init__(self, graph: ProgramGraph, fresh: Optional[FreshNames] = None):
        self.graph = graph
        self.program = graph.program
        self.fresh = fresh or FreshNames()

    def item(self, edge: Edge, theta: Substitution) -> StackItem:
        return StackItem(edge, canonical_restriction(theta, self.program.variables(edge.p.i)))

    def initial_states(self, samples: SampleQuerySet, domain=None, thetas=None) -> list:
        if domain is not None:
            samples.validate(self.program, domain, thetas)
        states = []
        for e in self.graph.edges_of("E0"):
            for theta in samples.for_query(e.p.i):
                state = (self.item(e, theta),)
                if state not in states:
                    states.append(state)
        return states

    def is_final(self, state) -> bool:
        top = state[0].edge.p
        return len(state) == 1 and self.program.is_query(top.i) and self.program.is_exit(top)

    def is_dead(self, state) -> bool:
        top = state[0].edge.p
        return len(state) == 1 and self.program.is_clause(top.i) and self.program.is_exit(top)

    def step(self, state) -> list:
        """All successor states, in a fixed order."""
        prog, graph = self.program, self.graph
        top = state[0]
        q = top.edge.p
        out = []
        if prog.has_literal(q):
            lit = prog.literal_at(q)
            for e in graph.successors(q):
                if e.kind == "E1":
                    theta = unify_open(lit.atom, top.theta, prog.head(e.p.i), Substitution(), self.fresh)
                    if theta is None:
                        continue
                    item = self.item(e, theta)
                    # rule 1a pushes; rule 1b starts a separate one-item stack
                    out.append((item,) + state if lit.positive else (item,))
                elif e.kind == "E3":
                    out.append((self.item(e, top.theta),) + state[1:])
        elif prog.is_clause(q.i) and len(state) > 1:
            caller = state[1]
            pm = caller.edge.p
            p = prog.plus(pm)
            e = graph.edge(p, q)
            if e is not None and e.kind == "E2":
                theta = unify_open(prog.head(q.i), top.theta, prog.atom_at(pm), caller.theta, self.fresh)
                if theta is not None:
                    out.append((self.item(e, theta),) + state[2:])
        return out


@dataclass
class Exploration:
    states: list
    truncated: bool
    depth: int
    final: list
    dead: list


def reachable(graph: ProgramGraph, samples: SampleQuerySet, depth_cap: int = DEFAULT_DEPTH,
              state_cap: int = DEFAULT_MAX_STATES, domain=None, thetas=None) -> Exploration:
    """Breadth-first closure of ``step`` from the initial states."""
    ts = TransitionSystem(graph)
    frontier = ts.initial_states(samples, domain, thetas)
    seen = dict.fromkeys(frontier[:state_cap])
    truncated = len(frontier) > state_cap
    frontier = list(seen)
    depth = 0
    while frontier and not truncated:
        if depth >= depth_cap:
            truncated = any(succ not in seen for state in frontier for succ in ts.step(state))
            break
        nxt = []
        for state in frontier:
            for succ in ts.step(state):
                if succ in seen:
                    continue
                if len(seen) >= state_cap:
                    truncated = True
                    break
                seen[succ] = None
                nxt.append(succ)
            if truncated:
                break
        frontier = nxt
        depth += 1
    states = list(seen)
    return Exploration(
        states=states,
        truncated=truncated,
        depth=depth,
        final=[s for s in states if ts.is_final(s)],
        dead=[s for s in states if ts.is_dead(s)],
    )


def project_edges(states) -> dict:
    """Edge -> set of (canonical) substitutions seen on any stack item."""
    buckets = defaultdict(set)
    for state in states:
        for item in state:
            buckets[item.edge].add(item.theta)
    return dict(buckets)


def final_answers(program: PointedProgram, exploration: Exploration) -> list:
    """``(query index, substitution over the query's variables)`` per final state."""
    out = list(dict.fromkeys((state[0].edge.p.i, state[0].theta) for state in exploration.final))
    out.sort(key=lambda a: (a[0], format_subst(a[1])))
    return out


# -- soundness -------------------------------------------------------------


@dataclass
class Violation:
    index: object
    substitution: Substitution
    abstract: str

    def to_json(self, kind: str) -> dict:
        key = "edge" if kind == "flat" else "point"
        return {key: str(self.index), "substitution": format_subst(self.substitution), "abstract": self.abstract}


@dataclass
class SoundnessReport:
    kind: str
    violations: list
    checked: int

    @property
    def ok(self) -> bool:
        return not self.violations


def soundness_check(projection: dict, solved: dict, domain, kind: str) -> SoundnessReport:
    """Every projected substitution must lie in the concretization of its abstract value."""
    violations = []
    checked = 0
    for edge in sorted(projection, key=lambda e: (e.p, e.q, e.kind)):
        index = edge if kind == "flat" else edge.p
        value = solved[index]
        for theta in sorted(projection[edge], key=format_subst):
            checked += 1
            if not domain.gamma_contains(value, theta):
                violations.append(Violation(index, theta, domain.render(value)))
    return SoundnessReport(kind, violations, checked)


def render_state(state) -> str:
    return " . ".join(str(item) for item in state) + " . $"


def bindings_text(theta: Substitution) -> str:
    return ", ".join(f"{format_var(v)} = {t}" for v, t in sorted(theta.items(), key=lambda kv: var_key(kv[0])))
