"""Edge-indexed (flat) and point-indexed (diamond) abstract equation systems.

Each equation's right-hand side is a join over a list of operands:

* ``Const``      a query's abstract substitution
* ``UnifyEntry`` call: abstract_unify(literal atom, value at caller, head, identity)
* ``UnifyExit``  return: abstract_unify(head, value at callee exit, literal atom, value at caller)
* ``Copy``       another component unchanged

An empty join is the domain's bottom.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

from .graph import Edge, ProgramGraph
from .syntax import ProgramPoint
from .terms import Atom, format_term

FLAT = "flat"
DIAMOND = "diamond"

Index = Union[Edge, ProgramPoint]


@dataclass(frozen=True)
class Const:
    value: object

    def refs(self):
        return ()


@dataclass(frozen=True)
class UnifyEntry:
    literal: Atom
    ref: Index
    head: Atom
    identity: object

    def refs(self):
        return (self.ref,)


@dataclass(frozen=True)
class UnifyExit:
    head: Atom
    ref_exit: Index
    literal: Atom
    ref_caller: Index

    def refs(self):
        return (self.ref_exit, self.ref_caller)


@dataclass(frozen=True)
class Copy:
    ref: Index

    def refs(self):
        return (self.ref,)


@dataclass(frozen=True)
class Equation:
    index: Index
    universe: frozenset
    operands: tuple


def index_key(index) -> tuple:
    if isinstance(index, Edge):
        return (tuple(index.p), tuple(index.q), index.kind)
    return (tuple(index),)


def index_label(index) -> str:
    return str(index)


class EquationSystem:
    def __init__(self, kind: str, equations):
        self.kind = kind
        self.equations = {eq.index: eq for eq in sorted(equations, key=lambda e: index_key(e.index))}
        self.order = {idx: n for n, idx in enumerate(self.equations)}
        dependents: dict = {idx: [] for idx in self.equations}
        for eq in self.equations.values():
            for op in eq.operands:
                for r in op.refs():
                    if r not in self.equations:
                        raise ValueError(f"equation {index_label(eq.index)} reads unknown index {index_label(r)}")
                    if eq.index not in dependents[r]:
                        dependents[r].append(eq.index)
        self.dependents = {k: tuple(v) for k, v in dependents.items()}

    @property
    def indices(self) -> tuple:
        return tuple(self.equations)

    def __len__(self):
        return len(self.equations)

    def dependencies(self, index) -> tuple:
        seen = []
        for op in self.equations[index].operands:
            for r in op.refs():
                if r not in seen:
                    seen.append(r)
        return tuple(seen)

    def to_json_obj(self, domain=None) -> dict:
        eqs = []
        for eq in self.equations.values():
            ops = []
            for op in eq.operands:
                if isinstance(op, Const):
                    entry = {"op": "CONST"}
                    if domain is not None:
                        entry["value"] = domain.to_json(op.value)
                elif isinstance(op, UnifyEntry):
                    entry = {"op": "UNIFY_ENTRY", "literal": format_term(op.literal),
                             "head": format_term(op.head), "refs": [index_label(op.ref)]}
                elif isinstance(op, UnifyExit):
                    entry = {"op": "UNIFY_EXIT", "head": format_term(op.head),
                             "literal": format_term(op.literal),
                             "refs": [index_label(op.ref_exit), index_label(op.ref_caller)]}
                else:
                    entry = {"op": "COPY", "refs": [index_label(op.ref)]}
                ops.append(entry)
            eqs.append({"index": index_label(eq.index), "operands": ops})
        return {"schema": 1, "kind": self.kind, "equations": eqs}

    def to_json(self, domain=None) -> str:
        return json.dumps(self.to_json_obj(domain), indent=2) + "\n"


def _missing(thetas, k):
    if k not in thetas:
        raise KeyError(f"no abstract substitution given for query {k}")
    return thetas[k]


def _by_ref(op):
    return tuple(index_key(r) for r in op.refs())


def build_flat(graph: ProgramGraph, domain, thetas: dict) -> EquationSystem:
    prog = graph.program
    equations = []
    for e in graph.edges:
        V = prog.variables(e.p.i)
        if e.kind == "E0":
            ops = [Const(_missing(thetas, e.p.i))]
        elif e.kind == "E1":
            ident = domain.abstract_id(V)
            lit, head = prog.atom_at(e.q), prog.head(e.p.i)
            ops = [UnifyEntry(lit, qu, head, ident) for qu in graph.predecessors(e.q)]
        elif e.kind == "E2":
            pm = prog.minus(e.p)
            head, lit = prog.head(e.q.i), prog.atom_at(pm)
            ops = [UnifyExit(head, qu, lit, pv)
                   for qu in graph.predecessors(e.q) for pv in graph.predecessors(pm)]
        else:
            ops = [Copy(qu) for qu in graph.predecessors(e.q)]
        equations.append(Equation(e, V, tuple(sorted(ops, key=_by_ref))))
    return EquationSystem(FLAT, equations)


def build_diamond(graph: ProgramGraph, domain, thetas: dict) -> EquationSystem:
    prog = graph.program
    equations = []
    for p in prog.points:
        V = prog.variables(p.i)
        cls = graph.point_class(p)
        incoming = graph.predecessors(p)
        if cls == "N0":
            ops = [Const(_missing(thetas, p.i))]
        elif cls == "N1":
            ident = domain.abstract_id(V)
            head = prog.head(p.i)
            ops = [UnifyEntry(prog.atom_at(e.q), e.q, head, ident) for e in incoming]
        elif cls == "N2":
            pm = prog.minus(p)
            lit = prog.atom_at(pm)
            ops = [UnifyExit(prog.head(e.q.i), e.q, lit, pm) for e in incoming]
        elif cls == "N3":
            ops = [Copy(prog.minus(p))]
        else:
            ops = []
        equations.append(Equation(p, V, tuple(sorted(ops, key=_by_ref))))
    return EquationSystem(DIAMOND, equations)


def build_system(kind: str, graph: ProgramGraph, domain, thetas: dict) -> EquationSystem:
    if kind == FLAT:
        return build_flat(graph, domain, thetas)
    if kind == DIAMOND:
        return build_diamond(graph, domain, thetas)
    raise ValueError(f"unknown semantics {kind!r}")


def evaluate(system: EquationSystem, index, env, domain):
    eq = system.equations[index]
    result = domain.bot(eq.universe)
    for op in eq.operands:
        if isinstance(op, Const):
            value = op.value
        elif isinstance(op, UnifyEntry):
            value = domain.abstract_unify(op.literal, env[op.ref], op.head, op.identity)
        elif isinstance(op, UnifyExit):
            value = domain.abstract_unify(op.head, env[op.ref_exit], op.literal, env[op.ref_caller])
        else:
            value = env[op.ref]
        result = domain.join(result, value)
    return result


def count_unify_ops(system: EquationSystem) -> int:
    return sum(
        1
        for eq in system.equations.values()
        for op in eq.operands
        if isinstance(op, (UnifyEntry, UnifyExit))
    )


def query_thetas(program, domain) -> dict:
    """Abstract substitution of every query, from its annotation."""
    from .syntax import interpret_annotation

    return {q.index: interpret_annotation(domain, program, q) for q in program.queries}
