"""Program graph: points plus the dummy start point, four classes of edges."""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .syntax import DUMMY, PointedProgram, ProgramPoint
from .terms import FreshNames, mgu, rename_apart, vars_of

EDGE_CLASSES = ("E0", "E1", "E2", "E3")
POINT_CLASSES = {"E0": "N0", "E1": "N1", "E2": "N2", "E3": "N3"}


class Edge(NamedTuple):
    """``<p <-. q>``: control may pass from ``q`` to ``p``."""

    p: ProgramPoint
    q: ProgramPoint
    kind: str

    def __str__(self):
        return f"{self.p}<-{self.q}"

    def key(self) -> str:
        return str(self)


@dataclass(frozen=True)
class ProgramGraph:
    program: PointedProgram
    nodes: tuple
    edges: tuple
    _incoming: dict
    _outgoing: dict

    def predecessors(self, q: ProgramPoint) -> tuple:
        """All edges ``<q <-. u>`` entering ``q``."""
        if q not in self._incoming and q not in self.nodes:
            raise KeyError(f"unknown program point {q}")
        return self._incoming.get(q, ())

    def successors(self, q: ProgramPoint) -> tuple:
        """All edges ``<p <-. q>`` leaving ``q``."""
        if q not in self._outgoing and q not in self.nodes:
            raise KeyError(f"unknown program point {q}")
        return self._outgoing.get(q, ())

    def edges_of(self, kind: str) -> tuple:
        return tuple(e for e in self.edges if e.kind == kind)

    def edge(self, p: ProgramPoint, q: ProgramPoint) -> Optional[Edge]:
        for e in self._incoming.get(p, ()):
            if e.q == q:
                return e
        return None

    def pmax(self) -> int:
        return max((len(v) for v in self._incoming.values()), default=0)

    def point_class(self, p: ProgramPoint) -> str:
        incoming = self._incoming.get(p, ())
        if not incoming:
            return "none"
        kinds = {e.kind for e in incoming}
        assert len(kinds) == 1, f"point {p} has incoming edges of classes {sorted(kinds)}"
        return POINT_CLASSES[kinds.pop()]

    def points_of_class(self, cls: str) -> tuple:
        return tuple(p for p in self.program.points if self.point_class(p) == cls)

    def to_json_obj(self) -> dict:
        return {
            "schema": 1,
            "nodes": [{"i": n.i, "j": n.j} for n in self.nodes],
            "edges": [{"p": list(e.p), "q": list(e.q), "class": e.kind} for e in self.edges],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=True) + "\n"

    def to_dot(self) -> str:
        return export_dot(self)


def _entry_unifiable(program: PointedProgram, q: ProgramPoint, i: int, fresh: FreshNames) -> bool:
    b = program.atom_at(q)
    h = program.head(i)
    renamed, _ = rename_apart(b, vars_of(h) | vars_of(b), fresh)
    return mgu([(renamed, h)]) is not None


def build_graph(program: PointedProgram) -> ProgramGraph:
    fresh = FreshNames()
    edges = []
    e1 = set()
    for k in program.query_indices:
        edges.append(Edge(program.entry(k), DUMMY, "E0"))
    for q in program.points:
        if not program.has_literal(q):
            continue
        for i in program.clause_indices:
            if _entry_unifiable(program, q, i, fresh):
                e1.add((program.entry(i), q))
                edges.append(Edge(program.entry(i), q, "E1"))
    for q in program.points:
        if not program.has_literal(q):
            continue
        p = program.plus(q)
        if program.literal_at(q).positive:
            for i in program.clause_indices:
                if (program.entry(i), q) in e1:
                    edges.append(Edge(p, program.exit(i), "E2"))
        else:
            edges.append(Edge(p, q, "E3"))

    edges.sort(key=lambda e: (e.p, e.q, e.kind))
    seen = {}
    for e in edges:
        prev = seen.setdefault((e.p, e.q), e.kind)
        assert prev == e.kind, f"edge {e} carries classes {prev} and {e.kind}"
    incoming, outgoing = defaultdict(list), defaultdict(list)
    for e in edges:
        incoming[e.p].append(e)
        outgoing[e.q].append(e)
    graph = ProgramGraph(
        program=program,
        nodes=(DUMMY,) + program.points,
        edges=tuple(edges),
        _incoming={k: tuple(v) for k, v in incoming.items()},
        _outgoing={k: tuple(v) for k, v in outgoing.items()},
    )
    _check_invariants(graph)
    return graph


def _check_invariants(g: ProgramGraph) -> None:
    prog = g.program
    e1 = {(e.p, e.q) for e in g.edges_of("E1")}
    for e in g.edges_of("E2"):
        pm = prog.minus(e.p)
        assert prog.literal_at(pm).positive and (prog.entry(e.q.i), pm) in e1, f"E2 edge {e} lacks witness"
    for p in prog.points:
        g.point_class(p)


_DOT_STYLE = {
    "E0": 'style=bold, color="black"',
    "E1": 'style=solid, color="blue"',
    "E2": 'style=dashed, color="darkgreen"',
    "E3": 'style=dotted, color="red"',
}


def _dot_id(p: ProgramPoint) -> str:
    return f'"{p.i}_{p.j}"'


def export_dot(g: ProgramGraph) -> str:
    lines = ["digraph program_graph {", "  rankdir=TB;"]
    for n in g.nodes:
        lines.append(f'  {_dot_id(n)} [label="({n.i},{n.j})"];')
    for e in g.edges:
        lines.append(f"  {_dot_id(e.q)} -> {_dot_id(e.p)} [{_DOT_STYLE[e.kind]}, label=\"{e.kind}\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"
