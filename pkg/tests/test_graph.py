import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CORPUS, CORPUS_PROGRAMS, FIXTURES, read
from nlpabs.graph import build_graph
from nlpabs.syntax import DUMMY, ProgramPoint as P, parse_program
from nlpabs.terms import Struct, Var


@pytest.fixture(scope="module")
def diff_graph():
    return build_graph(parse_program(read(CORPUS / "diff.pl")))


# -- independent enumerator ------------------------------------------------
# Its own unifier over a rename-by-suffix scheme, sharing nothing with the
# package's mgu.

def _rename(t, tag):
    if type(t) is Var:
        return ("v", t.name + tag)
    return ("s", t.functor, tuple(_rename(a, tag) for a in t.args))


def _walk(t, env):
    while t[0] == "v" and t[1] in env:
        t = env[t[1]]
    return t


def _occurs(name, t, env):
    t = _walk(t, env)
    if t[0] == "v":
        return t[1] == name
    return any(_occurs(name, a, env) for a in t[2])


def _unify(a, b, env):
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x, y = _walk(x, env), _walk(y, env)
        if x == y:
            continue
        if x[0] == "v":
            if _occurs(x[1], y, env):
                return False
            env[x[1]] = y
        elif y[0] == "v":
            stack.append((y, x))
        elif x[1] != y[1] or len(x[2]) != len(y[2]):
            return False
        else:
            stack.extend(zip(x[2], y[2]))
    return True


def brute_edges(prog):
    out = set()
    for k in prog.query_indices:
        out.add((P(k, 1), DUMMY, "E0"))
    for i in list(prog.clause_indices) + list(prog.query_indices):
        for j in range(1, prog.m(i) + 1):
            q = P(i, j)
            lit = prog.literal_at(q)
            for c in prog.clause_indices:
                head = prog.head(c)
                ok = _unify(_rename(Struct(lit.atom.functor, lit.atom.args), "#l"),
                            _rename(Struct(head.functor, head.args), "#h"), {})
                if ok:
                    out.add((P(c, 1), q, "E1"))
                    if lit.positive:
                        out.add((P(i, j + 1), P(c, prog.m(c) + 1), "E2"))
            if not lit.positive:
                out.add((P(i, j + 1), q, "E3"))
    return out


def test_diff_has_23_edges(diff_graph):
    assert len(diff_graph.edges) == 23


@pytest.mark.parametrize("p, q, kind", [
    (P(5, 1), P(0, 0), "E0"),
    (P(3, 1), P(1, 1), "E1"),
    (P(1, 2), P(3, 1), "E2"),
    (P(3, 1), P(1, 2), "E1"),
    (P(1, 3), P(1, 2), "E3"),
])
def test_named_edges(diff_graph, p, q, kind):
    e = diff_graph.edge(p, q)
    assert e is not None and e.kind == kind


def test_predecessors(diff_graph):
    preds = {str(e) for e in diff_graph.predecessors(P(3, 1))}
    assert {"(3,1)<-(1,1)", "(3,1)<-(1,2)"} <= preds
    assert diff_graph.predecessors(DUMMY) == ()
    assert [str(e) for e in diff_graph.predecessors(P(1, 2))] == ["(1,2)<-(3,1)", "(1,2)<-(4,2)"]
    with pytest.raises(KeyError):
        diff_graph.predecessors(P(9, 9))


def test_point_classes(diff_graph):
    assert diff_graph.point_class(P(5, 1)) == "N0"
    assert diff_graph.point_class(P(3, 1)) == "N1"
    assert diff_graph.point_class(P(1, 3)) == "N3"
    assert diff_graph.point_class(P(1, 2)) == "N2"


def test_fact_program():
    g = build_graph(parse_program(read(FIXTURES / "fact.pl")))
    assert [(str(e), e.kind) for e in g.edges] == [
        ("(1,1)<-(2,1)", "E1"), ("(2,1)<-(0,0)", "E0"), ("(2,2)<-(1,1)", "E2"),
    ]
    assert g.pmax() == 1
    assert sum(" -> " in line for line in g.to_dot().splitlines()) == 3


def test_dot_lines(diff_graph):
    dot = diff_graph.to_dot()
    assert sum(" -> " in line for line in dot.splitlines()) == 23
    assert dot == build_graph(diff_graph.program).to_dot()


def test_json_shape(diff_graph):
    obj = json.loads(diff_graph.to_json())
    assert obj["schema"] == 1 and len(obj["edges"]) == 23 and len(obj["nodes"]) == 12
    assert {"p": [5, 1], "q": [0, 0], "class": "E0"} in obj["edges"]


@pytest.mark.parametrize("path", CORPUS_PROGRAMS, ids=lambda p: p.stem)
def test_matches_brute_force(path):
    prog = parse_program(read(path))
    g = build_graph(prog)
    assert {(e.p, e.q, e.kind) for e in g.edges} == brute_edges(prog)


@pytest.mark.parametrize("path", CORPUS_PROGRAMS, ids=lambda p: p.stem)
def test_structural_invariants(path):
    prog = parse_program(read(path))
    g = build_graph(prog)
    assert len({(e.p, e.q) for e in g.edges}) == len(g.edges)
    for e in g.edges:
        if e.kind == "E1":
            assert e.p == prog.entry(e.p.i) and prog.is_clause(e.p.i)
        elif e.kind == "E2":
            assert prog.is_exit(e.q)
            pm = prog.minus(e.p)
            assert prog.literal_at(pm).positive
            assert g.edge(prog.entry(e.q.i), pm) is not None
        elif e.kind == "E3":
            assert e.q == prog.minus(e.p) and not prog.literal_at(e.q).positive
        else:
            assert e.q == DUMMY and prog.is_query(e.p.i)
    for p in prog.points:
        if prog.has_literal(p) and not prog.literal_at(p).positive:
            assert g.edge(prog.plus(p), p).kind == "E3"
    assert g.to_json() == build_graph(parse_program(read(path))).to_json()
    classes = {p: g.point_class(p) for p in prog.points}
    for c in ("N0", "N1", "N2", "N3"):
        assert set(g.points_of_class(c)) == {p for p, k in classes.items() if k == c}


def test_unreached_clause_has_class_none():
    g = build_graph(parse_program(read(CORPUS / "unused.pl")))
    # nothing calls s/1
    assert g.point_class(P(3, 1)) == "none"


# -- generated programs ----------------------------------------------------

ARGS = st.sampled_from(["X", "Y", "a", "f(X)", "[X|Y]", "[]"])
PREDS = st.sampled_from(["p", "q"])


@st.composite
def recursive_program(draw):
    lines = []
    for _ in range(draw(st.integers(1, 5))):
        head = f"{draw(PREDS)}({draw(ARGS)})"
        body = draw(st.lists(st.tuples(st.booleans(), PREDS, ARGS), max_size=3))
        lits = [("" if pos else "\\+ ") + f"{pred}({arg})" for pos, pred, arg in body]
        lines.append(head + (" :- " + ", ".join(lits) if lits else "") + ".")
    lines.append(f":- query({draw(PREDS)}({draw(ARGS)}), []).")
    return "\n".join(lines) + "\n"


@settings(max_examples=150, deadline=None)
@given(recursive_program())
def test_point_classes_disjoint_generated(text):
    g = build_graph(parse_program(text))
    seen = {}
    for e in g.edges:
        seen.setdefault(e.p, set()).add(e.kind)
    assert all(len(kinds) == 1 for kinds in seen.values())
    parts = [set(g.points_of_class(c)) for c in ("N0", "N1", "N2", "N3", "none")]
    assert sum(map(len, parts)) == len(g.program.points)
    assert set().union(*parts) == set(g.program.points)
