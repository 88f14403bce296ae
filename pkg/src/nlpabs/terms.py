"""First-order terms, atoms, literals and substitutions.

Terms are immutable and hashable.  A substitution is kept in idempotent
solved form: no bound variable occurs in any right-hand side.  ``mgu``
returns ``None`` for failure (including occur-check violations).
"""

from __future__ import annotations

import itertools
import re
from typing import Iterable, Iterator, Mapping, Optional, Union

FRESH_PREFIX = "_G"
_FRESH_RE = re.compile(r"_G\d+\Z")


class Var:
    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("var", name))

    def __eq__(self, other):
        return type(other) is Var and other.name == self.name

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "Var"):
        return var_key(self) < var_key(other)

    def __repr__(self):
        return f"Var({self.name!r})"

    def __str__(self):
        return self.name


def is_fresh_name(name: str) -> bool:
    return bool(_FRESH_RE.match(name))


def var_key(v: Var):
    """Stable total order on variables.

    User variables sort before generated ones; generated ones sort by
    counter value.  ``mgu`` binds the greater of two variables, so
    generated names are eliminated in favour of program variables.
    """
    if _FRESH_RE.match(v.name):
        return (1, int(v.name[2:]), "")
    return (0, 0, v.name)


class Struct:
    """A compound term ``f(t1,...,tn)``; constants have no arguments."""

    __slots__ = ("functor", "args", "_hash", "_ground")

    def __init__(self, functor: str, args: tuple = ()):
        self.functor = functor
        self.args = tuple(args)
        self._hash = hash((type(self).__name__, functor, self.args))
        self._ground = None

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def indicator(self) -> tuple:
        return (self.functor, len(self.args))

    def __eq__(self, other):
        return (
            type(other) is type(self)
            and other._hash == self._hash
            and other.functor == self.functor
            and other.args == self.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"{type(self).__name__}({self.functor!r}, {self.args!r})"

    def __str__(self):
        return format_term(self)


class Atom(Struct):
    """A predicate applied to terms.  Never appears as a term argument."""

    __slots__ = ()

    @property
    def pred(self) -> str:
        return self.functor


Term = Union[Var, Struct]

NIL = Struct("[]")


def cons(head: Term, tail: Term) -> Struct:
    return Struct(".", (head, tail))


def make_list(items: Iterable[Term], tail: Term = NIL) -> Term:
    result = tail
    for item in reversed(list(items)):
        result = cons(item, result)
    return result


def const(name) -> Struct:
    return Struct(str(name))


class Literal:
    __slots__ = ("positive", "atom", "_hash")

    def __init__(self, atom: Atom, positive: bool = True):
        self.atom = atom
        self.positive = positive
        self._hash = hash(("lit", positive, atom))

    @property
    def negative(self) -> bool:
        return not self.positive

    def __eq__(self, other):
        return (
            type(other) is Literal
            and other.positive == self.positive
            and other.atom == self.atom
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Literal({self.atom!r}, positive={self.positive})"

    def __str__(self):
        return str(self.atom) if self.positive else f"\\+ {self.atom}"


# -- traversal -------------------------------------------------------------


def _iter_vars(e) -> Iterator[Var]:
    """Yield variables in left-to-right first-occurrence order (with repeats)."""
    stack = [e]
    while stack:
        t = stack.pop()
        if type(t) is Var:
            yield t
        elif isinstance(t, Struct):
            stack.extend(reversed(t.args))
        elif type(t) is Literal:
            stack.append(t.atom)
        elif isinstance(t, (tuple, list)):
            stack.extend(reversed(t))
        elif isinstance(t, Substitution):
            for v, s in t.items():
                stack.append(s)
                stack.append(v)
        elif hasattr(t, "expressions"):
            stack.extend(reversed(list(t.expressions())))
        else:
            raise TypeError(f"not an expression: {t!r}")


def vars_of(e) -> frozenset:
    """The set of variables occurring in an expression."""
    if isinstance(e, Struct) and e._ground is True:
        return frozenset()
    return frozenset(_iter_vars(e))


def is_ground(t) -> bool:
    if type(t) is Var:
        return False
    if isinstance(t, Struct):
        if t._ground is None:
            t._ground = all(is_ground(a) for a in t.args)
        return t._ground
    return not vars_of(t)


def occurs(v: Var, t) -> bool:
    if type(t) is Var:
        return t == v
    if isinstance(t, Struct):
        if t._ground:
            return False
        return any(occurs(v, a) for a in t.args)
    return v in vars_of(t)


def map_vars(e, fn):
    """Rebuild ``e`` replacing each variable ``v`` by ``fn(v)``."""
    if type(e) is Var:
        return fn(e)
    if isinstance(e, Struct):
        if not e.args or e._ground:
            return e
        return type(e)(e.functor, tuple(map_vars(a, fn) for a in e.args))
    if type(e) is Literal:
        return Literal(map_vars(e.atom, fn), e.positive)
    if isinstance(e, tuple):
        return tuple(map_vars(x, fn) for x in e)
    if isinstance(e, list):
        return [map_vars(x, fn) for x in e]
    if hasattr(e, "map_vars"):
        return e.map_vars(fn)
    raise TypeError(f"not an expression: {e!r}")


# -- substitutions ---------------------------------------------------------


class Substitution(Mapping):
    """Finite map from variables to terms, in solved form.

    Construction does not re-check solvedness (``is_solved`` does); every
    operation in this module produces solved forms from solved inputs.
    """

    __slots__ = ("_map", "_hash")

    def __init__(self, bindings: Optional[Mapping] = None):
        m = {}
        if bindings:
            for v, t in bindings.items():
                if type(v) is not Var:
                    raise TypeError(f"substitution key must be a variable: {v!r}")
                if t != v:
                    m[v] = t
        self._map = m
        self._hash = None

    def __getitem__(self, v):
        return self._map[v]

    def __iter__(self):
        return iter(self._map)

    def __len__(self):
        return len(self._map)

    def __eq__(self, other):
        if isinstance(other, Substitution):
            return self._map == other._map
        if isinstance(other, Mapping):
            return self._map == dict(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._map.items()))
        return self._hash

    @property
    def domain(self) -> frozenset:
        return frozenset(self._map)

    def range_vars(self) -> frozenset:
        return frozenset(itertools.chain.from_iterable(vars_of(t) for t in self._map.values()))

    def is_solved(self) -> bool:
        return not (self.domain & self.range_vars())

    def sorted_items(self):
        return sorted(self._map.items(), key=lambda kv: var_key(kv[0]))

    def __call__(self, e):
        return apply(self, e)

    def __repr__(self):
        return "Substitution({" + ", ".join(f"{v}: {t}" for v, t in self.sorted_items()) + "})"

    def __str__(self):
        return format_subst(self)


EMPTY = Substitution()


def apply(theta: Mapping, e):
    """The instance of ``e`` under ``theta`` (simultaneous replacement)."""
    if not theta:
        return e
    if isinstance(e, Substitution):
        return Substitution({v: apply(theta, t) for v, t in e.items()})
    return map_vars(e, lambda v: theta.get(v, v))


def compose(theta: Substitution, sigma: Substitution) -> Substitution:
    """``theta`` then ``sigma``: ``apply(compose(t, s), e) == apply(s, apply(t, e))``.

    The result is in solved form whenever ``vars(sigma)`` avoids
    ``dom(theta)``, which is how every caller in this package uses it.
    """
    if not theta:
        return sigma
    if not sigma:
        return theta
    out = {}
    for v, t in theta.items():
        s = apply(sigma, t)
        if s != v:
            out[v] = s
    for v, t in sigma.items():
        if v not in theta:
            out[v] = t
    return Substitution(out)


def restrict(theta: Substitution, variables: Iterable[Var]) -> Substitution:
    vs = set(variables)
    return Substitution({v: t for v, t in theta.items() if v in vs})


# -- unification -----------------------------------------------------------


def _deref(t, bindings):
    while type(t) is Var and t in bindings:
        t = bindings[t]
    return t


def _occurs_bound(v, t, bindings) -> bool:
    stack = [t]
    while stack:
        x = _deref(stack.pop(), bindings)
        if type(x) is Var:
            if x == v:
                return True
        elif not x._ground:
            stack.extend(x.args)
    return False


def _resolve(t, bindings):
    t = _deref(t, bindings)
    if type(t) is Var or not t.args or t._ground:
        return t
    return type(t)(t.functor, tuple(_resolve(a, bindings) for a in t.args))


def mgu(equations) -> Optional[Substitution]:
    """Most general unifier of a set of equations, or ``None``.

    ``equations`` is an iterable of ``(lhs, rhs)`` pairs of terms or atoms.
    Pairs are processed left to right; when two distinct variables meet,
    the greater one under ``var_key`` is bound to the other.
    """
    bindings: dict = {}
    work = list(equations)
    work.reverse()
    while work:
        l, r = work.pop()
        l = _deref(l, bindings)
        r = _deref(r, bindings)
        if l is r or l == r:
            continue
        if type(l) is Var and type(r) is Var:
            if var_key(l) < var_key(r):
                l, r = r, l
            bindings[l] = r
        elif type(l) is Var:
            if _occurs_bound(l, r, bindings):
                return None
            bindings[l] = r
        elif type(r) is Var:
            if _occurs_bound(r, l, bindings):
                return None
            bindings[r] = l
        else:
            if type(l) is not type(r) or l.functor != r.functor or len(l.args) != len(r.args):
                return None
            work.extend(reversed(list(zip(l.args, r.args))))
    return Substitution({v: _resolve(t, bindings) for v, t in bindings.items()})


def unifiable(a, b) -> bool:
    return mgu([(a, b)]) is not None


# -- renaming --------------------------------------------------------------


class FreshNames:
    """Monotone generator of reserved variable names ``_G0, _G1, ...``.

    Each instance is independent; pass one explicitly to keep concurrent
    users isolated.
    """

    def __init__(self, start: int = 0):
        self._counter = itertools.count(start)

    def fresh(self, avoid=frozenset()) -> Var:
        while True:
            v = Var(f"{FRESH_PREFIX}{next(self._counter)}")
            if v not in avoid:
                return v


def rename_apart(e, avoid: Iterable[Var] = (), fresh: Optional[FreshNames] = None):
    """Rename all variables of ``e`` to fresh ones not in ``avoid``.

    Returns ``(renamed, renaming)``.
    """
    fresh = fresh or FreshNames()
    avoid = frozenset(avoid)
    ordered = list(dict.fromkeys(_iter_vars(e)))
    taken = avoid | frozenset(ordered)
    renaming = {}
    for v in ordered:
        w = fresh.fresh(taken)
        taken |= {w}
        renaming[v] = w
    rho = Substitution(renaming)
    return apply(rho, e), rho


def unify_open(A: Atom, theta: Substitution, B: Atom, omega: Substitution,
               fresh: Optional[FreshNames] = None) -> Optional[Substitution]:
    """``omega o mgu(A theta rho, B omega)`` with ``A theta`` renamed apart.

    Only the part of the result restricted to ``vars(B)`` is independent of
    the renaming chosen.
    """
    a = apply(theta, A)
    b = apply(omega, B)
    avoid = vars_of(a) | vars_of(b) | omega.domain | omega.range_vars()
    a_renamed, _ = rename_apart(a, avoid, fresh)
    eta = mgu([(a_renamed, b)])
    if eta is None:
        return None
    return compose(omega, eta)


# -- variants --------------------------------------------------------------


def canonicalize(e):
    """Rename variables to ``v0, v1, ...`` in first-occurrence order."""
    names = {}
    for v in _iter_vars(e):
        if v not in names:
            names[v] = Var(f"v{len(names)}")
    return map_vars(e, names.__getitem__) if names else e


def canonical_restriction(theta: Substitution, variables: Iterable[Var]) -> Substitution:
    """Canonical representative of ``theta`` restricted to ``variables``.

    Every variable of ``variables`` is mapped (unbound ones to a canonical
    variable), so two substitutions give equal results iff they instantiate
    ``variables`` identically up to renaming.
    """
    order = sorted(set(variables), key=var_key)
    image = canonicalize(tuple(theta.get(v, v) for v in order))
    return Substitution(dict(zip(order, image)))


def variant_eq(e1, e2, over: Optional[Iterable[Var]] = None) -> bool:
    """True iff ``e1`` and ``e2`` are equal modulo renaming.

    Substitutions are compared on ``over`` (default: the union of their
    domains).
    """
    if isinstance(e1, Substitution) or isinstance(e2, Substitution):
        vs = frozenset(over) if over is not None else (e1.domain | e2.domain)
        return canonical_restriction(e1, vs) == canonical_restriction(e2, vs)
    return canonicalize(e1) == canonicalize(e2)


def is_instance_of(specific: Substitution, general: Substitution, over: Iterable[Var]) -> bool:
    """Whether ``specific`` = ``general`` composed with some substitution, on ``over``."""
    lhs = tuple(specific.get(v, v) for v in over)
    rhs = tuple(general.get(v, v) for v in over)
    lam = _match(rhs, lhs)
    return lam is not None


def _match(pattern, target) -> Optional[dict]:
    """One-way matching: a ``lam`` with ``apply(lam, pattern) == target``."""
    lam: dict = {}
    stack = [(pattern, target)]
    while stack:
        p, t = stack.pop()
        if type(p) is Var:
            if p in lam:
                if lam[p] != t:
                    return None
            else:
                lam[p] = t
        elif isinstance(p, tuple):
            if not isinstance(t, tuple) or len(p) != len(t):
                return None
            stack.extend(zip(p, t))
        else:
            if type(t) is not type(p) or t.functor != p.functor or len(t.args) != len(p.args):
                return None
            stack.extend(zip(p.args, t.args))
    return lam


# -- printing --------------------------------------------------------------

_PLAIN_NAME = re.compile(r"(?:[a-z][A-Za-z0-9_]*|\d+|\[\])\Z")


def format_name(name: str) -> str:
    if _PLAIN_NAME.match(name):
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


def format_var(v: Var) -> str:
    if v.name.startswith("_@"):
        return "_"
    return v.name


def format_term(t) -> str:
    if type(t) is Var:
        return format_var(t)
    if type(t) is Literal:
        return str(t)
    if t.functor == "." and len(t.args) == 2 and type(t) is Struct:
        items = []
        while isinstance(t, Struct) and type(t) is Struct and t.functor == "." and len(t.args) == 2:
            items.append(format_term(t.args[0]))
            t = t.args[1]
        if t == NIL:
            return "[" + ",".join(items) + "]"
        return "[" + ",".join(items) + "|" + format_term(t) + "]"
    if not t.args:
        return format_name(t.functor)
    return format_name(t.functor) + "(" + ",".join(format_term(a) for a in t.args) + ")"


def format_subst(theta: Substitution) -> str:
    return "{" + ", ".join(f"{format_var(v)}/{format_term(t)}" for v, t in theta.sorted_items()) + "}"
