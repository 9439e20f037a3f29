"""Proof terms and the occurrence/substitution machinery.

Variables carry their type, mirroring the x^A decoration used on paper:
this is what makes free-variable typing, communication kinds and the
complexity measures computable on a bare term, without threading an
environment everywhere.  Binders (lambda, parallel composition) still
annotate, and the type checker verifies that annotations and occurrences
agree.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .formulas import BOT, Formula, Impl, conj

Path = tuple[int, ...]


@dataclass(frozen=True)
class Var:
    name: str
    type: Formula


@dataclass(frozen=True)
class Lam:
    var: str
    var_type: Formula
    body: "Term"


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Pair:
    fst: "Term"
    snd: "Term"


@dataclass(frozen=True)
class Proj:
    target: "Term"
    index: int  # 0 or 1


@dataclass(frozen=True)
class Efq:
    atom_type: Formula
    target: "Term"


@dataclass(frozen=True)
class Par:
    """Parallel composition ``left ||_channel right``.

    The channel occurs at type ``kind_left -> kind_right`` in the left
    branch and ``kind_right -> kind_left`` in the right branch; both
    occurrences are bound here.
    """

    channel: str
    kind_left: Formula
    kind_right: Formula
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Ite:
    cond: "Term"
    then_branch: "Term"
    else_branch: "Term"


@dataclass(frozen=True)
class Hole:
    """Placeholder used only inside simple contexts."""


HOLE = Hole()

Term = Union[Var, Lam, App, Pair, Proj, Efq, Par, BoolLit, Ite, Hole]


class ScopeError(Exception):
    pass


# ---------------------------------------------------------------------------
# Structural plumbing

def children(t: Term) -> tuple[Term, ...]:
    """Children in syntactic order; this order defines textual rank."""
    if isinstance(t, (Var, BoolLit, Hole)):
        return ()
    if isinstance(t, Lam):
        return (t.body,)
    if isinstance(t, App):
        return (t.fn, t.arg)
    if isinstance(t, Pair):
        return (t.fst, t.snd)
    if isinstance(t, Proj):
        return (t.target,)
    if isinstance(t, Efq):
        return (t.target,)
    if isinstance(t, Par):
        return (t.left, t.right)
    if isinstance(t, Ite):
        return (t.cond, t.then_branch, t.else_branch)
    raise TypeError(f"not a term: {t!r}")


def rebuild(t: Term, kids: tuple[Term, ...]) -> Term:
    if isinstance(t, (Var, BoolLit, Hole)):
        return t
    if isinstance(t, Lam):
        return Lam(t.var, t.var_type, kids[0])
    if isinstance(t, App):
        return App(kids[0], kids[1])
    if isinstance(t, Pair):
        return Pair(kids[0], kids[1])
    if isinstance(t, Proj):
        return Proj(kids[0], t.index)
    if isinstance(t, Efq):
        return Efq(t.atom_type, kids[0])
    if isinstance(t, Par):
        return Par(t.channel, t.kind_left, t.kind_right, kids[0], kids[1])
    if isinstance(t, Ite):
        return Ite(kids[0], kids[1], kids[2])
    raise TypeError(f"not a term: {t!r}")


def subterm_at(t: Term, path: Path) -> Term:
    for i in path:
        kids = children(t)
        if i >= len(kids):
            raise IndexError(f"path {path} leaves the term at child {i}")
        t = kids[i]
    return t


def replace_at(t: Term, path: Path, new: Term) -> Term:
    if not path:
        return new
    kids = list(children(t))
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return rebuild(t, tuple(kids))


def subterms(t: Term, prefix: Path = ()) -> Iterator[tuple[Path, Term]]:
    """All subterms with their paths, parent before children."""
    yield prefix, t
    for i, c in enumerate(children(t)):
        yield from subterms(c, prefix + (i,))


def term_size(t: Term) -> int:
    return 1 + sum(term_size(c) for c in children(t))


def binders_at(t: Term, path: Path) -> list[tuple[str, Formula]]:
    """Binders scoping over ``path``, outermost first."""
    out: list[tuple[str, Formula]] = []
    for i in path:
        if isinstance(t, Lam):
            out.append((t.var, t.var_type))
        elif isinstance(t, Par):
            k = Impl(t.kind_left, t.kind_right) if i == 0 else Impl(t.kind_right, t.kind_left)
            out.append((t.channel, k))
        t = children(t)[i]
    return out


def binder_names(t: Term) -> list[str]:
    """Multiset of binder names, in traversal order."""
    out = []
    for _, s in subterms(t):
        if isinstance(s, Lam):
            out.append(s.var)
        elif isinstance(s, Par):
            out.append(s.channel)
    return out


# ---------------------------------------------------------------------------
# Occurrences

@dataclass(frozen=True)
class Occurrence:
    path: Path
    textual_rank: int


def occurrences_of(t: Term, x: str) -> list[Occurrence]:
    """Free occurrences of ``x`` in ``t``, ascending by textual rank.

    The rightmost occurrence is the one with maximal rank.
    """
    out: list[Occurrence] = []
    counter = itertools.count()

    def walk(s: Term, path: Path, shadowed: bool):
        rank = next(counter)
        if isinstance(s, Var):
            if s.name == x and not shadowed:
                out.append(Occurrence(path, rank))
            return
        if isinstance(s, Lam):
            walk(s.body, path + (0,), shadowed or s.var == x)
            return
        if isinstance(s, Par):
            inner = shadowed or s.channel == x
            walk(s.left, path + (0,), inner)
            walk(s.right, path + (1,), inner)
            return
        for i, c in enumerate(children(s)):
            walk(c, path + (i,), shadowed)

    walk(t, (), False)
    return out


def free_vars(t: Term) -> dict[str, Formula]:
    """Free variables with their types.

    Raises ScopeError if one name occurs free at two different types.
    """
    out: dict[str, Formula] = {}

    def walk(s: Term, bound: frozenset[str]):
        if isinstance(s, Var):
            if s.name in bound:
                return
            prev = out.get(s.name)
            if prev is not None and prev != s.type:
                raise ScopeError(f"free variable {s.name} used at two types")
            out[s.name] = s.type
            return
        if isinstance(s, Lam):
            walk(s.body, bound | {s.var})
            return
        if isinstance(s, Par):
            inner = bound | {s.channel}
            walk(s.left, inner)
            walk(s.right, inner)
            return
        for c in children(s):
            walk(c, bound)

    walk(t, frozenset())
    return out


def occurs_free(t: Term, x: str) -> bool:
    return bool(occurrences_of(t, x))


# ---------------------------------------------------------------------------
# Fresh names

class _FreshNames:
    """Global monotone counter; linearizable under threads."""

    def __init__(self):
        self._lock = threading.Lock()
        self._n = 0

    def fresh(self, hint: str = "b") -> str:
        base = hint.split("#", 1)[0]
        with self._lock:
            self._n += 1
            return f"{base}#{self._n}"

    def reset(self):
        with self._lock:
            self._n = 0


_names = _FreshNames()


def fresh_name(hint: str = "b") -> str:
    return _names.fresh(hint)


def reset_fresh_names():
    """Restart the counter; used per CLI run for reproducible output."""
    _names.reset()


# ---------------------------------------------------------------------------
# Substitution

def rename_binder(t: Term, new_name: str) -> Term:
    """Rename the binder at the root of ``t`` (a Lam or Par) to ``new_name``."""
    if isinstance(t, Lam):
        body = subst(t.body, Var(new_name, t.var_type), t.var)
        return Lam(new_name, t.var_type, body)
    if isinstance(t, Par):
        lk = Impl(t.kind_left, t.kind_right)
        rk = Impl(t.kind_right, t.kind_left)
        return Par(
            new_name, t.kind_left, t.kind_right,
            subst(t.left, Var(new_name, lk), t.channel),
            subst(t.right, Var(new_name, rk), t.channel),
        )
    raise TypeError("can only rename a Lam or Par binder")


def subst(u: Term, t: Term, x: str) -> Term:
    """Capture-avoiding substitution of ``t`` for ``x`` in ``u``."""
    return _subst_many(u, {x: t})


def _subst_many(u: Term, sub: dict[str, Term]) -> Term:
    if not sub:
        return u
    if isinstance(u, Var):
        return sub.get(u.name, u)
    if isinstance(u, (BoolLit, Hole)):
        return u
    if isinstance(u, (Lam, Par)):
        name = u.var if isinstance(u, Lam) else u.channel
        live = {k: v for k, v in sub.items() if k != name}
        if not live:
            return u
        clashing = any(occurs_free(v, name) for v in live.values())
        if clashing:
            u = rename_binder(u, fresh_name(name))
        kids = tuple(_subst_many(c, live) for c in children(u))
        return rebuild(u, kids)
    return rebuild(u, tuple(_subst_many(c, sub) for c in children(u)))


def projection(v: Term, i: int, n: int) -> Term:
    """Select component ``i`` of an n-tuple value ``v`` (right-nested)."""
    if n <= 0:
        raise ValueError("projection into empty tuple")
    for _ in range(i):
        v = Proj(v, 1)
    if i < n - 1:
        v = Proj(v, 0)
    return v


def tuple_of(items: list[tuple[str, Formula]]) -> Term:
    """Right-nested tuple of typed variables; identity at bot->bot if empty."""
    if not items:
        x = fresh_name("x")
        return Lam(x, BOT, Var(x, BOT))
    vars_ = [Var(n, f) for n, f in items]
    out = vars_[-1]
    for v in reversed(vars_[:-1]):
        out = Pair(v, out)
    return out


def multi_subst(u: Term, v: Term, ys: list[tuple[str, Formula]]) -> Term:
    """Replace each variable in ``ys`` with the matching projection of ``v``.

    ``v`` must have the right-nested conjunction of the ys' types; an
    empty ``ys`` leaves ``u`` unchanged and a singleton degenerates to
    plain substitution.
    """
    n = len(ys)
    if n == 0:
        return u
    sub = {name: projection(v, i, n) for i, (name, _) in enumerate(ys)}
    return _subst_many(u, sub)


# ---------------------------------------------------------------------------
# Simple contexts

@dataclass(frozen=True)
class SimpleContext:
    """A parallel-free term with exactly one hole, filled without renaming."""

    body: Term
    hole_type: Formula

    def __post_init__(self):
        holes = 0
        for _, s in subterms(self.body):
            if isinstance(s, Hole):
                holes += 1
            if isinstance(s, Par):
                raise ValueError("simple contexts cannot contain parallel compositions")
        if holes != 1:
            raise ValueError(f"simple context must have exactly one hole, found {holes}")

    @property
    def hole_path(self) -> Path:
        for p, s in subterms(self.body):
            if isinstance(s, Hole):
                return p
        raise AssertionError("unreachable: context lost its hole")


def fill_context(c: SimpleContext, u: Term) -> Term:
    """Plug ``u`` into the hole textually; capture by c's binders is intended."""
    return replace_at(c.body, c.hole_path, u)


# ---------------------------------------------------------------------------
# Stacks

@dataclass(frozen=True)
class ArgTerm:
    term: Term


@dataclass(frozen=True)
class Projection:
    index: int


StackItem = Union[ArgTerm, Projection]
Stack = tuple[StackItem, ...]


def apply_stack(t: Term, stack: Stack) -> Term:
    for item in stack:
        t = App(t, item.term) if isinstance(item, ArgTerm) else Proj(t, item.index)
    return t


def head_and_stack(t: Term) -> tuple[Term, Stack]:
    """Split ``t`` as a head applied to a stack of arguments/projections."""
    items: list[StackItem] = []
    while True:
        if isinstance(t, App):
            items.append(ArgTerm(t.arg))
            t = t.fn
        elif isinstance(t, Proj):
            items.append(Projection(t.index))
            t = t.target
        else:
            return t, tuple(reversed(items))


# ---------------------------------------------------------------------------
# Alpha equivalence

def alpha_equal(s: Term, t: Term) -> bool:
    """Equality up to renaming of bound variables (and channels)."""

    def go(a: Term, b: Term, ma: dict[str, int], mb: dict[str, int], depth: int) -> bool:
        if type(a) is not type(b):
            return False
        if isinstance(a, Var):
            ia, ib = ma.get(a.name), mb.get(b.name)
            if ia is not None or ib is not None:
                return ia == ib
            return a.name == b.name and a.type == b.type
        if isinstance(a, Lam):
            if a.var_type != b.var_type:
                return False
            return go(a.body, b.body, {**ma, a.var: depth}, {**mb, b.var: depth}, depth + 1)
        if isinstance(a, Par):
            if (a.kind_left, a.kind_right) != (b.kind_left, b.kind_right):
                return False
            ma2, mb2 = {**ma, a.channel: depth}, {**mb, b.channel: depth}
            return go(a.left, b.left, ma2, mb2, depth + 1) and go(
                a.right, b.right, ma2, mb2, depth + 1
            )
        if isinstance(a, Proj) and a.index != b.index:
            return False
        if isinstance(a, Efq) and a.atom_type != b.atom_type:
            return False
        if isinstance(a, BoolLit):
            return a.value == b.value
        ka, kb = children(a), children(b)
        if len(ka) != len(kb):
            return False
        return all(go(x, y, ma, mb, depth) for x, y in zip(ka, kb))

    return go(s, t, {}, {}, 0)
