"""Propositional types: atoms, falsum, implication, conjunction.

Negation and truth are sugar (``~A`` is ``A -> bot``, ``top`` is
``bot -> bot``) and are expanded at construction time by the parser, so
the rest of the system only ever sees the four constructors below.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Union


@dataclass(frozen=True)
class Atom:
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("atom name must be nonempty")


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Impl:
    antecedent: "Formula"
    consequent: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


Formula = Union[Atom, Bot, Impl, And]

BOT = Bot()
TOP = Impl(BOT, BOT)
BOOL = Atom("Bool")
NAT = Atom("Nat")
STRING = Atom("String")


def neg(a: Formula) -> Formula:
    return Impl(a, BOT)


def is_prime(f: Formula) -> bool:
    """A formula is prime when it is not a conjunction."""
    return not isinstance(f, And)


def prime_factors(f: Formula) -> tuple[Formula, ...]:
    """Maximal flattening of ``f`` under conjunction.

    Every formula is a conjunction of prime formulas; a prime formula is
    its own single factor.
    """
    if isinstance(f, And):
        return prime_factors(f.left) + prime_factors(f.right)
    return (f,)


def conj(factors: tuple[Formula, ...]) -> Formula:
    """Right-nested conjunction of ``factors``; ``top`` when empty."""
    if not factors:
        return TOP
    out = factors[-1]
    for g in reversed(factors[:-1]):
        out = And(g, out)
    return out


def formula_size(f: Formula) -> int:
    """Number of symbols, fixed as the node count of the formula tree."""
    if isinstance(f, (Atom, Bot)):
        return 1
    return 1 + formula_size(_left(f)) + formula_size(_right(f))


def _left(f: Formula) -> Formula:
    return f.antecedent if isinstance(f, Impl) else f.left


def _right(f: Formula) -> Formula:
    return f.consequent if isinstance(f, Impl) else f.right


@lru_cache(maxsize=65536)
def subformulas(f: Formula) -> frozenset[Formula]:
    """All subformulas of ``f``, including ``f`` itself."""
    if isinstance(f, (Atom, Bot)):
        return frozenset((f,))
    return subformulas(_left(f)) | subformulas(_right(f)) | frozenset((f,))


def proper_subformulas(f: Formula) -> frozenset[Formula]:
    return subformulas(f) - frozenset((f,))


def is_subformula(b: Formula, a: Formula) -> bool:
    return b in subformulas(a)


def is_proper_subformula(b: Formula, a: Formula) -> bool:
    """True iff ``b`` occurs as a strict subtree of ``a``."""
    return b != a and b in subformulas(a)


def strong_subformulas(a: Formula) -> frozenset[Formula]:
    """Proper subformulas of prime proper subformulas of ``a``."""
    out: set[Formula] = set()
    for p in proper_subformulas(a):
        if is_prime(p):
            out |= proper_subformulas(p)
    return frozenset(out)


def strong_subformulas_by_factors(a: Formula) -> frozenset[Formula]:
    """Same set computed through the prime-factor characterization.

    Kept as an independent route so the two can be checked against each
    other exhaustively.
    """
    if isinstance(a, (Atom, Bot)):
        return frozenset()
    if isinstance(a, And):
        out: set[Formula] = set()
        for p in prime_factors(a):
            out |= proper_subformulas(p)
        return frozenset(out)
    out = set()
    for p in prime_factors(a.antecedent) + prime_factors(a.consequent):
        out |= proper_subformulas(p)
    return frozenset(out)
