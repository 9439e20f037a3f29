"""Typing judgment and per-channel metadata.

The judgment extends the simply typed one with a rule for parallel
composition: ``u ||_a v : C`` holds when ``u : C`` under ``a : A -> B``
and ``v : C`` under ``a : B -> A``.  Ex-falso maps bot to any atom
other than bot.  Booleans and if-then-else are a small extension used
by example programs, not part of the pure calculus.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from .formulas import (
    BOOL,
    BOT,
    And,
    Atom,
    Bot,
    Formula,
    Impl,
    formula_size,
    is_proper_subformula,
    prime_factors,
    strong_subformulas,
)
from .terms import (
    App,
    BoolLit,
    Efq,
    Hole,
    Ite,
    Lam,
    Pair,
    Par,
    Path,
    Proj,
    Term,
    Var,
    free_vars,
)


@dataclass
class TypeEnv:
    bindings: dict[str, Formula] = field(default_factory=dict)

    def lookup(self, name: str) -> Optional[Formula]:
        return self.bindings.get(name)

    def extend(self, name: str, f: Formula) -> "TypeEnv":
        new = dict(self.bindings)
        new[name] = f
        return TypeEnv(new)


class TypecheckError(Exception):
    def __init__(self, message: str, path: Path,
                 expected: Optional[Formula] = None, actual: Optional[Formula] = None):
        self.message = message
        self.path = path
        self.expected = expected
        self.actual = actual
        super().__init__(f"{message} (at path {list(path)})")


@dataclass(frozen=True)
class ChannelInfo:
    channel: str
    kind: tuple[Formula, Formula]
    complexity: int


def infer(env: TypeEnv, t: Term, path: Path = ()) -> Formula:
    """The unique type of ``t`` under ``env``, or a TypecheckError."""
    if isinstance(t, Var):
        bound = env.lookup(t.name)
        if bound is None:
            raise TypecheckError(f"unbound variable {t.name}", path)
        if bound != t.type:
            raise TypecheckError(
                f"variable {t.name} annotated inconsistently with its binding",
                path, expected=bound, actual=t.type)
        return bound
    if isinstance(t, Lam):
        body = infer(env.extend(t.var, t.var_type), t.body, path + (0,))
        return Impl(t.var_type, body)
    if isinstance(t, App):
        fn = infer(env, t.fn, path + (0,))
        arg = infer(env, t.arg, path + (1,))
        if not isinstance(fn, Impl):
            raise TypecheckError("application of a non-implication", path, actual=fn)
        if fn.antecedent != arg:
            raise TypecheckError("argument type mismatch", path + (1,),
                                 expected=fn.antecedent, actual=arg)
        return fn.consequent
    if isinstance(t, Pair):
        return And(infer(env, t.fst, path + (0,)), infer(env, t.snd, path + (1,)))
    if isinstance(t, Proj):
        target = infer(env, t.target, path + (0,))
        if not isinstance(target, And):
            raise TypecheckError("projection of a non-conjunction", path, actual=target)
        return target.left if t.index == 0 else target.right
    if isinstance(t, Efq):
        if not isinstance(t.atom_type, Atom):
            raise TypecheckError("ex falso target type must be an atom other than bot",
                                 path, actual=t.atom_type)
        inner = infer(env, t.target, path + (0,))
        if not isinstance(inner, Bot):
            raise TypecheckError("ex falso applied to a non-bot term", path + (0,),
                                 expected=BOT, actual=inner)
        return t.atom_type
    if isinstance(t, Par):
        left = infer(env.extend(t.channel, Impl(t.kind_left, t.kind_right)),
                     t.left, path + (0,))
        right = infer(env.extend(t.channel, Impl(t.kind_right, t.kind_left)),
                      t.right, path + (1,))
        if left != right:
            raise TypecheckError(
                f"parallel branches disagree on channel {t.channel}",
                path, expected=left, actual=right)
        return left
    if isinstance(t, BoolLit):
        return BOOL
    if isinstance(t, Ite):
        cond = infer(env, t.cond, path + (0,))
        if cond != BOOL:
            raise TypecheckError("condition must be Bool", path + (0,),
                                 expected=BOOL, actual=cond)
        then = infer(env, t.then_branch, path + (1,))
        els = infer(env, t.else_branch, path + (2,))
        if then != els:
            raise TypecheckError("if branches disagree", path, expected=then, actual=els)
        return then
    if isinstance(t, Hole):
        raise TypecheckError("context hole is not a term", path)
    raise TypecheckError(f"unknown term {t!r}", path)


def type_of(t: Term) -> Formula:
    """Type of a term whose free variables supply the environment."""
    return infer(TypeEnv(dict(free_vars(t))), t)


def communication_kind(t: Term) -> tuple[Formula, Formula]:
    if not isinstance(t, Par):
        raise TypeError("communication kind is defined on parallel compositions only")
    return (t.kind_left, t.kind_right)


def communication_complexity(t: Term, env: Optional[TypeEnv] = None) -> int:
    """Size of the worst prime factor of the kind that breaks analyticity.

    A factor counts when it is neither a proper subformula of the term's
    type nor a strong subformula of the type of one of its free
    variables; the result is 0 when every factor is accounted for.
    """
    if not isinstance(t, Par):
        raise TypeError("communication complexity is defined on parallel compositions only")
    if env is None:
        return _complexity_self_typed(t)
    return _complexity(t, infer(env, t))


@lru_cache(maxsize=16384)
def _complexity_self_typed(t: Par) -> int:
    return _complexity(t, type_of(t))


def _complexity(t: Par, a: Formula) -> int:
    strong: set[Formula] = set()
    for f in free_vars(t).values():
        strong |= strong_subformulas(f)
    worst = 0
    for p in prime_factors(t.kind_left) + prime_factors(t.kind_right):
        if is_proper_subformula(p, a) or p in strong:
            continue
        worst = max(worst, formula_size(p))
    return worst


def channel_info(t: Term, env: Optional[TypeEnv] = None) -> ChannelInfo:
    return ChannelInfo(t.channel, communication_kind(t), communication_complexity(t, env))
