"""Single-step reduction: every basic rule, position-addressed.

Three rule families: intuitionistic contractions (beta, projection, and
the if/delta extension), permutations pushing a parallel composition out
of another constructor, and cross rules on a parallel composition itself
(the two drops and the full communication step).

Steps assume hygienic binder naming and rename a bound channel silently
only where the rule would otherwise capture it; the freshness side
conditions printed on the permutation rules are enforced as stated and
reported as distinct errors.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from .formulas import Formula, Impl, conj
from .terms import (
    App,
    BoolLit,
    Efq,
    HOLE,
    Ite,
    Lam,
    Pair,
    Par,
    Path,
    Proj,
    SimpleContext,
    Term,
    Var,
    alpha_equal,
    binders_at,
    fill_context,
    free_vars,
    fresh_name,
    multi_subst,
    occurrences_of,
    occurs_free,
    rebuild,
    rename_binder,
    replace_at,
    subst,
    subterm_at,
    subterms,
    tuple_of,
)
from .typecheck import communication_complexity


class RuleTag(str, Enum):
    Beta = "Beta"
    ProjPair = "ProjPair"
    PermAppL = "PermAppL"
    PermAppR = "PermAppR"
    PermEfq = "PermEfq"
    PermProj = "PermProj"
    PermLam = "PermLam"
    PermPairL = "PermPairL"
    PermPairR = "PermPairR"
    PermParParL = "PermParPar_L"
    PermParParR = "PermParPar_R"
    CrossDropL = "CrossDropL"
    CrossDropR = "CrossDropR"
    CrossFull = "CrossFull"
    DeltaIte = "DeltaIte"


PERMUTATIONS = frozenset({
    RuleTag.PermAppL, RuleTag.PermAppR, RuleTag.PermEfq, RuleTag.PermProj,
    RuleTag.PermLam, RuleTag.PermPairL, RuleTag.PermPairR,
    RuleTag.PermParParL, RuleTag.PermParParR,
})
INTUITIONISTIC = frozenset({RuleTag.Beta, RuleTag.ProjPair, RuleTag.DeltaIte})


@dataclass(frozen=True)
class DeltaRule:
    """Ground rewrite for a declared constant, e.g. ``g 5 => 9``."""

    const: str
    args: tuple[Term, ...]
    rhs: Term


DeltaRules = tuple[DeltaRule, ...]


@dataclass(frozen=True)
class ReductionStep:
    rule: RuleTag
    path: Path
    before: Term
    after: Term
    group: int = 0


class RewriteError(Exception):
    def __init__(self, message: str, path: Path = ()):
        self.path = path
        self.message = message
        super().__init__(f"{message} (at path {list(path)})")


class BlockedByFreshness(RewriteError):
    pass


class BlockedByComplexityZero(RewriteError):
    pass


# ---------------------------------------------------------------------------
# Intuitionistic contractions

def _delta_contract(t: Term, rules: DeltaRules) -> Optional[Term]:
    if isinstance(t, Ite) and isinstance(t.cond, BoolLit):
        return t.then_branch if t.cond.value else t.else_branch
    head = t
    args: list[Term] = []
    while isinstance(head, App):
        args.append(head.arg)
        head = head.fn
    if isinstance(head, Var) and args:
        args.reverse()
        for rule in rules:
            if rule.const == head.name and len(rule.args) == len(args) \
                    and all(a == b for a, b in zip(rule.args, args)):
                return rule.rhs
    return None


def contract_intuitionistic(t: Term, rules: DeltaRules = ()) -> tuple[RuleTag, Term]:
    """Contract an intuitionistic redex at the root of ``t``."""
    if isinstance(t, App) and isinstance(t.fn, Lam):
        return RuleTag.Beta, subst(t.fn.body, t.arg, t.fn.var)
    if isinstance(t, Proj) and isinstance(t.target, Pair):
        return RuleTag.ProjPair, t.target.fst if t.index == 0 else t.target.snd
    contracted = _delta_contract(t, rules)
    if contracted is not None:
        return RuleTag.DeltaIte, contracted
    raise RewriteError("no intuitionistic redex at this position")


def intuitionistic_redex_rule(t: Term, rules: DeltaRules = ()) -> Optional[RuleTag]:
    if isinstance(t, App) and isinstance(t.fn, Lam):
        return RuleTag.Beta
    if isinstance(t, Proj) and isinstance(t.target, Pair):
        return RuleTag.ProjPair
    if _delta_contract(t, rules) is not None:
        return RuleTag.DeltaIte
    return None


def step_intuitionistic(t: Term, at: Path, rules: DeltaRules = ()) -> Term:
    _, reduct = contract_intuitionistic(subterm_at(t, at), rules)
    return replace_at(t, at, reduct)


# ---------------------------------------------------------------------------
# Permutations

def _hygienic_inner(node: Par, taboo: Iterable[str]) -> Par:
    """Rename the channel of ``node`` when it collides with ``taboo``."""
    if node.channel in set(taboo):
        renamed = rename_binder(node, fresh_name(node.channel))
        assert isinstance(renamed, Par)
        return renamed
    return node


def contract_permutation(t: Term, rule: RuleTag) -> Term:
    if rule == RuleTag.PermAppL and isinstance(t, App) and isinstance(t.fn, Par):
        p, w = t.fn, t.arg
        if occurs_free(w, p.channel):
            raise BlockedByFreshness(f"channel {p.channel} occurs in the argument")
        return Par(p.channel, p.kind_left, p.kind_right, App(p.left, w), App(p.right, w))
    if rule == RuleTag.PermAppR and isinstance(t, App) and isinstance(t.arg, Par):
        w, p = t.fn, t.arg
        if occurs_free(w, p.channel):
            raise BlockedByFreshness(f"channel {p.channel} occurs in the function")
        return Par(p.channel, p.kind_left, p.kind_right, App(w, p.left), App(w, p.right))
    if rule == RuleTag.PermEfq and isinstance(t, Efq) and isinstance(t.target, Par):
        p = t.target
        return Par(p.channel, p.kind_left, p.kind_right,
                   Efq(t.atom_type, p.left), Efq(t.atom_type, p.right))
    if rule == RuleTag.PermProj and isinstance(t, Proj) and isinstance(t.target, Par):
        p = t.target
        return Par(p.channel, p.kind_left, p.kind_right,
                   Proj(p.left, t.index), Proj(p.right, t.index))
    if rule == RuleTag.PermLam and isinstance(t, Lam) and isinstance(t.body, Par):
        p = _hygienic_inner(t.body, [t.var])
        return Par(p.channel, p.kind_left, p.kind_right,
                   Lam(t.var, t.var_type, p.left), Lam(t.var, t.var_type, p.right))
    if rule == RuleTag.PermPairL and isinstance(t, Pair) and isinstance(t.fst, Par):
        p, w = t.fst, t.snd
        if occurs_free(w, p.channel):
            raise BlockedByFreshness(f"channel {p.channel} occurs in the other component")
        return Par(p.channel, p.kind_left, p.kind_right, Pair(p.left, w), Pair(p.right, w))
    if rule == RuleTag.PermPairR and isinstance(t, Pair) and isinstance(t.snd, Par):
        p, w = t.snd, t.fst
        if occurs_free(w, p.channel):
            raise BlockedByFreshness(f"channel {p.channel} occurs in the other component")
        return Par(p.channel, p.kind_left, p.kind_right, Pair(w, p.left), Pair(w, p.right))
    if rule == RuleTag.PermParParL and isinstance(t, Par) and isinstance(t.left, Par):
        if communication_complexity(t) == 0:
            raise BlockedByComplexityZero(
                f"outer channel {t.channel} has communication complexity 0")
        inner, w = _hygienic_inner(t.left, [t.channel, *free_vars(t.right)]), t.right
        return Par(inner.channel, inner.kind_left, inner.kind_right,
                   Par(t.channel, t.kind_left, t.kind_right, inner.left, w),
                   Par(t.channel, t.kind_left, t.kind_right, inner.right, w))
    if rule == RuleTag.PermParParR and isinstance(t, Par) and isinstance(t.right, Par):
        if communication_complexity(t) == 0:
            raise BlockedByComplexityZero(
                f"outer channel {t.channel} has communication complexity 0")
        inner, w = _hygienic_inner(t.right, [t.channel, *free_vars(t.left)]), t.left
        return Par(inner.channel, inner.kind_left, inner.kind_right,
                   Par(t.channel, t.kind_left, t.kind_right, w, inner.left),
                   Par(t.channel, t.kind_left, t.kind_right, w, inner.right))
    raise RewriteError(f"subterm does not match permutation {rule.value}")


def step_permutation(t: Term, at: Path, rule: RuleTag) -> Term:
    if rule not in PERMUTATIONS:
        raise RewriteError(f"{rule.value} is not a permutation rule", at)
    try:
        reduct = contract_permutation(subterm_at(t, at), rule)
    except RewriteError as e:
        raise type(e)(e.message, at) from None
    return replace_at(t, at, reduct)


# ---------------------------------------------------------------------------
# Cross reductions

def step_cross_drop(t: Term, at: Path, keep: Optional[str] = None) -> Term:
    """Drop one side of a parallel composition whose channel it ignores.

    ``keep`` forces a side ("left"/"right"); by default the left branch
    wins when both are channel-free.
    """
    node = subterm_at(t, at)
    if not isinstance(node, Par):
        raise RewriteError("cross drop needs a parallel composition", at)
    can_left = not occurs_free(node.left, node.channel)
    can_right = not occurs_free(node.right, node.channel)
    if keep == "left" or (keep is None and can_left):
        if not can_left:
            raise RewriteError(f"channel {node.channel} occurs in the left branch", at)
        return replace_at(t, at, node.left)
    if keep == "right" or (keep is None and can_right):
        if not can_right:
            raise RewriteError(f"channel {node.channel} occurs in the right branch", at)
        return replace_at(t, at, node.right)
    raise RewriteError(f"channel {node.channel} occurs in both branches", at)


def is_par_free(t: Term) -> bool:
    return not any(isinstance(s, Par) for _, s in subterms(t))


def is_intuitionistic_normal(t: Term, rules: DeltaRules = ()) -> bool:
    return all(intuitionistic_redex_rule(s, rules) is None for _, s in subterms(t))


def _rightmost_applied(branch: Term, channel: str) -> Optional[Path]:
    """Path of the application node ``channel arg`` at the rightmost occurrence."""
    occs = occurrences_of(branch, channel)
    if not occs:
        return None
    path = occs[-1].path
    if not path or path[-1] != 0:
        return None
    parent = subterm_at(branch, path[:-1])
    if not isinstance(parent, App):
        return None
    return path[:-1]


def cross_decompose(branch: Term, channel: str) -> tuple[SimpleContext, Term, Formula]:
    """Split a branch at the rightmost applied channel occurrence.

    Returns the surrounding simple context, the first applied argument,
    and the result type of the excised application; trailing stack items
    stay in the context.
    """
    app_path = _rightmost_applied(branch, channel)
    if app_path is None:
        raise RewriteError(
            f"rightmost occurrence of {channel} is absent or not applied")
    app = subterm_at(branch, app_path)
    assert isinstance(app, App) and isinstance(app.fn, Var)
    hole_type = app.fn.type
    assert isinstance(hole_type, Impl)
    ctx = SimpleContext(replace_at(branch, app_path, HOLE), hole_type.consequent)
    return ctx, app.arg, hole_type.consequent


def _bound_in_context(ctx: SimpleContext, piece: Term) -> list[tuple[str, Formula]]:
    """Free variables of ``piece`` that the context binds at its hole."""
    binding = {}
    for name, f in binders_at(ctx.body, ctx.hole_path):
        binding[name] = f
    out = []
    for name, f in free_vars(piece).items():
        if name in binding:
            out.append((name, f))
    return out


def _prepare_fill(ctx: SimpleContext, filling: Term, intended: set[str]) -> SimpleContext:
    """Rename context binders that would capture unrelated variables.

    Binders matching ``intended`` names are the point of the operation and
    are left alone; a name that is both intended and accidentally free in
    the filling is ambiguous and rejected.
    """
    incoming = set(free_vars(filling))
    body = ctx.body
    prefix: Path = ()
    for step in ctx.hole_path:
        node = subterm_at(body, prefix)
        name = node.var if isinstance(node, Lam) else None
        if name is not None and name in incoming and name not in intended:
            body = replace_at(body, prefix, rename_binder(node, fresh_name(name)))
        prefix = prefix + (step,)
    return SimpleContext(body, ctx.hole_type)


def step_cross_full(t: Term, at: Path) -> Term:
    """The communication step: exchange the applied code fragments.

    Both branches must be parallel-free normal forms with the channel
    applied at its rightmost occurrence on each side, and the channel's
    communication complexity must be positive.  The exchanged fragments
    are rewired to their old binders through a fresh channel carrying the
    tuples of captured variables.
    """
    node = subterm_at(t, at)
    if not isinstance(node, Par):
        raise RewriteError("cross reduction needs a parallel composition", at)
    a, ka, kb = node.channel, node.kind_left, node.kind_right
    left, right = node.left, node.right
    if not (is_par_free(left) and is_par_free(right)):
        raise RewriteError("cross reduction branches must be parallel-free", at)
    if not (is_intuitionistic_normal(left) and is_intuitionistic_normal(right)):
        raise RewriteError("cross reduction branches must be normal", at)
    if not (occurs_free(left, a) and occurs_free(right, a)):
        raise RewriteError(
            f"channel {a} must occur in both branches (use a drop otherwise)", at)
    if communication_complexity(node) == 0:
        raise BlockedByComplexityZero(
            f"channel {a} has communication complexity 0", at)

    ctx_c, u, _ = cross_decompose(left, a)
    ctx_d, v, _ = cross_decompose(right, a)
    assert not occurs_free(u, a) and not occurs_free(v, a), \
        "rightmost occurrence cannot contain the channel"

    ys = _bound_in_context(ctx_c, u)
    zs = _bound_in_context(ctx_d, v)
    y_names, z_names = {n for n, _ in ys}, {n for n, _ in zs}
    survivors_u = set(free_vars(u)) - y_names
    survivors_v = set(free_vars(v)) - z_names
    if z_names & survivors_u or y_names & survivors_v:
        raise RewriteError(
            "binder names too entangled for the exchange; rename and retry", at)

    kind_c = conj(tuple(f for _, f in zs))
    kind_d = conj(tuple(f for _, f in ys))
    b = fresh_name("b")
    u_up = multi_subst(u, App(Var(b, Impl(kind_c, kind_d)), tuple_of(zs)), ys)
    v_up = multi_subst(v, App(Var(b, Impl(kind_d, kind_c)), tuple_of(ys)), zs)

    d_filled = fill_context(_prepare_fill(ctx_d, u_up, z_names), u_up)
    c_filled = fill_context(_prepare_fill(ctx_c, v_up, y_names), v_up)
    reduct = Par(
        b, kind_c, kind_d,
        Par(a, kb, ka, d_filled, left),
        Par(a, ka, kb, c_filled, right),
    )
    if not set(free_vars(reduct)) <= set(free_vars(node)):
        raise AssertionError("cross reduction created a free variable")
    return replace_at(t, at, reduct)


def _crossable(node: Par, rules: DeltaRules) -> bool:
    if not (is_par_free(node.left) and is_par_free(node.right)):
        return False
    if not (is_intuitionistic_normal(node.left, rules)
            and is_intuitionistic_normal(node.right, rules)):
        return False
    if not (occurs_free(node.left, node.channel)
            and occurs_free(node.right, node.channel)):
        return False
    if _rightmost_applied(node.left, node.channel) is None:
        return False
    if _rightmost_applied(node.right, node.channel) is None:
        return False
    return communication_complexity(node) > 0


# ---------------------------------------------------------------------------
# Redex enumeration

def redexes_at(s: Term, rules: DeltaRules = ()) -> list[RuleTag]:
    """Rules whose preconditions (side conditions included) hold at the root."""
    out: list[RuleTag] = []
    tag = intuitionistic_redex_rule(s, rules)
    if tag is not None:
        out.append(tag)
    if isinstance(s, App):
        if isinstance(s.fn, Par) and not occurs_free(s.arg, s.fn.channel):
            out.append(RuleTag.PermAppL)
        if isinstance(s.arg, Par) and not occurs_free(s.fn, s.arg.channel):
            out.append(RuleTag.PermAppR)
    elif isinstance(s, Efq):
        if isinstance(s.target, Par):
            out.append(RuleTag.PermEfq)
    elif isinstance(s, Proj):
        if isinstance(s.target, Par):
            out.append(RuleTag.PermProj)
    elif isinstance(s, Lam):
        if isinstance(s.body, Par):
            out.append(RuleTag.PermLam)
    elif isinstance(s, Pair):
        if isinstance(s.fst, Par) and not occurs_free(s.snd, s.fst.channel):
            out.append(RuleTag.PermPairL)
        if isinstance(s.snd, Par) and not occurs_free(s.fst, s.snd.channel):
            out.append(RuleTag.PermPairR)
    elif isinstance(s, Par):
        if (isinstance(s.left, Par) or isinstance(s.right, Par)) \
                and communication_complexity(s) > 0:
            if isinstance(s.left, Par):
                out.append(RuleTag.PermParParL)
            if isinstance(s.right, Par):
                out.append(RuleTag.PermParParR)
        if not occurs_free(s.left, s.channel):
            out.append(RuleTag.CrossDropL)
        if not occurs_free(s.right, s.channel):
            out.append(RuleTag.CrossDropR)
        if _crossable(s, rules):
            out.append(RuleTag.CrossFull)
    return out


def find_redexes(t: Term, rules: DeltaRules = ()) -> list[tuple[Path, RuleTag]]:
    out = []
    for path, s in subterms(t):
        for tag in redexes_at(s, rules):
            out.append((path, tag))
    return out


def is_normal(t: Term, rules: DeltaRules = ()) -> bool:
    return not any(redexes_at(s, rules) for _, s in subterms(t))


def apply_rule(t: Term, at: Path, rule: RuleTag, rules: DeltaRules = ()) -> Term:
    """Apply one named rule at a position; the replayer's entry point."""
    if rule in INTUITIONISTIC:
        return step_intuitionistic(t, at, rules)
    if rule in PERMUTATIONS:
        return step_permutation(t, at, rule)
    if rule == RuleTag.CrossDropL:
        return step_cross_drop(t, at, keep="left")
    if rule == RuleTag.CrossDropR:
        return step_cross_drop(t, at, keep="right")
    if rule == RuleTag.CrossFull:
        return step_cross_full(t, at)
    raise RewriteError(f"unknown rule {rule}", at)


def replay(t: Term, steps: Iterable[ReductionStep], rules: DeltaRules = ()) -> Term:
    """Re-apply a trace, checking each step is a genuine rule instance.

    Fresh channels picked during replay may differ from the recorded
    ones, so results are compared up to alpha; the recorded term is kept
    as the continuation point.
    """
    current = t
    for i, step in enumerate(steps):
        if not alpha_equal(current, step.before):
            raise RewriteError(f"trace step {i} does not continue the previous term")
        redone = apply_rule(step.before, step.path, step.rule, rules)
        if not alpha_equal(redone, step.after):
            raise RewriteError(f"trace step {i} is not a {step.rule.value} instance")
        current = step.after
    return current
