"""The terminating normalization pipeline.

Normalization interleaves three phases: permute every parallel
composition to the top (parallel form), normalize the simply typed
branches, and apply cross reductions where a channel's communication
complexity signals a violation of the subformula property.  Scheduling
is driven by a lexicographic complexity measure on parallel subterms,
computed against the set of formulas that may appear in an analytic
proof of the term at hand.

The trace is a flat list of basic steps; sub-steps belonging to one
scheduled move share a group id.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

from .formulas import Formula, formula_size, is_subformula, prime_factors, \
    proper_subformulas, strong_subformulas
from .rewrite import (
    DeltaRules,
    INTUITIONISTIC,
    ReductionStep,
    RewriteError,
    RuleTag,
    apply_rule,
    intuitionistic_redex_rule,
    is_normal,
    is_par_free,
    redexes_at,
    step_intuitionistic,
)
from .terms import (
    App,
    Pair,
    Par,
    Path,
    Term,
    free_vars,
    fresh_name,
    occurrences_of,
    occurs_free,
    rename_binder,
    replace_at,
    subterm_at,
    subterms,
    term_size,
)
from .typecheck import type_of


@dataclass(frozen=True, order=True)
class ComplexityTuple:
    """Lexicographic measure (c, d, l, o) of a parallel subterm."""

    c: int  # worst unaccounted prime factor of the communication kind
    d: int  # parallel compositions inside the branches
    l: int  # branch normalization length (0 unless d == 0)
    o: int  # channel occurrences in the branches


@dataclass
class StrategyConfig:
    max_steps: int = 1_000_000
    trace_sink: Optional[Callable[[ReductionStep], None]] = None
    parallel_branches: bool = False

    def __post_init__(self):
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")


class StrategyError(Exception):
    pass


class StepBudgetExceeded(Exception):
    def __init__(self, budget: int, trace: list[ReductionStep]):
        self.budget = budget
        self.trace = trace
        super().__init__(f"normalization exceeded the {budget}-step budget")


# ---------------------------------------------------------------------------
# Shape predicates

def is_parallel_form(t: Term) -> bool:
    """True iff no parallel composition sits under another constructor."""
    if isinstance(t, Par):
        return is_parallel_form(t.left) and is_parallel_form(t.right)
    return is_par_free(t)


# ---------------------------------------------------------------------------
# Intuitionistic normalization (leftmost-outermost)

def _leftmost_outermost(t: Term, rules: DeltaRules) -> Optional[Path]:
    for path, s in subterms(t):
        if intuitionistic_redex_rule(s, rules) is not None:
            return path
    return None


def intuitionistic_normalize(t: Term, rules: DeltaRules = (),
                             max_steps: int = 1_000_000) -> tuple[Term, int]:
    """Contract beta/projection/delta redexes leftmost-outermost to a
    normal form, returning the normal form and the number of steps.

    The step count is the branch-length component of the complexity
    measure, so the contraction order here is fixed.
    """
    if not is_par_free(t):
        raise StrategyError("intuitionistic normalization needs a parallel-free term")
    n = 0
    while True:
        path = _leftmost_outermost(t, rules)
        if path is None:
            return t, n
        t = step_intuitionistic(t, path, rules)
        n += 1
        if n > max_steps:
            raise StepBudgetExceeded(max_steps, [])


@lru_cache(maxsize=16384)
def _normalization_length(t: Term, rules: DeltaRules) -> int:
    return intuitionistic_normalize(t, rules)[1]


# ---------------------------------------------------------------------------
# Complexity

def acal_for(t: Term) -> frozenset[Formula]:
    """Formulas usable without breaking analyticity: proper subformulas
    of the term's type plus strong subformulas of its free variables'
    types."""
    out: set[Formula] = set(proper_subformulas(type_of(t)))
    for f in free_vars(t).values():
        out |= strong_subformulas(f)
    return frozenset(out)


def a_complexity(sub: Term, acal: frozenset[Formula],
                 rules: DeltaRules = ()) -> ComplexityTuple:
    if not isinstance(sub, Par):
        raise StrategyError("complexity is measured on parallel compositions")
    c = 0
    for p in prime_factors(sub.kind_left) + prime_factors(sub.kind_right):
        if not any(is_subformula(p, a) for a in acal):
            c = max(c, formula_size(p))
    d = sum(1 for _, s in subterms(sub.left) if isinstance(s, Par))
    d += sum(1 for _, s in subterms(sub.right) if isinstance(s, Par))
    if d == 0:
        l = _normalization_length(sub.left, rules) + _normalization_length(sub.right, rules)
    else:
        l = 0
    o = len(occurrences_of(sub.left, sub.channel)) + len(occurrences_of(sub.right, sub.channel))
    return ComplexityTuple(c, d, l, o)


def communication_complexity_in(sub: Par, acal: frozenset[Formula]) -> int:
    c = 0
    for p in prime_factors(sub.kind_left) + prime_factors(sub.kind_right):
        if not any(is_subformula(p, a) for a in acal):
            c = max(c, formula_size(p))
    return c


# ---------------------------------------------------------------------------
# Engine

ROOT_RULE_ORDER = (RuleTag.CrossDropL, RuleTag.CrossDropR, RuleTag.CrossFull,
                   RuleTag.PermParParL, RuleTag.PermParParR)


class _Engine:
    def __init__(self, rules: DeltaRules, cfg: StrategyConfig):
        self.rules = rules
        self.cfg = cfg
        self.current: Term = None  # type: ignore[assignment]
        self.trace: list[ReductionStep] = []
        self.steps_taken = 0
        self.group = 0

    # -- bookkeeping

    def _new_group(self) -> int:
        self.group += 1
        return self.group

    def _apply(self, path: Path, rule: RuleTag, group: Optional[int] = None) -> None:
        before = self.current
        after = apply_rule(before, path, rule, self.rules)
        self.steps_taken += 1
        if self.steps_taken > self.cfg.max_steps:
            raise StepBudgetExceeded(self.cfg.max_steps, self.trace)
        step = ReductionStep(rule, path, before, after,
                             group=self.group if group is None else group)
        if self.cfg.trace_sink is not None:
            self.cfg.trace_sink(step)
        else:
            self.trace.append(step)
        self.current = after

    def at(self, path: Path) -> Term:
        return subterm_at(self.current, path)

    # -- parallel form

    def _deepest_par_under_constructor(self, base: Path) -> Optional[tuple[Path, RuleTag]]:
        best: Optional[tuple[int, Path, RuleTag]] = None
        for rel, s in subterms(self.at(base)):
            if isinstance(s, Par):
                continue
            for tag in redexes_at(s, self.rules):
                if tag in INTUITIONISTIC or tag in (RuleTag.CrossDropL, RuleTag.CrossDropR,
                                                    RuleTag.CrossFull):
                    continue
                cand = (len(rel), base + rel, tag)
                if best is None or cand[0] > best[0]:
                    best = cand
                break
        return (best[1], best[2]) if best else None

    def _rename_blocked_channel(self, base: Path) -> bool:
        """Alpha-rename a channel whose name blocks a permutation."""
        for rel, s in subterms(self.at(base)):
            sides = ()
            if isinstance(s, App):
                sides = ((s.fn, s.arg, 0), (s.arg, s.fn, 1))
            elif isinstance(s, Pair):
                sides = ((s.fst, s.snd, 0), (s.snd, s.fst, 1))
            for child, sibling, idx in sides:
                if isinstance(child, Par) and occurs_free(sibling, child.channel):
                    renamed = rename_binder(child, fresh_name(child.channel))
                    self.current = replace_at(self.current, base + rel + (idx,), renamed)
                    return True
        return False

    def to_parallel_form(self, base: Path) -> None:
        """Permute parallel compositions above every other constructor.

        A channel clashing with a free name of the bystander is renamed
        first; the recorded permutation then chains up to alpha.
        """
        while not is_parallel_form(self.at(base)):
            found = self._deepest_par_under_constructor(base)
            if found is not None:
                path, tag = found
                self._apply(path, tag, group=self._new_group())
                continue
            if not self._rename_blocked_channel(base):
                raise StrategyError(
                    "term is not in parallel form but admits no permutation; "
                    "a parallel composition is stuck under an extension construct")

    # -- branch normalization

    def normalize_intuitionistic(self, base: Path, group: Optional[int] = None) -> int:
        g = self._new_group() if group is None else group
        n = 0
        while True:
            path = _leftmost_outermost(self.at(base), self.rules)
            if path is None:
                return n
            self._apply(base + path, intuitionistic_redex_rule(
                subterm_at(self.at(base), path), self.rules), group=g)
            n += 1

    # -- one scheduled move of the side strategy

    def _par_nodes(self, base: Path) -> list[tuple[Path, Par]]:
        return [(base + rel, s) for rel, s in subterms(self.at(base))
                if isinstance(s, Par)]

    def _drops_at(self, path: Path) -> list[RuleTag]:
        node = self.at(path)
        tags = redexes_at(node, self.rules)
        return [tg for tg in (RuleTag.CrossDropL, RuleTag.CrossDropR) if tg in tags]

    def _drop_sweep(self, base: Path, group: int) -> None:
        """Innermost-first drops within ``base`` while any apply."""
        while True:
            best: Optional[tuple[int, Path, RuleTag]] = None
            for rel, s in subterms(self.at(base)):
                if not isinstance(s, Par):
                    continue
                drops = self._drops_at(base + rel)
                if drops and (best is None or len(rel) > best[0]):
                    best = (len(rel), base + rel, drops[0])
            if best is None:
                return
            self._apply(best[1], best[2], group=group)

    def side_reduce(self, base: Path,
                    acal: Optional[frozenset[Formula]] = None) -> bool:
        """One scheduled move on the subterm at ``base``; False when the
        schedule finds nothing to do there.

        ``acal`` is the formula set the measure is taken against.  The
        master loop passes the set derived from the term it is
        normalizing; re-deriving it from the subterm shifts the measure
        and lets the parallel-parallel permutations ping-pong forever.
        """
        t = self.at(base)
        if acal is None:
            acal = acal_for(t)
        nodes = self._par_nodes(base)
        if not nodes:
            return False
        # maximal complexity first; among equals the smallest node, then
        # the leftmost (nodes arrive in preorder)
        ranked = sorted(
            ((a_complexity(node, acal, self.rules), -term_size(node), -i, path, node)
             for i, (path, node) in enumerate(nodes)),
            key=lambda row: row[:3],
            reverse=True,
        )
        for comp, _, _, path, node in ranked:
            if self._try_case(path, node, comp):
                return True
        return False

    def _try_case(self, path: Path, node: Par, comp: ComplexityTuple) -> bool:
        if comp.d > 0:
            tag = RuleTag.PermParParL if isinstance(node.left, Par) else RuleTag.PermParParR
            if tag in redexes_at(node, self.rules):
                self._apply(path, tag, group=self._new_group())
                return True
            return False
        if comp.l > 0:
            g = self._new_group()
            self.normalize_intuitionistic(path + (0,), group=g)
            self.normalize_intuitionistic(path + (1,), group=g)
            return True
        drops = self._drops_at(path)
        if comp.c > 0:
            g = self._new_group()
            if drops:
                self._apply(path, drops[0], group=g)
                return True
            if RuleTag.CrossFull in redexes_at(node, self.rules):
                self._apply(path, RuleTag.CrossFull, group=g)
                self.normalize_intuitionistic(path + (0, 0), group=g)
                self.normalize_intuitionistic(path + (1, 0), group=g)
                self._drop_sweep(path, group=g)
                return True
            return False
        if drops:
            self._apply(path, drops[0], group=self._new_group())
            return True
        return False

    # -- the master algorithm

    def master(self, base: Path) -> None:
        while True:
            t = self.at(base)
            if not is_parallel_form(t):
                self.to_parallel_form(base)
                continue
            if is_par_free(t):
                self.normalize_intuitionistic(base)
                return
            assert isinstance(t, Par)
            root_tags = redexes_at(t, self.rules)
            if not root_tags:
                self.master(base + (0,))
                self.master(base + (1,))
                if is_normal(self.at(base), self.rules):
                    return
                continue
            if self._master_redex_round(base):
                continue
            raise StrategyError("redex term made no progress; scheduling bug")

    def _master_redex_round(self, base: Path) -> bool:
        t = self.at(base)
        acal = acal_for(t)
        nodes = self._par_nodes(base)
        comm = {path: communication_complexity_in(node, acal) for path, node in nodes}
        r = max(comm.values())
        if r == 0:
            drops = self._drops_at(base)
            if drops:
                self._apply(base, drops[0], group=self._new_group())
                return True
            return self.side_reduce(base)
        candidates = [(term_size(node), i, path)
                      for i, (path, node) in enumerate(nodes) if comm[path] == r]
        w_path = min(candidates)[2]
        progressed = False
        while True:
            sub = self.at(w_path)
            inner = [communication_complexity_in(s, acal)
                     for _, s in subterms(sub) if isinstance(s, Par)]
            if not inner or max(inner) < r:
                return True
            if not self.side_reduce(w_path, acal):
                # The schedule found nothing below; fall back to a legal
                # root step so the redex round still makes progress.
                if not progressed:
                    for tag in ROOT_RULE_ORDER:
                        if tag in redexes_at(self.at(base), self.rules):
                            self._apply(base, tag, group=self._new_group())
                            return True
                return progressed
            progressed = True


# ---------------------------------------------------------------------------
# Public entry points

def to_parallel_form(t: Term, rules: DeltaRules = (),
                     max_steps: int = 1_000_000) -> Term:
    """Reachable-by-permutations parallel form of ``t``."""
    eng = _Engine(rules, StrategyConfig(max_steps=max_steps))
    eng.current = t
    eng.to_parallel_form(())
    return eng.current


def side_reduce(t: Term, rules: DeltaRules = ()) -> Term:
    """Apply one scheduled move to ``t``."""
    eng = _Engine(rules, StrategyConfig())
    eng.current = t
    if not eng.side_reduce(()):
        raise StrategyError("no scheduled move applies")
    return eng.current


def normalize_master(t: Term, cfg: Optional[StrategyConfig] = None,
                     rules: DeltaRules = ()) -> tuple[Term, list[ReductionStep]]:
    """Normalize ``t``, returning the normal form and the full trace."""
    cfg = cfg or StrategyConfig()
    eng = _Engine(rules, cfg)
    eng.current = t
    eng.master(())
    return eng.current, eng.trace
