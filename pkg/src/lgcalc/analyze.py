"""Executable checkers for the calculus' metatheorems.

Each checker is total and returns a report; only violated preconditions
raise.  A failing check always names the offending position.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .formulas import BOT, Formula, Impl, is_proper_subformula, is_subformula, \
    prime_factors, strong_subformulas
from .rewrite import DeltaRules, ReductionStep, RewriteError, is_normal, is_par_free
from .strategy import is_parallel_form
from .terms import (
    App,
    Lam,
    Par,
    Path,
    Proj,
    Term,
    alpha_equal,
    children,
    free_vars,
    occurrences_of,
    subterm_at,
    subterms,
)
from .typecheck import TypeEnv, infer


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    witness_path: Optional[Path] = None
    detail: str = ""


@dataclass
class AnalysisReport:
    subject: Term
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, witness_path: Optional[Path] = None,
            detail: str = ""):
        if not passed and witness_path is None:
            raise ValueError("a failing check must carry a witness path")
        self.checks.append(CheckResult(name, passed, witness_path, detail))


def _premise_formulas(t: Term, env: TypeEnv) -> list[Formula]:
    """Types of the free variables together with the term's own type."""
    return [*free_vars(t).values(), infer(env, t)]


def _env_for(t: Term, env: Optional[TypeEnv]) -> TypeEnv:
    return env if env is not None else TypeEnv(dict(free_vars(t)))


def check_parallel_form(t: Term) -> bool:
    """No parallel composition below any other constructor."""
    return is_parallel_form(t)


def check_subformula_property(t: Term, env: Optional[TypeEnv] = None) -> AnalysisReport:
    """Analyticity of a term: bound channels have kinds made of proper
    subformulas of the premises/conclusion, and every other subterm's
    type is a subformula or conjunction of subformulas of them."""
    env = _env_for(t, env)
    report = AnalysisReport(t)
    goals = _premise_formulas(t, env)

    def proper_of_goals(f: Formula) -> bool:
        return any(is_proper_subformula(f, g) for g in goals)

    def conjunction_of_subformulas(f: Formula) -> bool:
        return all(any(is_subformula(p, g) for g in goals) for p in prime_factors(f))

    ok = True
    for path, s in subterms(t):
        if isinstance(s, Par):
            for kind in (s.kind_left, s.kind_right):
                bad = [p for p in prime_factors(kind) if not proper_of_goals(p)]
                if bad:
                    report.add("channel-kind", False, path,
                               f"channel {s.channel}: factor of {kind} is not a proper "
                               "subformula of the premises or conclusion")
                    ok = False
    if ok:
        report.add("channel-kind", True)

    channel_occurrences: set[Path] = set()
    for path, s in subterms(t):
        if isinstance(s, Par):
            for branch, idx in ((s.left, 0), (s.right, 1)):
                for occ in occurrences_of(branch, s.channel):
                    channel_occurrences.add(path + (idx,) + occ.path)
    ok = True
    bound: dict[Path, TypeEnv] = {(): env}
    for path, s in subterms(t):
        local = bound[path]
        if isinstance(s, Par):
            bound[path + (0,)] = local.extend(s.channel, Impl(s.kind_left, s.kind_right))
            bound[path + (1,)] = local.extend(s.channel, Impl(s.kind_right, s.kind_left))
        else:
            if isinstance(s, Lam):
                bound[path + (0,)] = local.extend(s.var, s.var_type)
            else:
                for i in range(len(children(s))):
                    bound[path + (i,)] = local
        if path in channel_occurrences:
            continue
        f = infer(local, s)
        if not (any(is_subformula(f, g) for g in goals) or conjunction_of_subformulas(f)):
            report.add("subterm-types", False, path,
                       f"subterm type {f} is neither a subformula nor a conjunction "
                       "of subformulas of the premises or conclusion")
            ok = False
    if ok:
        report.add("subterm-types", True)
    return report


def check_bound_hypothesis(t: Term, env: Optional[TypeEnv] = None) -> AnalysisReport:
    """Every bound variable of a parallel-free normal form has a type
    that is a proper subformula of a prime factor of the term's type or
    a strong subformula of a premise."""
    env = _env_for(t, env)
    if not is_par_free(t):
        raise ValueError("bound-hypothesis check needs a parallel-free term")
    if not is_normal(t):
        raise ValueError("bound-hypothesis check needs a normal form")
    a = infer(env, t)
    premises = list(free_vars(t).values())
    strong: set[Formula] = set()
    for f in premises:
        strong |= strong_subformulas(f)
    report = AnalysisReport(t)
    ok = True
    for path, s in subterms(t):
        if not isinstance(s, Lam):
            continue
        b = s.var_type
        fine = any(is_proper_subformula(b, p) for p in prime_factors(a)) or b in strong
        if not fine:
            report.add("bound-hypothesis", False, path,
                       f"bound {s.var} : {b} escapes the premise/conclusion subformulas")
            ok = False
    if ok:
        report.add("bound-hypothesis", True)
    return report


def check_applied_occurrences(t: Term, z: str,
                              env: Optional[TypeEnv] = None) -> AnalysisReport:
    """Occurrences of a free variable in a parallel-free normal form are
    applied, unless its type is bot, a subformula of the conclusion, or
    a proper subformula of another premise."""
    env = _env_for(t, env)
    if not is_par_free(t):
        raise ValueError("applied-occurrence check needs a parallel-free term")
    if not is_normal(t):
        raise ValueError("applied-occurrence check needs a normal form")
    fvs = free_vars(t)
    if z not in fvs:
        raise ValueError(f"{z} does not occur free in the term")
    b = fvs[z]
    a = infer(env, t)
    others = [f for name, f in fvs.items() if name != z]

    report = AnalysisReport(t)
    if b == BOT or is_subformula(b, a) or any(is_proper_subformula(b, f) for f in others):
        report.add("applied-occurrences", True, detail="exempt by type")
        return report
    ok = True
    for occ in occurrences_of(t, z):
        applied = False
        if occ.path:
            parent = subterm_at(t, occ.path[:-1])
            if isinstance(parent, App) and occ.path[-1] == 0:
                applied = True
            if isinstance(parent, Proj) and occ.path[-1] == 0:
                applied = True
        if not applied:
            report.add("applied-occurrences", False, occ.path,
                       f"occurrence of {z} : {b} is not applied")
            ok = False
    if ok:
        report.add("applied-occurrences", True)
    return report


def check_subject_reduction(trace: list[ReductionStep],
                            env: Optional[TypeEnv] = None,
                            rules: DeltaRules = ()) -> AnalysisReport:
    """Replay a trace, verifying each step is a genuine rule instance
    that preserves the type and never enlarges the free-variable set."""
    from .rewrite import apply_rule

    if not trace:
        raise ValueError("empty trace")
    subject = trace[0].before
    env = _env_for(subject, env)
    report = AnalysisReport(subject)
    current = subject
    try:
        expected = infer(env, subject)
    except Exception as e:
        report.add("subject-reduction", False, (), f"initial term does not type: {e}")
        return report
    for i, step in enumerate(trace):
        if not alpha_equal(current, step.before):
            report.add("subject-reduction", False, step.path,
                       f"step {i} does not continue the previous term")
            return report
        try:
            redone = apply_rule(step.before, step.path, step.rule, rules)
        except RewriteError as e:
            report.add("subject-reduction", False, step.path,
                       f"step {i} is not applicable: {e}")
            return report
        if not alpha_equal(redone, step.after):
            report.add("subject-reduction", False, step.path,
                       f"step {i} does not match a {step.rule.value} reduct")
            return report
        try:
            after_env = TypeEnv(dict(free_vars(step.after)))
            got = infer(after_env, step.after)
        except Exception as e:
            report.add("subject-reduction", False, step.path,
                       f"step {i} produced an ill-typed term: {e}")
            return report
        if got != expected:
            report.add("subject-reduction", False, step.path,
                       f"step {i} changed the type from {expected} to {got}")
            return report
        grown = set(free_vars(step.after)) - set(free_vars(step.before))
        if grown:
            report.add("subject-reduction", False, step.path,
                       f"step {i} created free variables {sorted(grown)}")
            return report
        current = step.after
    report.add("subject-reduction", True)
    return report
