import pytest

from helpers import F, T, U, parallel_or, por_applied
from lgcalc.formulas import Atom, BOOL, Impl
from lgcalc.rewrite import RuleTag, is_normal
from lgcalc.strategy import (
    ComplexityTuple,
    StepBudgetExceeded,
    StrategyConfig,
    a_complexity,
    acal_for,
    intuitionistic_normalize,
    is_parallel_form,
    normalize_master,
    side_reduce,
    to_parallel_form,
)
from lgcalc.syntax import parse_term
from lgcalc.terms import App, Lam, Pair, Par, Var, alpha_equal

p, q, r = Atom("p"), Atom("q"), Atom("r")


def test_complexity_tuple_lexicographic():
    assert ComplexityTuple(1, 0, 0, 9) > ComplexityTuple(0, 9, 9, 9)
    assert ComplexityTuple(1, 1, 0, 0) > ComplexityTuple(1, 0, 9, 9)
    assert ComplexityTuple(1, 1, 2, 0) > ComplexityTuple(1, 1, 1, 9)


def test_parallel_form_of_simply_typed_is_identity():
    t = Lam("x", p, Var("x", p))
    assert to_parallel_form(t) is t


def test_parallel_form_pushes_lambda():
    t = parse_term(r"\x:p. (u ||[a : p ~ q] v)", {"u": q, "v": q})
    out = to_parallel_form(t)
    assert alpha_equal(out, parse_term(r"(\x:p. u) ||[a : p ~ q] (\x:p. v)",
                                       {"u": q, "v": q}))


def test_parallel_form_app_of_two_compositions():
    env = {"u1": Impl(p, q), "u2": Impl(p, q), "v1": p, "v2": p}
    t = App(parse_term(r"u1 ||[a : p ~ p] u2", env),
            parse_term(r"v1 ||[b : q ~ q] v2", env))
    out = to_parallel_form(t)
    expected = parse_term(
        r"(u1 v1 ||[b : q ~ q] u1 v2) ||[a : p ~ p] (u2 v1 ||[b : q ~ q] u2 v2)",
        env)
    assert alpha_equal(out, expected)
    assert is_parallel_form(out)


def test_intuitionistic_normalize_counts_steps():
    t = Lam("x", p, Var("x", p))
    assert intuitionistic_normalize(t) == (t, 0)
    redex = App(Lam("x", p, Var("x", p)), Var("y", p))
    assert intuitionistic_normalize(redex) == (Var("y", p), 1)


def test_intuitionistic_normalize_discard_then_apply():
    # (\z. \k. k) T (a F) needs exactly two contractions to reach a F
    a = Var("a", Impl(BOOL, BOOL))
    t = App(App(Lam("z", BOOL, Lam("k", BOOL, Var("k", BOOL))), T), App(a, F))
    normal, n = intuitionistic_normalize(t)
    assert normal == App(a, F)
    assert n == 2


def test_a_complexity_kind_inside_acal_is_zero():
    t = parse_term(r"(\y:p. a y) ||[a : p ~ p] (\z:p. a z)")
    acal = acal_for(t)
    assert a_complexity(t, acal).c == 0


def test_a_complexity_of_parallel_or_cross_stage():
    a = Var("a", Impl(BOOL, BOOL))
    t = Par("a", BOOL, BOOL, App(a, F), App(a, F))
    comp = a_complexity(t, acal_for(t))
    assert comp == ComplexityTuple(1, 0, 0, 2)


def test_a_complexity_counts_nested_compositions():
    inner = parse_term(r"x1 ||[b : p ~ p] y1", {"x1": q, "y1": q})
    t = Par("a", p, p, inner, Var("z", q))
    assert a_complexity(t, acal_for(t)).d == 1


def test_side_reduce_permutes_nested_composition():
    env = {"x1": q, "y1": q, "z": q}
    inner = parse_term(r"x1 ||[b : p ~ r] y1", env)
    t = Par("a", p, r, inner, Var("z", q))
    out = side_reduce(t)
    expected = parse_term(
        r"(x1 ||[a : p ~ r] z) ||[b : p ~ r] (y1 ||[a : p ~ r] z)", env)
    assert alpha_equal(out, expected)


def test_side_reduce_normalizes_branches():
    redex = App(Lam("x", p, Var("x", p)), Var("y", p))
    t = Par("a", Impl(p, q), r, redex, redex)
    out = side_reduce(t)
    assert out == Par("a", Impl(p, q), r, Var("y", p), Var("y", p))


def test_side_reduce_cross_stage_collapses_to_false():
    a = Var("a", Impl(BOOL, BOOL))
    t = Par("a", BOOL, BOOL, App(a, F), App(a, F))
    assert side_reduce(t) == F


def test_normalize_parallel_or_truth_table():
    for args, expected in [((U, T), T), ((T, U), T), ((F, F), F)]:
        normal, steps = normalize_master(por_applied(*args))
        assert normal == expected
        assert len(steps) <= 200


def test_normalize_output_is_parallel_normal_form():
    t = por_applied(U, U)
    normal, steps = normalize_master(t)
    assert is_parallel_form(normal)
    assert is_normal(normal)


def test_trace_steps_chain():
    t = por_applied(F, F)
    normal, steps = normalize_master(t)
    assert steps[0].before == t
    for a, b in zip(steps, steps[1:]):
        assert a.after == b.before
    assert steps[-1].after == normal


def test_ff_trace_passes_through_ff_composition():
    _, steps = normalize_master(por_applied(F, F))
    a = Var("a", Impl(BOOL, BOOL))
    stage = Par("a", BOOL, BOOL, App(a, F), App(a, F))
    assert any(alpha_equal(s.after, stage) for s in steps)
    cross = [s for s in steps if s.rule == RuleTag.CrossFull]
    assert len(cross) == 1
    reduct = cross[0].after
    expected = Par("b", Impl(Atom("__"), Atom("__")), Atom("__"), stage, stage)
    # compare shape up to the fresh channel: left and right components
    assert alpha_equal(reduct.left, Par("a", BOOL, BOOL, F, App(a, F)))
    assert alpha_equal(reduct.right, Par("a", BOOL, BOOL, F, App(a, F)))


def test_budget_exceeded():
    with pytest.raises(StepBudgetExceeded):
        normalize_master(por_applied(F, F), StrategyConfig(max_steps=3))


def test_trace_sink_streams():
    seen = []
    cfg = StrategyConfig(trace_sink=seen.append)
    normal, steps = normalize_master(por_applied(F, F), cfg)
    assert steps == []
    assert seen and seen[-1].after == normal


def test_drop_preference_keeps_left():
    t = Par("a", p, q, Var("y", r), Var("z", r))
    normal, steps = normalize_master(t)
    assert normal == Var("y", r)
    assert steps[0].rule == RuleTag.CrossDropL
