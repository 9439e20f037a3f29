import pytest

from helpers import parallel_or
from lgcalc.formulas import (
    And,
    Atom,
    BOOL,
    BOT,
    Impl,
    formula_size,
    is_proper_subformula,
    prime_factors,
    strong_subformulas,
)
from lgcalc.syntax import parse_formula, parse_term
from lgcalc.terms import App, Efq, Lam, Pair, Par, Proj, Var, free_vars
from lgcalc.typecheck import (
    TypeEnv,
    TypecheckError,
    channel_info,
    communication_complexity,
    communication_kind,
    infer,
    type_of,
)

p, q, r = Atom("p"), Atom("q"), Atom("r")


def test_infer_identity():
    assert infer(TypeEnv(), Lam("x", p, Var("x", p))) == Impl(p, p)


def test_infer_linearity_term():
    # one communication proves the encoded linearity axiom
    t = parse_term(r"""
        <\y:(p -> q) -> q -> p. y a, \z:(q -> p) -> p -> q. a>
        ||[a : p ~ q]
        <\z:(p -> q) -> q -> p. a, \y:(q -> p) -> p -> q. y a>
    """)
    x_to_y = Impl(Impl(p, q), Impl(q, p))
    y_to_x = Impl(Impl(q, p), Impl(p, q))
    assert infer(TypeEnv(), t) == And(Impl(x_to_y, Impl(q, p)),
                                      Impl(y_to_x, Impl(p, q)))


def test_infer_parallel_or_body():
    body = parallel_or().body.body
    env = TypeEnv({"x": BOOL, "y": BOOL})
    assert infer(env, body) == BOOL


def test_infer_errors_carry_paths():
    with pytest.raises(TypecheckError) as e:
        infer(TypeEnv(), Var("x", p))
    assert e.value.path == ()
    with pytest.raises(TypecheckError) as e:
        infer(TypeEnv(), Lam("x", p, App(Var("x", p), Var("x", p))))
    assert e.value.path == (0,)
    with pytest.raises(TypecheckError) as e:
        infer(TypeEnv(), Lam("x", p, Proj(Var("x", p), 0)))
    assert e.value.path == (0,)
    with pytest.raises(TypecheckError):
        infer(TypeEnv(), Par("a", p, q, Var("u", p), Var("u", q)))
    with pytest.raises(TypecheckError):
        infer(TypeEnv({"u": p}), Efq(q, Var("u", p)))
    with pytest.raises(TypecheckError):
        infer(TypeEnv({"u": BOT}), Efq(BOT, Var("u", BOT)))


def test_weakening():
    t = Lam("x", p, App(Var("f", Impl(p, q)), Var("x", p)))
    small = TypeEnv({"f": Impl(p, q)})
    big = small.extend("g", Impl(q, r)).extend("h", BOT)
    assert infer(small, t) == infer(big, t) == Impl(p, q)


def test_communication_kind():
    t = Par("a", p, q, Var("z", r), Var("z", r))
    assert communication_kind(t) == (p, q)
    assert communication_kind(parallel_or().body.body) == (BOOL, BOOL)
    t5 = parse_term(
        r"(a (\z:B -> F. z m)) s ||[a : (B -> F) -> F ~ F -> F] (a (\y:F. y)) (\x:B. recv x)",
        {"m": parse_formula("B"), "s": parse_formula("F"), "recv": parse_formula("B -> F")})
    assert communication_kind(t5) == (parse_formula("(B -> F) -> F"),
                                      parse_formula("F -> F"))


def oracle_complexity(t: Par) -> int:
    """Independent reimplementation of the complexity measure."""
    a = type_of(t)
    premise_types = list(free_vars(t).values())
    worst = 0
    for kind in (t.kind_left, t.kind_right):
        for factor in prime_factors(kind):
            if is_proper_subformula(factor, a):
                continue
            if any(factor in strong_subformulas(f) for f in premise_types):
                continue
            worst = max(worst, formula_size(factor))
    return worst


def test_complexity_zero_when_factors_are_proper_subformulas():
    t = parse_term(r"(\y:p. a y) ||[a : p ~ p] (\z:p. a z)")
    assert communication_complexity(t) == 0
    assert oracle_complexity(t) == 0


def test_complexity_positive_case():
    # kind ((p -> q), r) at goal r: both factors escape, worst has size 3
    a_left = Var("a", Impl(Impl(p, q), r))
    t = Par("a", Impl(p, q), r,
            App(a_left, Var("w", Impl(p, q))),
            Var("z", r))
    assert type_of(t) == r
    assert oracle_complexity(t) == 3
    assert communication_complexity(t) == 3


def test_complexity_excludes_strong_subformulas_of_premises():
    # same kind, but a premise whose type makes p -> q a strong subformula
    big = Impl(Impl(Impl(p, q), q), r)
    a_left = Var("a", Impl(Impl(p, q), r))
    t = Par("a", Impl(p, q), r,
            App(a_left, Var("w", Impl(p, q))),
            App(Var("h", big), Var("w2", Impl(Impl(p, q), q))))
    assert communication_complexity(t) == oracle_complexity(t) == 1


def test_channel_info():
    t = Par("a", p, p, Var("z", p), Var("z", p))
    info = channel_info(t)
    assert info.channel == "a" and info.kind == (p, p) and info.complexity == 1


def test_type_uniqueness_is_functional():
    t = parallel_or()
    assert type_of(t) == type_of(t) == Impl(BOOL, Impl(BOOL, BOOL))
