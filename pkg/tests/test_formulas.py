import itertools

from lgcalc.formulas import (
    And,
    Atom,
    BOT,
    Impl,
    TOP,
    conj,
    formula_size,
    is_proper_subformula,
    prime_factors,
    strong_subformulas,
    strong_subformulas_by_factors,
)

p, q, r = Atom("p"), Atom("q"), Atom("r")


def test_prime_factors_atom_is_its_own_factor():
    assert prime_factors(p) == (p,)


def test_prime_factors_flatten_fully():
    assert prime_factors(And(And(p, q), r)) == (p, q, r)


def test_prime_factors_implication_is_prime():
    assert prime_factors(And(p, Impl(q, r))) == (p, Impl(q, r))


def test_prime_factors_reconjoin_idempotent():
    for f in [p, And(p, q), And(And(p, q), r), And(p, And(Impl(q, r), q))]:
        factors = prime_factors(f)
        assert prime_factors(conj(factors)) == factors


def test_formula_size():
    assert formula_size(p) == 1
    assert formula_size(Impl(p, q)) == 3
    assert formula_size(Impl(And(p, q), BOT)) == 5
    assert formula_size(TOP) == 3


def test_is_proper_subformula():
    assert is_proper_subformula(p, Impl(p, q))
    assert not is_proper_subformula(Impl(p, q), Impl(p, q))
    assert is_proper_subformula(q, And(p, Impl(q, r)))


def test_strong_subformulas_examples():
    assert strong_subformulas(p) == frozenset()
    assert strong_subformulas(Impl(Impl(p, q), r)) == frozenset({p, q})
    assert strong_subformulas(And(p, Impl(q, r))) == frozenset({q, r})


def enumerate_formulas(atoms, max_size):
    """All formulas over ``atoms`` (plus bot) up to ``max_size`` nodes."""
    by_size = {1: list(atoms) + [BOT]}
    for n in range(2, max_size + 1):
        forms = []
        for k in range(1, n - 1):
            for a in by_size.get(k, ()):
                for b in by_size.get(n - 1 - k, ()):
                    forms.append(Impl(a, b))
                    forms.append(And(a, b))
        by_size[n] = forms
    return [f for fs in by_size.values() for f in fs]


def test_strong_subformula_routes_agree_small():
    # exhaustive up to size 7 here; the acceptance suite pushes to 9
    for f in enumerate_formulas([p, q], 7):
        assert strong_subformulas(f) == strong_subformulas_by_factors(f), f
