import pytest

from lgcalc.formulas import And, Atom, BOT, Impl
from lgcalc.terms import (
    App,
    HOLE,
    Lam,
    Pair,
    Par,
    Proj,
    ScopeError,
    SimpleContext,
    Var,
    alpha_equal,
    apply_stack,
    binder_names,
    fill_context,
    free_vars,
    fresh_name,
    head_and_stack,
    multi_subst,
    occurrences_of,
    replace_at,
    subst,
    subterm_at,
    term_size,
    tuple_of,
)

p, q, r = Atom("p"), Atom("q"), Atom("r")
atom_pq = Impl(p, q)


def test_occurrences_head_first():
    t = App(Var("a", atom_pq), Var("a", p))
    occs = occurrences_of(t, "a")
    assert [o.path for o in occs] == [(0,), (1,)]
    assert occs[0].textual_rank < occs[1].textual_rank


def test_occurrences_bound_skipped():
    t = Lam("a", p, Var("a", p))
    assert occurrences_of(t, "a") == []


def test_occurrences_rank_between():
    t = App(Var("f", Impl(q, r)), App(Var("a", atom_pq), Var("y", p)))
    occs = occurrences_of(t, "a")
    assert len(occs) == 1
    f_rank = occurrences_of(t, "f")[0].textual_rank
    y_rank = occurrences_of(t, "y")[0].textual_rank
    assert f_rank < occs[0].textual_rank < y_rank


def test_occurrences_ranks_strictly_increase():
    t = App(App(Var("a", p), Var("a", p)), Lam("x", p, App(Var("a", p), Var("x", p))))
    ranks = [o.textual_rank for o in occurrences_of(t, "a")]
    assert ranks == sorted(ranks) and len(set(ranks)) == len(ranks)


def test_rightmost_in_applied_position_excludes_argument():
    # in App(Var a, u), any occurrence inside u outranks the head
    u = App(Var("a", atom_pq), Var("y", p))
    t = App(Var("a", Impl(q, r)), u)
    rightmost = occurrences_of(t, "a")[-1]
    assert rightmost.path == (1, 0)


def test_free_vars_basic():
    assert free_vars(Var("x", p)) == {"x": p}
    assert free_vars(Lam("x", p, Var("x", p))) == {}


def test_free_vars_par_binds_channel():
    t = Par("a", p, q, App(Var("a", atom_pq), Var("y", p)), Var("z", r))
    assert free_vars(t) == {"y": p, "z": r}


def test_free_vars_inconsistent_types():
    t = Pair(Var("x", p), Var("x", q))
    with pytest.raises(ScopeError):
        free_vars(t)


def test_fill_context_capture_intended():
    c = SimpleContext(Lam("x", p, HOLE), p)
    assert fill_context(c, Var("x", p)) == Lam("x", p, Var("x", p))


def test_fill_context_identity():
    c = SimpleContext(HOLE, p)
    t = App(Var("w", atom_pq), Var("y", p))
    assert fill_context(c, t) == t


def test_fill_context_app():
    c = SimpleContext(App(Var("w", atom_pq), HOLE), p)
    assert fill_context(c, Var("y", p)) == App(Var("w", atom_pq), Var("y", p))


def test_fill_context_never_renames():
    c = SimpleContext(Lam("x", p, App(Var("f", Impl(q, q)), HOLE)), q)
    u = Lam("x", q, Var("x", q))
    filled = fill_context(c, u)
    assert sorted(binder_names(filled)) == sorted(binder_names(c.body) + binder_names(u))


def test_simple_context_rejects_par_and_multiple_holes():
    with pytest.raises(ValueError):
        SimpleContext(Par("a", p, q, HOLE, Var("z", r)), p)
    with pytest.raises(ValueError):
        SimpleContext(Pair(HOLE, HOLE), p)


def test_subst_basic():
    assert subst(Var("x", p), Var("y", p), "x") == Var("y", p)
    assert subst(Lam("y", p, Var("y", p)), Var("z", p), "x") == Lam("y", p, Var("y", p))


def test_subst_identity():
    t = Lam("y", p, App(Var("x", atom_pq), Var("y", p)))
    assert subst(t, Var("x", atom_pq), "x") == t


def test_subst_capture_avoiding():
    t = Lam("y", p, Var("x", p))
    out = subst(t, Var("y", p), "x")
    assert isinstance(out, Lam) and out.var != "y"
    assert out.body == Var("y", p)


def test_multi_subst_empty_unchanged():
    t = App(Var("x", atom_pq), Var("y", p))
    assert multi_subst(t, Var("v", p), []) is t


def test_multi_subst_singleton_is_subst():
    u = App(Var("f", atom_pq), Var("y", p))
    v = Var("w", p)
    assert multi_subst(u, v, [("y", p)]) == subst(u, v, "y")


def test_multi_subst_pair_projections():
    u = Pair(Var("y0", p), Var("y1", q))
    w = Var("w", And(p, q))
    out = multi_subst(u, w, [("y0", p), ("y1", q)])
    assert out == Pair(Proj(w, 0), Proj(w, 1))


def test_tuple_of():
    assert tuple_of([("y", p)]) == Var("y", p)
    t = tuple_of([("y", p), ("z", q), ("w", r)])
    assert t == Pair(Var("y", p), Pair(Var("z", q), Var("w", r)))
    empty = tuple_of([])
    assert isinstance(empty, Lam) and empty.var_type == BOT
    assert empty.body == Var(empty.var, BOT)


def test_fresh_name_counter_is_global():
    assert fresh_name("b") == "b#1"
    assert fresh_name("b") == "b#2"
    assert fresh_name("a") == "a#3"


def test_replace_at_locality():
    t = App(Lam("x", p, Var("x", p)), Var("y", p))
    t2 = replace_at(t, (1,), Var("z", p))
    assert subterm_at(t2, (0,)) == subterm_at(t, (0,))
    assert subterm_at(t2, (1,)) == Var("z", p)


def test_head_and_stack_roundtrip():
    t = Proj(App(App(Var("h", p), Var("x", p)), Var("y", p)), 1)
    head, stack = head_and_stack(t)
    assert head == Var("h", p)
    assert apply_stack(head, stack) == t


def test_alpha_equal():
    t1 = Lam("x", p, Var("x", p))
    t2 = Lam("y", p, Var("y", p))
    assert alpha_equal(t1, t2)
    assert not alpha_equal(t1, Lam("y", q, Var("y", q)))
    s1 = Par("a", p, q, Var("z", r), App(Var("a", Impl(q, p)), Var("w", q)))
    s2 = Par("b", p, q, Var("z", r), App(Var("b", Impl(q, p)), Var("w", q)))
    assert alpha_equal(s1, s2)
    assert not alpha_equal(s1, Var("z", r))
    assert term_size(s1) == 5
