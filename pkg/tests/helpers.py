"""Terms shared between test modules."""

from lgcalc.formulas import BOOL
from lgcalc.syntax import parse_term
from lgcalc.terms import App, BoolLit, Term, Var

PARALLEL_OR_SRC = r"""
\x:Bool. \y:Bool.
  (if x then (\z:Bool. \k:Bool. z) else (\z:Bool. \k:Bool. k)) true (a x)
  ||[a : Bool ~ Bool]
  (if y then (\z:Bool. \k:Bool. z) else (\z:Bool. \k:Bool. k)) true (a y)
"""


def parallel_or() -> Term:
    return parse_term(PARALLEL_OR_SRC)


def por_applied(x: Term, y: Term) -> Term:
    return App(App(parallel_or(), x), y)


T = BoolLit(True)
F = BoolLit(False)
U = Var("u", BOOL)
