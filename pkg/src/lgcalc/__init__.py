"""Parallel lambda calculus with typed channel communication.

The library is organized as:

- ``formulas`` / ``terms``: the propositional types, the proof terms and
  all subformula/occurrence/substitution machinery;
- ``typecheck``: the typing judgment and channel metadata;
- ``rewrite``: every basic reduction rule as a position-addressed step;
- ``strategy``: the terminating normalization pipeline;
- ``analyze``: executable checkers for the calculus' metatheorems;
- ``syntax`` / ``cli``: concrete .lg syntax and the batch driver.
"""

from .formulas import And, Atom, BOT, Bot, Formula, Impl, TOP
from .terms import (
    App,
    BoolLit,
    Efq,
    Ite,
    Lam,
    Pair,
    Par,
    Proj,
    Term,
    Var,
    alpha_equal,
    free_vars,
    fresh_name,
    reset_fresh_names,
)
from .typecheck import TypeEnv, TypecheckError, communication_complexity, \
    communication_kind, infer, type_of
from .rewrite import DeltaRule, ReductionStep, RuleTag, find_redexes, is_normal
from .strategy import StrategyConfig, intuitionistic_normalize, normalize_master, \
    to_parallel_form
from .analyze import check_parallel_form, check_subformula_property, \
    check_subject_reduction
from .syntax import parse_formula, parse_program, parse_term, pretty, pretty_formula

__all__ = [
    "And", "Atom", "BOT", "Bot", "Formula", "Impl", "TOP",
    "App", "BoolLit", "Efq", "Ite", "Lam", "Pair", "Par", "Proj", "Term", "Var",
    "alpha_equal", "free_vars", "fresh_name", "reset_fresh_names",
    "TypeEnv", "TypecheckError", "communication_complexity", "communication_kind",
    "infer", "type_of",
    "DeltaRule", "ReductionStep", "RuleTag", "find_redexes", "is_normal",
    "StrategyConfig", "intuitionistic_normalize", "normalize_master",
    "to_parallel_form",
    "check_parallel_form", "check_subformula_property", "check_subject_reduction",
    "parse_formula", "parse_program", "parse_term", "pretty", "pretty_formula",
]
