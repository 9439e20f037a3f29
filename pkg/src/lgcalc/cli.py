"""Batch driver: check / normalize / analyze / fmt over .lg files.

Exit codes: 0 success, 2 parse error, 3 type error, 4 step budget
exceeded, 5 an analysis check failed.  All diagnostics go to stderr;
behavior is controlled by flags only, never the environment, and the
fresh-name counter restarts per run so identical invocations print
identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .analyze import (
    check_parallel_form,
    check_subformula_property,
    check_subject_reduction,
)
from .rewrite import ReductionStep, is_normal
from .strategy import StepBudgetExceeded, StrategyConfig, normalize_master
from .syntax import ParseError, Program, parse_program, pretty, pretty_formula, pretty_program
from .terms import reset_fresh_names
from .typecheck import TypeEnv, TypecheckError, infer

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_TYPE = 3
EXIT_BUDGET = 4
EXIT_ANALYSIS = 5

ALL_CHECKS = ("subformula", "parallel", "normal", "subject-reduction")


def _load(path: str) -> Program:
    with open(path, encoding="utf-8") as fh:
        return parse_program(fh.read())


def _emit_trace(steps: list[ReductionStep], fmt: str, out) -> None:
    if fmt == "none":
        return
    for i, step in enumerate(steps, start=1):
        if fmt == "jsonl":
            print(json.dumps({
                "step": i,
                "rule": step.rule.value,
                "path": list(step.path),
                "term": pretty(step.after),
            }), file=out)
        else:
            print(f"step {i}: {step.rule.value} at {list(step.path)}: "
                  f"{pretty(step.after)}", file=out)


def _normalize(prog: Program, max_steps: int, parallel: bool):
    reset_fresh_names()
    cfg = StrategyConfig(max_steps=max_steps, parallel_branches=parallel)
    return normalize_master(prog.main, cfg, prog.rules)


def cmd_check(args) -> int:
    prog = _load(args.file)
    ty = infer(TypeEnv(prog.env()), prog.main)
    print(pretty_formula(ty))
    return EXIT_OK


def cmd_normalize(args) -> int:
    prog = _load(args.file)
    infer(TypeEnv(prog.env()), prog.main)
    normal, steps = _normalize(prog, args.max_steps, args.parallel)
    _emit_trace(steps, args.trace, sys.stdout)
    print(pretty(normal))
    return EXIT_OK


def cmd_analyze(args) -> int:
    prog = _load(args.file)
    env = TypeEnv(prog.env())
    infer(env, prog.main)
    selected = [c.strip() for c in args.checks.split(",")] if args.checks else list(ALL_CHECKS)
    for c in selected:
        if c not in ALL_CHECKS:
            print(f"unknown check {c!r}; available: {', '.join(ALL_CHECKS)}",
                  file=sys.stderr)
            return EXIT_PARSE
    normal, steps = _normalize(prog, args.max_steps, args.parallel)
    failed = False

    def show(name: str, ok: bool, detail: str = ""):
        nonlocal failed
        line = f"{name}: {'PASS' if ok else 'FAIL'}"
        if detail:
            line += f" ({detail})"
        print(line)
        failed = failed or not ok

    for c in selected:
        if c == "subformula":
            report = check_subformula_property(normal, env)
            bad = [r for r in report.checks if not r.passed]
            show("subformula", report.passed,
                 bad[0].detail if bad else "")
        elif c == "parallel":
            show("parallel", check_parallel_form(normal))
        elif c == "normal":
            show("normal", is_normal(normal, prog.rules))
        elif c == "subject-reduction":
            if steps:
                report = check_subject_reduction(steps, env, prog.rules)
                bad = [r for r in report.checks if not r.passed]
                show("subject-reduction", report.passed,
                     bad[0].detail if bad else "")
            else:
                show("subject-reduction", True, "no steps taken")
    return EXIT_ANALYSIS if failed else EXIT_OK


def cmd_fmt(args) -> int:
    prog = _load(args.file)
    with open(args.file, "w", encoding="utf-8") as fh:
        fh.write(pretty_program(prog))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lg",
        description="type check, normalize and analyze .lg programs")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("file", help="path to a .lg program")
        sp.add_argument("--max-steps", type=int, default=1_000_000,
                        help="reduction step budget (default 10^6)")
        sp.add_argument("--trace", choices=("none", "text", "jsonl"), default="none",
                        help="emit one line per reduction step")
        sp.add_argument("--parallel", action="store_true",
                        help="allow branch-parallel normalization scheduling")

    sp = sub.add_parser("check", help="print the type of the main term")
    sp.add_argument("file")
    sp.set_defaults(fn=cmd_check)

    sp = sub.add_parser("normalize", help="print the normal form of the main term")
    common(sp)
    sp.set_defaults(fn=cmd_normalize)

    sp = sub.add_parser("analyze", help="normalize, then run analysis checks")
    common(sp)
    sp.add_argument("--checks", default="",
                    help=f"comma-separated subset of: {', '.join(ALL_CHECKS)}")
    sp.set_defaults(fn=cmd_analyze)

    sp = sub.add_parser("fmt", help="rewrite the file in canonical form")
    sp.add_argument("file")
    sp.set_defaults(fn=cmd_fmt)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except TypecheckError as e:
        print(f"type error: {e}", file=sys.stderr)
        return EXIT_TYPE
    except StepBudgetExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    raise SystemExit(main())
