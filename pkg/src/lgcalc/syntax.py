"""Concrete syntax for .lg programs: parsing and pretty-printing.

A program is a list of declarations followed by a main term:

    atom p;                     # declare a propositional atom
    const f : p -> p;           # declare a typed constant
    rule g 5 => 9;              # ground rewrite for a constant
    main = \\x:p. f x;

Formulas:  bot | top | IDENT | F -> F | F /\\ F | ~F | (F)   with ->
right-associative, /\\ binding tighter, ~ tightest; top and ~ expand at
parse time.  Terms: variables, \\x:F. t, application (left), <t, t>,
projections t.0 / t.1, efq[F] t, if/then/else, literals, and parallel
composition t ||[a : F ~ F] u, which binds weakest and associates to
the right.  Comments run from # to end of line.

Variable occurrences are resolved against their binders and the
declared constants, so the abstract terms come out fully typed.
Integer and string literals become constants of the builtin atoms Nat
and String; true/false inhabit Bool.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import Optional, Union

from .formulas import (
    BOOL,
    BOT,
    NAT,
    STRING,
    TOP,
    And,
    Atom,
    Bot,
    Formula,
    Impl,
    neg,
)
from .rewrite import DeltaRule, DeltaRules
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
    binder_names,
    free_vars,
    occurs_free,
    rename_binder,
    subterms,
)

KEYWORDS = {"atom", "const", "rule", "main", "if", "then", "else",
            "true", "false", "efq", "bot", "top"}
BUILTIN_ATOMS = {"Bool": BOOL, "Nat": NAT, "String": STRING}
IDENT_START = set(string.ascii_letters + "_")
IDENT_CONT = IDENT_START | set(string.digits) | {"'"}


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT INT STRING or the punctuation itself
    text: str
    line: int
    col: int


PUNCT = ["||[", "->", "=>", "/\\", "(", ")", "<", ">", "[", "]",
         "\\", ".", ",", ";", ":", "~", "="]


def tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(src)
    while i < n:
        c = src[i]
        if c == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if c in " \t\r":
            i, col = i + 1, col + 1
            continue
        if c == "#":
            while i < n and src[i] != "\n":
                i += 1
            continue
        if c == '"':
            j = i + 1
            while j < n and src[j] not in '"\n':
                j += 1
            if j >= n or src[j] != '"':
                raise ParseError("unterminated string literal", line, col)
            toks.append(Token("STRING", src[i + 1:j], line, col))
            col += j + 1 - i
            i = j + 1
            continue
        if c.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            toks.append(Token("INT", src[i:j], line, col))
            col += j - i
            i = j
            continue
        if c in IDENT_START:
            j = i
            while j < n and src[j] in IDENT_CONT:
                j += 1
            text = src[i:j]
            toks.append(Token(text if text in KEYWORDS else "IDENT", text, line, col))
            col += j - i
            i = j
            continue
        for p in PUNCT:
            if src.startswith(p, i):
                toks.append(Token(p, p, line, col))
                i += len(p)
                col += len(p)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    toks.append(Token("EOF", "", line, col))
    return toks


# ---------------------------------------------------------------------------
# Surface terms (names not yet resolved to their types)

@dataclass(frozen=True)
class _S:
    line: int
    col: int


@dataclass(frozen=True)
class SVar(_S):
    name: str


@dataclass(frozen=True)
class SLam(_S):
    var: str
    var_type: Formula
    body: "Surface"


@dataclass(frozen=True)
class SApp(_S):
    fn: "Surface"
    arg: "Surface"


@dataclass(frozen=True)
class SPair(_S):
    fst: "Surface"
    snd: "Surface"


@dataclass(frozen=True)
class SProj(_S):
    target: "Surface"
    index: int


@dataclass(frozen=True)
class SEfq(_S):
    atom_type: Formula
    target: "Surface"


@dataclass(frozen=True)
class SPar(_S):
    channel: str
    kind_left: Formula
    kind_right: Formula
    left: "Surface"
    right: "Surface"


@dataclass(frozen=True)
class SBool(_S):
    value: bool


@dataclass(frozen=True)
class SIte(_S):
    cond: "Surface"
    then_branch: "Surface"
    else_branch: "Surface"


@dataclass(frozen=True)
class SLit(_S):
    text: str  # literal spelling; "5" or "\"prod\""
    type: Formula


Surface = Union[SVar, SLam, SApp, SPair, SProj, SEfq, SPar, SBool, SIte, SLit]


@dataclass
class Program:
    atoms: list[str] = field(default_factory=list)
    consts: dict[str, Formula] = field(default_factory=dict)
    delta_rules: list[DeltaRule] = field(default_factory=list)
    main: Optional[Term] = None

    @property
    def rules(self) -> DeltaRules:
        return tuple(self.delta_rules)

    def env(self) -> dict[str, Formula]:
        return dict(self.consts)


class _Parser:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.pos = 0

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text or tok.kind!r}",
                             tok.line, tok.col)
        return self.next()

    # -- formulas

    def formula(self) -> Formula:
        left = self.conj()
        if self.peek().kind == "->":
            self.next()
            return Impl(left, self.formula())
        return left

    def conj(self) -> Formula:
        left = self.funit()
        if self.peek().kind == "/\\":
            self.next()
            return And(left, self.conj())
        return left

    def funit(self) -> Formula:
        tok = self.peek()
        if tok.kind == "~":
            self.next()
            return neg(self.funit())
        if tok.kind == "bot":
            self.next()
            return BOT
        if tok.kind == "top":
            self.next()
            return TOP
        if tok.kind == "IDENT":
            self.next()
            return Atom(tok.text)
        if tok.kind == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        raise ParseError(f"expected a formula, found {tok.text or tok.kind!r}",
                         tok.line, tok.col)

    # -- terms

    def term(self) -> Surface:
        left = self.lam()
        tok = self.peek()
        if tok.kind == "||[":
            self.next()
            chan = self.expect("IDENT").text
            self.expect(":")
            kl = self.formula()
            self.expect("~")
            kr = self.formula()
            self.expect("]")
            right = self.term()
            return SPar(tok.line, tok.col, chan, kl, kr, left, right)
        return left

    def lam(self) -> Surface:
        tok = self.peek()
        if tok.kind == "\\":
            self.next()
            name = self.expect("IDENT").text
            self.expect(":")
            f = self.formula()
            self.expect(".")
            body = self.term()
            return SLam(tok.line, tok.col, name, f, body)
        if tok.kind == "if":
            self.next()
            cond = self.lam()
            self.expect("then")
            then = self.lam()
            self.expect("else")
            els = self.lam()
            return SIte(tok.line, tok.col, cond, then, els)
        return self.app()

    def app(self) -> Surface:
        head = self.prefix()
        while self.peek().kind in ("IDENT", "INT", "STRING", "(", "<",
                                   "true", "false", "efq"):
            arg = self.prefix()
            head = SApp(head.line, head.col, head, arg)
        return head

    def prefix(self) -> Surface:
        tok = self.peek()
        if tok.kind == "efq":
            self.next()
            self.expect("[")
            f = self.formula()
            self.expect("]")
            target = self.prefix()
            return SEfq(tok.line, tok.col, f, target)
        return self.postfix()

    def postfix(self) -> Surface:
        t = self.atom()
        while self.peek().kind == ".":
            dot = self.next()
            idx = self.expect("INT")
            if idx.text not in ("0", "1"):
                raise ParseError("projection index must be 0 or 1", idx.line, idx.col)
            t = SProj(dot.line, dot.col, t, int(idx.text))
        return t

    def atom(self) -> Surface:
        tok = self.peek()
        if tok.kind == "IDENT":
            self.next()
            return SVar(tok.line, tok.col, tok.text)
        if tok.kind == "INT":
            self.next()
            return SLit(tok.line, tok.col, tok.text, NAT)
        if tok.kind == "STRING":
            self.next()
            return SLit(tok.line, tok.col, f'"{tok.text}"', STRING)
        if tok.kind in ("true", "false"):
            self.next()
            return SBool(tok.line, tok.col, tok.kind == "true")
        if tok.kind == "(":
            self.next()
            t = self.term()
            self.expect(")")
            return t
        if tok.kind == "<":
            self.next()
            fst = self.term()
            self.expect(",")
            snd = self.term()
            self.expect(">")
            return SPair(tok.line, tok.col, fst, snd)
        raise ParseError(f"expected a term, found {tok.text or tok.kind!r}",
                         tok.line, tok.col)

    # -- statements

    def litatom(self) -> Surface:
        tok = self.peek()
        if tok.kind in ("INT", "STRING", "true", "false", "IDENT"):
            return self.atom()
        raise ParseError("rule arguments must be literals or constants",
                         tok.line, tok.col)


def _check_atoms_declared(f: Formula, declared: Optional[set[str]], line: int, col: int):
    if declared is None:
        return
    if isinstance(f, Atom):
        if f.name not in declared and f.name not in BUILTIN_ATOMS:
            raise ParseError(f"undeclared atom {f.name}", line, col)
    elif isinstance(f, Impl):
        _check_atoms_declared(f.antecedent, declared, line, col)
        _check_atoms_declared(f.consequent, declared, line, col)
    elif isinstance(f, And):
        _check_atoms_declared(f.left, declared, line, col)
        _check_atoms_declared(f.right, declared, line, col)


def _resolve(s: Surface, bound: dict[str, Formula], consts: dict[str, Formula],
             atoms: Optional[set[str]]) -> Term:
    if isinstance(s, SVar):
        f = bound.get(s.name)
        if f is None:
            f = consts.get(s.name)
        if f is None:
            raise ParseError(f"undeclared identifier {s.name}", s.line, s.col)
        return Var(s.name, f)
    if isinstance(s, SLit):
        consts.setdefault(s.text, s.type)
        return Var(s.text, s.type)
    if isinstance(s, SBool):
        return BoolLit(s.value)
    if isinstance(s, SLam):
        _check_atoms_declared(s.var_type, atoms, s.line, s.col)
        inner = dict(bound)
        inner[s.var] = s.var_type
        return Lam(s.var, s.var_type, _resolve(s.body, inner, consts, atoms))
    if isinstance(s, SApp):
        return App(_resolve(s.fn, bound, consts, atoms),
                   _resolve(s.arg, bound, consts, atoms))
    if isinstance(s, SPair):
        return Pair(_resolve(s.fst, bound, consts, atoms),
                    _resolve(s.snd, bound, consts, atoms))
    if isinstance(s, SProj):
        return Proj(_resolve(s.target, bound, consts, atoms), s.index)
    if isinstance(s, SEfq):
        _check_atoms_declared(s.atom_type, atoms, s.line, s.col)
        return Efq(s.atom_type, _resolve(s.target, bound, consts, atoms))
    if isinstance(s, SIte):
        return Ite(_resolve(s.cond, bound, consts, atoms),
                   _resolve(s.then_branch, bound, consts, atoms),
                   _resolve(s.else_branch, bound, consts, atoms))
    if isinstance(s, SPar):
        _check_atoms_declared(s.kind_left, atoms, s.line, s.col)
        _check_atoms_declared(s.kind_right, atoms, s.line, s.col)
        left_env = dict(bound)
        left_env[s.channel] = Impl(s.kind_left, s.kind_right)
        right_env = dict(bound)
        right_env[s.channel] = Impl(s.kind_right, s.kind_left)
        return Par(s.channel, s.kind_left, s.kind_right,
                   _resolve(s.left, left_env, consts, atoms),
                   _resolve(s.right, right_env, consts, atoms))
    raise AssertionError(f"unhandled surface node {s!r}")


def parse_program(src: str) -> Program:
    toks = tokenize(src)
    p = _Parser(toks)
    prog = Program()
    declared_atoms: set[str] = set()
    main_surface: Optional[Surface] = None
    rule_keys: set[tuple] = set()
    while p.peek().kind != "EOF":
        tok = p.peek()
        if tok.kind == "atom":
            p.next()
            name = p.expect("IDENT").text
            p.expect(";")
            declared_atoms.add(name)
            prog.atoms.append(name)
        elif tok.kind == "const":
            p.next()
            name = p.expect("IDENT").text
            p.expect(":")
            f = p.formula()
            _check_atoms_declared(f, declared_atoms, tok.line, tok.col)
            p.expect(";")
            prog.consts[name] = f
        elif tok.kind == "rule":
            p.next()
            name_tok = p.expect("IDENT")
            args: list[Surface] = []
            while p.peek().kind != "=>":
                args.append(p.litatom())
            p.expect("=>")
            rhs = p.term()
            p.expect(";")
            if name_tok.text not in prog.consts:
                raise ParseError(f"rule for undeclared constant {name_tok.text}",
                                 name_tok.line, name_tok.col)
            rargs = tuple(_resolve(a, {}, prog.consts, declared_atoms) for a in args)
            rrhs = _resolve(rhs, {}, prog.consts, declared_atoms)
            key = (name_tok.text, rargs)
            if key in rule_keys:
                raise ParseError(f"duplicate rule for {name_tok.text}",
                                 name_tok.line, name_tok.col)
            rule_keys.add(key)
            prog.delta_rules.append(DeltaRule(name_tok.text, rargs, rrhs))
        elif tok.kind == "main":
            if main_surface is not None:
                raise ParseError("duplicate main", tok.line, tok.col)
            p.next()
            p.expect("=")
            main_surface = p.term()
            p.expect(";")
        else:
            raise ParseError(f"expected a declaration, found {tok.text or tok.kind!r}",
                             tok.line, tok.col)
    if main_surface is None:
        raise ParseError("program has no main term", p.peek().line, p.peek().col)
    prog.main = _resolve(main_surface, {}, prog.consts, declared_atoms)
    return prog


def parse_term(src: str, env: Optional[dict[str, Formula]] = None) -> Term:
    """Parse a bare term; free identifiers resolve against ``env``."""
    toks = tokenize(src)
    p = _Parser(toks)
    s = p.term()
    p.expect("EOF")
    return _resolve(s, {}, dict(env or {}), None)


def parse_formula(src: str) -> Formula:
    toks = tokenize(src)
    p = _Parser(toks)
    f = p.formula()
    p.expect("EOF")
    return f


# ---------------------------------------------------------------------------
# Pretty-printing

_F_IMPL, _F_CONJ, _F_UNIT = 0, 1, 2


def pretty_formula(f: Formula, prec: int = _F_IMPL) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Bot):
        return "bot"
    if isinstance(f, Impl):
        s = f"{pretty_formula(f.antecedent, _F_CONJ)} -> {pretty_formula(f.consequent, _F_IMPL)}"
        return f"({s})" if prec > _F_IMPL else s
    s = f"{pretty_formula(f.left, _F_UNIT)} /\\ {pretty_formula(f.right, _F_CONJ)}"
    return f"({s})" if prec > _F_CONJ else s


_T_PAR, _T_LAM, _T_APP, _T_PREFIX, _T_POST = 0, 1, 2, 3, 4


def _printable_names(t: Term) -> Term:
    """Alpha-rename binders whose names the grammar cannot spell.

    Fresh channels are minted as base#N; a printed term must re-parse,
    so such binders become base_N (avoiding every name in sight).
    """
    if not any("#" in n for n in binder_names(t)):
        return t
    used = set(free_vars(t)) | set(binder_names(t))

    def rename(s: Term) -> Term:
        from .terms import children, rebuild
        if isinstance(s, (Lam, Par)):
            name = s.var if isinstance(s, Lam) else s.channel
            if "#" in name:
                base = name.split("#", 1)[0] or "x"
                k = 1
                while f"{base}_{k}" in used:
                    k += 1
                fresh = f"{base}_{k}"
                used.add(fresh)
                s = rename_binder(s, fresh)
        return rebuild(s, tuple(rename(c) for c in children(s)))

    return rename(t)


def pretty(t: Term, prec: int = _T_PAR, _sanitize: bool = True) -> str:
    if _sanitize:
        t = _printable_names(t)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, BoolLit):
        return "true" if t.value else "false"
    if isinstance(t, Par):
        # the left operand must not swallow the ||: lambdas and ifs there
        # need parentheses, so print it one level tighter
        s = (f"{pretty(t.left, _T_APP, False)} ||[{t.channel} : "
             f"{pretty_formula(t.kind_left)} ~ {pretty_formula(t.kind_right)}] "
             f"{pretty(t.right, _T_PAR, False)}")
        return f"({s})" if prec > _T_PAR else s
    if isinstance(t, Lam):
        s = f"\\{t.var}:{pretty_formula(t.var_type)}. {pretty(t.body, _T_PAR, False)}"
        return f"({s})" if prec > _T_LAM else s
    if isinstance(t, Ite):
        s = (f"if {pretty(t.cond, _T_LAM, False)} then {pretty(t.then_branch, _T_LAM, False)} "
             f"else {pretty(t.else_branch, _T_LAM, False)}")
        return f"({s})" if prec > _T_LAM else s
    if isinstance(t, App):
        s = f"{pretty(t.fn, _T_APP, False)} {pretty(t.arg, _T_PREFIX, False)}"
        return f"({s})" if prec > _T_APP else s
    if isinstance(t, Efq):
        s = f"efq[{pretty_formula(t.atom_type)}] {pretty(t.target, _T_PREFIX, False)}"
        return f"({s})" if prec > _T_PREFIX else s
    if isinstance(t, Proj):
        return f"{pretty(t.target, _T_POST, False)}.{t.index}"
    if isinstance(t, Pair):
        return f"<{pretty(t.fst, _T_PAR, False)}, {pretty(t.snd, _T_PAR, False)}>"
    raise TypeError(f"cannot print {t!r}")


def pretty_program(prog: Program) -> str:
    lines = []
    for a in prog.atoms:
        lines.append(f"atom {a};")
    for name, f in prog.consts.items():
        if name[0] in IDENT_START:
            lines.append(f"const {name} : {pretty_formula(f)};")
    for rule in prog.delta_rules:
        args = " ".join(pretty(a, _T_POST) for a in rule.args)
        lines.append(f"rule {rule.const} {args} => {pretty(rule.rhs)};")
    if prog.main is not None:
        lines.append(f"main = {pretty(prog.main)};")
    return "\n".join(lines) + "\n"
