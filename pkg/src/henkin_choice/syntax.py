"""Concrete syntax for formulas.

Grammar (lowest to highest precedence)::

    formula := quant | iff
    quant   := ("forall" | "exists" | "exists1") ivar+ "." formula
             | ("forallP" | "existsP") PRED ":" ARITY "." formula
    iff     := imp ("<->" imp)*
    imp     := or ("->" imp)?
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := "!" unary | quant | primary
    primary := "(" formula ")" | PRED "(" ivar ("," ivar)* ")"
             | ivar "=" ivar | "(" ivar ("," ivar)+ ")" "=" "(" ... ")"

A quantifier body extends as far to the right as possible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Optional

from .formula import (
    And,
    ArityError,
    Atom,
    EqTuple,
    ExistsExactlyOne,
    ExistsIndiv,
    ExistsPred,
    ForallIndiv,
    ForallPred,
    Formula,
    FormulaError,
    Iff,
    Implies,
    IndivVar,
    Not,
    Or,
    PredVar,
)


class ParseError(FormulaError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{msg} at line {line}, column {col}")
        self.line = line
        self.col = col


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<op><->|->|[!&|().,:=])
  | (?P<kw>forallP|existsP|forall|exists1|exists)(?![A-Za-z0-9_])
  | (?P<ivar>[a-z][a-z0-9_]*)
  | (?P<pred>[A-Z][A-Za-z0-9_]*)
  | (?P<num>[0-9]+)
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            toks.append(_Tok(kind, chunk, line, pos - line_start + 1))
        for i, ch in enumerate(chunk):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str, sorts: Mapping[str, int]):
        self.toks = _tokenize(text)
        self.i = 0
        self.free_sorts: dict[str, int] = dict(sorts)
        self.scopes: list[tuple[str, int]] = []

    def peek(self, k: int = 0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Optional[_Tok] = None):
        tok = tok or self.peek()
        return ParseError(msg, tok.line, tok.col)

    def expect(self, text: str) -> _Tok:
        t = self.next()
        if t.text != text:
            raise self.error(f"expected {text!r}, found {t.text or 'end of input'!r}", t)
        return t

    def ivar(self) -> IndivVar:
        t = self.next()
        if t.kind != "ivar":
            raise self.error(f"expected individual variable, found {t.text or 'end of input'!r}", t)
        return IndivVar(t.text)

    def parse(self) -> Formula:
        f = self.formula()
        if self.peek().kind != "eof":
            raise self.error(f"unexpected {self.peek().text!r}")
        return f

    def formula(self) -> Formula:
        if self.peek().kind == "kw":
            return self.quant()
        return self.iff()

    def quant(self) -> Formula:
        kw = self.next().text
        if kw in ("forallP", "existsP"):
            t = self.next()
            if t.kind != "pred":
                raise self.error("expected predicate name", t)
            self.expect(":")
            n = self.next()
            if n.kind != "num" or int(n.text) < 1:
                raise self.error("expected positive arity", n)
            pv = PredVar(t.text, int(n.text))
            self.expect(".")
            self.scopes.append((pv.name, pv.arity))
            body = self.formula()
            self.scopes.pop()
            return (ForallPred if kw == "forallP" else ExistsPred)(pv, body)
        vs = [self.ivar()]
        while self.peek().kind == "ivar":
            vs.append(self.ivar())
        self.expect(".")
        body = self.formula()
        cls = {"forall": ForallIndiv, "exists": ExistsIndiv, "exists1": ExistsExactlyOne}[kw]
        try:
            return cls(tuple(vs), body)
        except FormulaError as e:
            raise self.error(str(e)) from None

    def iff(self) -> Formula:
        f = self.imp()
        while self.peek().text == "<->":
            self.next()
            f = Iff(f, self.imp())
        return f

    def imp(self) -> Formula:
        f = self.or_()
        if self.peek().text == "->":
            self.next()
            return Implies(f, self.imp_rhs())
        return f

    def imp_rhs(self) -> Formula:
        if self.peek().kind == "kw":
            return self.quant()
        return self.imp()

    def or_(self) -> Formula:
        f = self.and_()
        while self.peek().text == "|":
            self.next()
            f = Or(f, self.and_())
        return f

    def and_(self) -> Formula:
        f = self.unary()
        while self.peek().text == "&":
            self.next()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        t = self.peek()
        if t.text == "!":
            self.next()
            return Not(self.unary())
        if t.kind == "kw":
            return self.quant()
        return self.primary()

    def primary(self) -> Formula:
        t = self.peek()
        if t.text == "(":
            if self.peek(1).kind == "ivar" and self.peek(2).text == ",":
                left = self.tuple_()
                self.expect("=")
                right = self.tuple_()
                if len(left) != len(right):
                    raise self.error("tuple sides differ in length", t)
                return EqTuple(left, right)
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        if t.kind == "pred":
            self.next()
            self.expect("(")
            args = [self.ivar()]
            while self.peek().text == ",":
                self.next()
                args.append(self.ivar())
            self.expect(")")
            return Atom(self.resolve(t, len(args)), tuple(args))
        if t.kind == "ivar":
            left = self.ivar()
            self.expect("=")
            return EqTuple((left,), (self.ivar(),))
        raise self.error(f"unexpected {t.text or 'end of input'!r}")

    def tuple_(self) -> tuple[IndivVar, ...]:
        self.expect("(")
        vs = [self.ivar()]
        while self.peek().text == ",":
            self.next()
            vs.append(self.ivar())
        self.expect(")")
        return tuple(vs)

    def resolve(self, tok: _Tok, nargs: int) -> PredVar:
        for name, ar in reversed(self.scopes):
            if name == tok.text:
                if ar != nargs:
                    raise ParseError(f"{name} is bound with arity {ar} but used with {nargs} arguments",
                                     tok.line, tok.col)
                return PredVar(name, ar)
        known = self.free_sorts.setdefault(tok.text, nargs)
        if known != nargs:
            raise ParseError(f"{tok.text} has sort {known} but is used with {nargs} arguments",
                             tok.line, tok.col)
        return PredVar(tok.text, nargs)


def parse(text: str, sorts: Optional[Mapping[str, int]] = None) -> Formula:
    """Parse ``text``; ``sorts`` optionally declares arities of free predicates."""
    try:
        return _Parser(text, sorts or {}).parse()
    except ArityError as e:  # pragma: no cover - resolve() catches these first
        raise ParseError(str(e), 0, 0) from None


# -- rendering ----------------------------------------------------------------

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_SYM = {Iff: "<->", Implies: "->", Or: "|", And: "&"}
_QWORD = {ForallIndiv: "forall", ExistsIndiv: "exists", ExistsExactlyOne: "exists1",
          ForallPred: "forallP", ExistsPred: "existsP"}


def render(f: Formula) -> str:
    """Deterministic text whose parse is structurally equal to ``f``."""
    return _render(f, 0, True)


def _quant_head(f: Formula) -> str:
    if isinstance(f, (ForallPred, ExistsPred)):
        return f"{_QWORD[type(f)]} {f.pred.name}:{f.pred.arity}."
    return f"{_QWORD[type(f)]} {' '.join(v.name for v in f.vars)}."


def _render(f: Formula, ctx: int, tail: bool) -> str:
    # ctx: precedence of the enclosing operator; tail: nothing follows this text
    if isinstance(f, Atom):
        return f"{f.pred.name}({','.join(v.name for v in f.args)})"
    if isinstance(f, EqTuple):
        if len(f.left) == 1:
            return f"{f.left[0].name} = {f.right[0].name}"
        return f"({', '.join(v.name for v in f.left)}) = ({', '.join(v.name for v in f.right)})"
    if isinstance(f, Not):
        b = f.body
        if isinstance(b, (Atom, Not)):
            return "!" + _render(b, 5, tail)
        return "!(" + _render(b, 0, True) + ")"
    if type(f) in _QWORD:
        body = f.body
        if type(body) in _PREC:
            inner = "(" + _render(body, 0, True) + ")"
        else:
            inner = _render(body, 0, True)
        text = f"{_quant_head(f)} {inner}"
        return text if tail else f"({text})"
    p = _PREC[type(f)]
    if isinstance(f, Implies):
        # right-associative
        left = _render(f.left, p + 1, False)
        right = _render(f.right, p, tail)
    else:
        left = _render(f.left, p, False)
        right = _render(f.right, p + 1, tail)
    text = f"{left} {_SYM[type(f)]} {right}"
    if p < ctx:
        return "(" + (f"{_render(f.left, p + 1 if isinstance(f, Implies) else p, False)} "
                      f"{_SYM[type(f)]} {_render(f.right, p if isinstance(f, Implies) else p + 1, True)}") + ")"
    return text
