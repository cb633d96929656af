"""A small expression language for phi(t, s).

Grammar (whitespace is insignificant)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ['^' unary]
    atom   := number | 't' | 's' | func '(' expr ')' | '(' expr ')'
    func   := 'exp' | 'log' | 'sqrt'

``^`` is right associative and binds tighter than unary minus, so ``-s^2`` is
``-(s^2)`` and ``2^-1`` is ``2^(-1)``. Numbers are decimal literals with an
optional exponent; literals without a fraction or exponent are integers, and an
integer (or negated integer) exponent is evaluated by repeated multiplication.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from . import jets
from .errors import ParseError
from .jets import Jet2

__all__ = [
    "Num", "Var", "Unary", "Binary", "Expr",
    "parse_metric", "to_text", "evaluate", "integer_exponent",
]


@dataclass(frozen=True)
class Num:
    value: float
    is_int: bool = False


@dataclass(frozen=True)
class Var:
    name: str  # 't' or 's'


@dataclass(frozen=True)
class Unary:
    op: str  # neg | exp | log | sqrt
    arg: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # add | sub | mul | div | pow
    left: "Expr"
    right: "Expr"


Expr = Union[Num, Var, Unary, Binary]

_FUNCS = ("exp", "log", "sqrt")
_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # number | name | op | end
    text: str
    offset: int  # byte offset


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    i = 0
    byte = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", byte,
                             {"number", "t", "s", "(", "-", "exp", "log", "sqrt"})
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), byte))
        byte += len(m.group().encode("utf-8"))
        i = m.end()
    toks.append(_Tok("end", "", byte))
    return toks


_ATOM_START = frozenset({"number", "t", "s", "(", "-", "exp", "log", "sqrt"})


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.pos = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.pos]

    def _take(self):
        tok = self.cur
        self.pos += 1
        return tok

    def _is(self, *ops) -> bool:
        return self.cur.kind == "op" and self.cur.text in ops

    def _expect(self, op):
        if not self._is(op):
            self._fail({op})
        return self._take()

    def _fail(self, expected):
        tok = self.cur
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"unexpected {what}", tok.offset, expected)

    def parse(self) -> Expr:
        node = self.expr()
        if self.cur.kind != "end":
            self._fail({"+", "-", "*", "/", "^", "end of input"})
        return node

    def expr(self):
        node = self.term()
        while self._is("+", "-"):
            op = "add" if self._take().text == "+" else "sub"
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self._is("*", "/"):
            op = "mul" if self._take().text == "*" else "div"
            node = Binary(op, node, self.unary())
        return node

    def unary(self):
        if self._is("-"):
            self._take()
            return Unary("neg", self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self._is("^"):
            self._take()
            return Binary("pow", base, self.unary())
        return base

    def atom(self):
        tok = self.cur
        if tok.kind == "number":
            self._take()
            value = float(tok.text)
            if not math.isfinite(value):
                raise ParseError(f"numeric literal {tok.text!r} overflows", tok.offset)
            is_int = not any(c in tok.text for c in ".eE")
            return Num(value, is_int)
        if tok.kind == "name":
            if tok.text in ("t", "s"):
                self._take()
                return Var(tok.text)
            if tok.text in _FUNCS:
                self._take()
                self._expect("(")
                arg = self.expr()
                self._expect(")")
                return Unary(tok.text, arg)
            raise ParseError(f"unknown identifier {tok.text!r}", tok.offset, _ATOM_START)
        if self._is("("):
            self._take()
            node = self.expr()
            self._expect(")")
            return node
        self._fail(_ATOM_START)


def parse_metric(text: str) -> Expr:
    """Parse a phi(t, s) expression into an AST.

    >>> parse_metric("(1+s)^2")
    Binary(op='pow', left=Binary(op='add', left=Num(value=1.0, is_int=True), right=Var(name='s')), right=Num(value=2.0, is_int=True))
    """
    return _Parser(text).parse()


# -- printing ---------------------------------------------------------------
_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}
_SYM = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}
_ATOM_PREC = 5


def _prec(node) -> int:
    if isinstance(node, Binary):
        return _PREC[node.op]
    if isinstance(node, Unary) and node.op == "neg":
        return _PREC["neg"]
    return _ATOM_PREC


def _num_text(value: float, is_int: bool) -> str:
    if is_int:
        return str(int(value))
    text = repr(float(value))
    if not any(c in text for c in ".eE"):
        text += ".0"
    return text


def to_text(node: Expr) -> str:
    """Render an AST with the fewest parentheses that still parse back to it."""
    if isinstance(node, Num):
        return _num_text(node.value, node.is_int)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        if node.op == "neg":
            inner = to_text(node.arg)
            if _prec(node.arg) < _PREC["neg"]:
                inner = f"({inner})"
            return f"-{inner}"
        return f"{node.op}({to_text(node.arg)})"
    p = _PREC[node.op]
    left, right = to_text(node.left), to_text(node.right)
    if node.op == "pow":
        if _prec(node.left) <= p:
            left = f"({left})"
        if _prec(node.right) < _PREC["neg"]:
            right = f"({right})"
        return f"{left}^{right}"
    if _prec(node.left) < p:
        left = f"({left})"
    if _prec(node.right) <= p:
        right = f"({right})"
    return f"{left} {_SYM[node.op]} {right}"


# -- evaluation -------------------------------------------------------------
def integer_exponent(node: Expr):
    """Return the exponent as an int if ``node`` is a (possibly negated) integer literal."""
    sign = 1
    while isinstance(node, Unary) and node.op == "neg":
        sign = -sign
        node = node.arg
    if isinstance(node, Num) and node.is_int:
        return sign * int(node.value)
    return None


def _constant_value(node: Expr):
    """Fold a subtree that contains no variables to a float, or return None."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return None
    if isinstance(node, Unary):
        a = _constant_value(node.arg)
        if a is None:
            return None
        if node.op == "neg":
            return -a
        return None  # exp/log/sqrt of constants still go through jets for the domain checks
    return None


def evaluate(node: Expr, t: Jet2, s: Jet2) -> Jet2:
    """Evaluate the AST over jets seeded at the same point."""
    if isinstance(node, Num):
        return jets.jet_const(node.value, like=t.value)
    if isinstance(node, Var):
        return t if node.name == "t" else s
    if isinstance(node, Unary):
        return jets.jet_arith(node.op, evaluate(node.arg, t, s))
    left = evaluate(node.left, t, s)
    if node.op == "pow":
        k = integer_exponent(node.right)
        if k is not None:
            return jets.power(left, k)
        c = _constant_value(node.right)
        if c is not None:
            return jets.power(left, float(c))
        return jets.power(left, evaluate(node.right, t, s))
    return jets.jet_arith(node.op, left, evaluate(node.right, t, s))
