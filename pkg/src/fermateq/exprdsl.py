"""Parser and evaluator for a small closed-form complex-function language.

This is the language used for inner entire functions and for constant
flags on the command line.  Grammar, loosest binding first:

    expr   := term (('+' | '-') term)*            left associative
    term   := unary (('*' | '/') unary)*          left associative
    unary  := '-' unary | power
    power  := atom ('^' unary)?                   right associative
    atom   := NUMBER | NUMBER 'i' | 'i' | 'pi' | 'e' | 'z'
            | ('exp' | 'log' | 'sin' | 'cos' | 'sqrt') '(' expr ')'
            | '(' expr ')'

NUMBER is a decimal literal with optional fractional part and exponent; an
immediately following 'i' makes it pure imaginary.  The exponent operator
'^' requires a constant right operand (no 'z').  log and sqrt use the
principal branch, so Im(log(..)) lies in (-pi, pi].  Non-finite
intermediates propagate as NaN values instead of raising.  Error positions
are 1-based character offsets into the source text.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import FermateqError, ParameterError

_NAN = complex(float("nan"), float("nan"))

_FUNCTIONS = {
    "exp": cmath.exp,
    "log": cmath.log,
    "sin": cmath.sin,
    "cos": cmath.cos,
    "sqrt": cmath.sqrt,
}

_CONSTANTS = {
    "pi": complex(math.pi, 0.0),
    "e": complex(math.e, 0.0),
    "i": complex(0.0, 1.0),
}


class ExprError(FermateqError):
    """Parse failure or invalid expression; position is a 1-based offset."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} at offset {position}"
        super().__init__(message)
        self.position = position


class Expr:
    """Base class of expression nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Lit(Expr):
    value: complex


@dataclass(frozen=True)
class Var(Expr):
    """The single free variable z."""


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    func: str
    arg: Expr


@dataclass(frozen=True)
class _Token:
    kind: str  # num, imag, ident, op, lparen, rparen, eof
    text: str
    pos: int  # 1-based offset of the first character


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch.isspace():
            i += 1
            continue
        pos = i + 1
        if ch in "+-*/^":
            tokens.append(_Token("op", ch, pos))
            i += 1
        elif ch == "(":
            tokens.append(_Token("lparen", ch, pos))
            i += 1
        elif ch == ")":
            tokens.append(_Token("rparen", ch, pos))
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == ".":
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    j = k
                    while j < n and source[j].isdigit():
                        j += 1
            text = source[i:j]
            try:
                float(text)
            except ValueError:
                raise ExprError(f"malformed number {text!r}", pos)
            kind = "num"
            if j < n and source[j] == "i" and not (j + 1 < n and _is_word(source[j + 1])):
                kind = "imag"
                j += 1
            tokens.append(_Token(kind, text, pos))
            i = j
        elif _is_word_start(ch):
            j = i
            while j < n and _is_word(source[j]):
                j += 1
            tokens.append(_Token("ident", source[i:j], pos))
            i = j
        else:
            raise ExprError(f"unexpected character {ch!r}", pos)
    tokens.append(_Token("eof", "", n + 1))
    return tokens


def _is_word_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_word(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.idx = 0

    def peek(self) -> _Token:
        return self.tokens[self.idx]

    def advance(self) -> _Token:
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ExprError(f"expected {what}", tok.pos)
        return self.advance()

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.parse_term())
        return node

    def parse_term(self) -> Expr:
        node = self.parse_unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.parse_unary())
        return node

    def parse_unary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return Neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            exponent = self.parse_unary()
            if contains_var(exponent):
                raise ExprError("exponent of '^' must be constant", tok.pos)
            return BinOp("^", base, exponent)
        return base

    def parse_atom(self) -> Expr:
        tok = self.advance()
        if tok.kind == "num":
            return Lit(complex(float(tok.text), 0.0))
        if tok.kind == "imag":
            return Lit(complex(0.0, float(tok.text)))
        if tok.kind == "lparen":
            node = self.parse_expr()
            self.expect("rparen", "')'")
            return node
        if tok.kind == "ident":
            name = tok.text
            if name == "z":
                return Var()
            if name in _CONSTANTS:
                return Lit(_CONSTANTS[name])
            if name in _FUNCTIONS:
                self.expect("lparen", f"'(' after {name}")
                node = self.parse_expr()
                self.expect("rparen", "')'")
                return Call(name, node)
            raise ExprError(f"unknown identifier {name!r}", tok.pos)
        if tok.kind == "eof":
            raise ExprError("unexpected end of input", tok.pos)
        raise ExprError(f"unexpected token {tok.text!r}", tok.pos)


def parse(text: str) -> Expr:
    """Parse source text into an expression tree."""
    parser = _Parser(_tokenize(text))
    node = parser.parse_expr()
    tail = parser.peek()
    if tail.kind != "eof":
        raise ExprError(f"unexpected token {tail.text!r}", tail.pos)
    return node


def contains_var(expr: Expr) -> bool:
    """Whether the expression references the variable z."""
    if isinstance(expr, Var):
        return True
    if isinstance(expr, Neg):
        return contains_var(expr.operand)
    if isinstance(expr, BinOp):
        return contains_var(expr.left) or contains_var(expr.right)
    if isinstance(expr, Call):
        return contains_var(expr.arg)
    return False


def evaluate(expr: Expr, z: complex) -> complex:
    """Evaluate the expression at z with standard complex semantics.

    Overflow, division by zero, and other non-finite intermediates yield
    NaN components that propagate to the result; no exception escapes.
    """
    if isinstance(expr, Lit):
        return expr.value
    if isinstance(expr, Var):
        return complex(z)
    if isinstance(expr, Neg):
        return -evaluate(expr.operand, z)
    if isinstance(expr, BinOp):
        left = evaluate(expr.left, z)
        right = evaluate(expr.right, z)
        try:
            if expr.op == "+":
                return left + right
            if expr.op == "-":
                return left - right
            if expr.op == "*":
                return left * right
            if expr.op == "/":
                return left / right
            return left ** right
        except (OverflowError, ZeroDivisionError, ValueError):
            return _NAN
    if isinstance(expr, Call):
        arg = evaluate(expr.arg, z)
        try:
            return _FUNCTIONS[expr.func](arg)
        except (OverflowError, ZeroDivisionError, ValueError):
            return _NAN
    raise ExprError(f"unknown expression node {expr!r}")


_PREC_ATOM = 5
_PREC_POW = 4
_PREC_NEG = 3
_PREC_MUL = 2
_PREC_ADD = 1


def _prec(expr: Expr) -> int:
    if isinstance(expr, BinOp):
        if expr.op == "^":
            return _PREC_POW
        if expr.op in "*/":
            return _PREC_MUL
        return _PREC_ADD
    if isinstance(expr, Neg):
        return _PREC_NEG
    return _PREC_ATOM


def _fmt_float(x: float) -> str:
    if x == 0.0:
        return "0.0"
    return repr(x)


def _wrap(expr: Expr, min_prec: int) -> str:
    src = to_source(expr)
    if _prec(expr) < min_prec:
        return f"({src})"
    return src


def to_source(expr: Expr) -> str:
    """Render an expression so that parse(to_source(e)) rebuilds e.

    Literals print structurally when their value is real or pure imaginary
    with a non-negative component (the canonical form produced by const and
    by the parser itself); other literals fall back to a parenthesized sum,
    which re-parses to an equal value but a different tree shape.
    """
    if isinstance(expr, Lit):
        v = expr.value
        if v.imag == 0.0:
            return _fmt_float(v.real)
        if v.real == 0.0:
            return _fmt_float(v.imag) + "i"
        op = "+" if v.imag > 0 else "-"
        return f"({_fmt_float(v.real)} {op} {_fmt_float(abs(v.imag))}i)"
    if isinstance(expr, Var):
        return "z"
    if isinstance(expr, Neg):
        return "-" + _wrap(expr.operand, _PREC_NEG)
    if isinstance(expr, BinOp):
        if expr.op == "^":
            return f"{_wrap(expr.left, _PREC_ATOM)}^{_wrap(expr.right, _PREC_NEG)}"
        mine = _PREC_MUL if expr.op in "*/" else _PREC_ADD
        left = _wrap(expr.left, mine)
        right = _wrap(expr.right, mine + 1)
        return f"{left} {expr.op} {right}"
    if isinstance(expr, Call):
        return f"{expr.func}({to_source(expr.arg)})"
    raise ExprError(f"unknown expression node {expr!r}")


def const(value: complex) -> Expr:
    """Expression for a complex constant, in printable canonical form."""
    value = complex(value)
    re, im = value.real, value.imag
    if im == 0.0:
        if re < 0.0:
            return Neg(Lit(complex(-re, 0.0)))
        return Lit(complex(re + 0.0, 0.0))
    if re == 0.0:
        if im < 0.0:
            return Neg(Lit(complex(0.0, -im)))
        return Lit(complex(0.0, im))
    re_node = const(complex(re, 0.0))
    if im > 0.0:
        return BinOp("+", re_node, Lit(complex(0.0, im)))
    return BinOp("-", re_node, Lit(complex(0.0, -im)))


@dataclass(frozen=True)
class AffineMap:
    """The map z -> q*z + c with q != 0."""

    q: complex
    c: complex

    def __post_init__(self):
        if self.q == 0:
            raise ParameterError("affine map requires q != 0")
        for part in (self.q, self.c):
            if not (math.isfinite(part.real) and math.isfinite(part.imag)):
                raise ParameterError("affine map coefficients must be finite")

    def __call__(self, z: complex) -> complex:
        return self.q * z + self.c

    @staticmethod
    def identity() -> "AffineMap":
        return AffineMap(complex(1.0, 0.0), complex(0.0, 0.0))

    @staticmethod
    def shift(c: complex) -> "AffineMap":
        return AffineMap(complex(1.0, 0.0), complex(c))
