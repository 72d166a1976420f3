"""Expression trees for network components, built on sympy.

Text is parsed by a small recursive-descent parser (no ``eval``) into
sympy expressions.  sympy supplies canonical ordering, symbolic
derivatives, substitution and vectorised numpy evaluation.
"""

from __future__ import annotations

import re
from typing import Callable, Iterable

import numpy as np
import sympy as sp

from .ratfunc import ParseError

__all__ = [
    "ALPHA",
    "coord",
    "parse_expression",
    "register_function",
    "free_coords",
    "diff_expr",
    "compile_expr",
    "to_text",
]

ALPHA = sp.Symbol("alpha", real=True)
PARAMETERS = {"alpha": ALPHA}
CONSTANTS = {"pi": sp.pi}
FUNCTIONS: dict[str, Callable] = {"sin": sp.sin, "cos": sp.cos, "exp": sp.exp}


def register_function(name: str, func) -> None:
    """Make ``func`` (a sympy function class, e.g. ``sympy.tanh``) callable from text.

    User-defined classes should implement ``fdiff`` so derivatives exist.
    """
    if not re.fullmatch(r"[A-Za-z_]\w*", name):
        raise ValueError(f"invalid function name {name!r}")
    FUNCTIONS[name] = func


def coord(name: str) -> sp.Symbol:
    """The symbol standing for coordinate ``name``."""
    return sp.Symbol(name, real=True)


_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)|([A-Za-z_]\w*)|(\*\*|[-+*/^(),]))")


def _tokenize(text: str):
    pos, out = 0, []
    end = len(text.rstrip())
    while pos < end:
        m = _TOKEN.match(text, pos)
        if not m:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unknown token {text[bad:bad + 1]!r}", text, bad)
        kind = "num" if m.group(1) else "name" if m.group(2) else m.group(3)
        if kind == "**":
            kind = "^"
        out.append((kind, m.group(m.lastindex), m.start(m.lastindex)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, variables):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.variables = None if variables is None else set(variables)

    def peek(self):
        return self.toks[self.i][0]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1] or tok[0]!r}", self.text, tok[2])
        self.i += 1
        return tok

    def parse(self):
        e = self.expr()
        if self.peek() != "end":
            tok = self.toks[self.i]
            raise ParseError(f"unexpected {tok[1]!r}", self.text, tok[2])
        return e

    def expr(self):
        e = self.signed_term()
        while self.peek() in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def signed_term(self):
        # a leading sign covers the whole product: -a*b is -(a*b)
        if self.peek() in ("-", "+"):
            op = self.take()[0]
            t = self.signed_term()
            return -t if op == "-" else t
        return self.term()

    def term(self):
        e = self.unary()
        while self.peek() in ("*", "/"):
            op = self.take()[0]
            rhs = self.unary()
            e = e * rhs if op == "*" else e / rhs
        return e

    def unary(self):
        if self.peek() == "-":
            self.take()
            return -self.unary()
        if self.peek() == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.take()
            return base ** self.unary()
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return sp.Rational(val) if "." in val else sp.Integer(val)
        if kind == "(":
            e = self.expr()
            self.take(")")
            return e
        if kind == "name":
            if self.peek() == "(":
                if val not in FUNCTIONS:
                    raise ParseError(f"unknown function {val!r}", self.text, pos)
                self.take("(")
                arg = self.expr()
                self.take(")")
                return FUNCTIONS[val](arg)
            if val in CONSTANTS:
                return CONSTANTS[val]
            if val in PARAMETERS:
                return PARAMETERS[val]
            if val in FUNCTIONS:
                raise ParseError(f"function {val!r} needs an argument", self.text, pos)
            if self.variables is not None and val not in self.variables:
                raise ParseError(f"unknown variable {val!r}", self.text, pos)
            return coord(val)
        raise ParseError(f"unexpected {val or kind!r}", self.text, pos)


def parse_expression(text: str, variables: Iterable[str] | None = None) -> sp.Expr:
    """Parse a component expression such as ``1 - alpha*sin(pi*x1)*sin(pi*x4)``.

    Decimal literals are read exactly as rationals.  When ``variables`` is
    given, any other identifier is an error.
    """
    return _Parser(text, variables).parse()


def free_coords(e: sp.Expr) -> list[str]:
    """Names of the coordinates ``e`` reads, sorted."""
    return sorted(s.name for s in e.free_symbols if s not in PARAMETERS.values())


def diff_expr(e: sp.Expr, var: str) -> sp.Expr:
    """Exact partial derivative with respect to coordinate ``var``."""
    return sp.diff(e, coord(var))


def compile_expr(e: sp.Expr, args: list[str], alpha: float | None = None):
    """Vectorised numpy callable ``f(*arrays)`` for ``e`` with ``alpha`` fixed.

    The result always broadcasts to the shape of the inputs, even when
    ``e`` is constant.
    """
    if alpha is not None:
        e = e.subs(ALPHA, alpha)
    elif ALPHA in e.free_symbols:
        raise ValueError("expression depends on alpha; supply a value")
    f = sp.lambdify([coord(a) for a in args], e, "numpy")

    def call(*xs):
        out = np.asarray(f(*xs), dtype=float)
        if xs:
            out = np.broadcast_to(out, np.broadcast(*xs).shape)
        return out

    return call


def to_text(e: sp.Expr) -> str:
    """Text form accepted back by :func:`parse_expression`."""
    return sp.sstr(e)
