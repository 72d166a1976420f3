"""Exact arithmetic in C[lambda] and W[lambda] plus root multisets.

Coefficients are Gaussian rationals (``a + b i`` with ``a, b`` in Q), so
cancellation between numerator and denominator of a determinant is decided
by an exact polynomial gcd.  Floating point only enters when roots are
extracted.

The textual syntax accepted by :func:`parse` and produced by ``str()`` is::

    3   3/2   2+1i   l   lambda   + - * / ^ ( )

and round-trips exactly: ``parse(str(w)) == w``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

__all__ = [
    "GaussianRational",
    "Polynomial",
    "RationalFunction",
    "SpectrumMultiset",
    "ParseError",
    "LAMBDA",
    "ZERO",
    "ONE",
    "parse",
    "rf_add",
    "rf_mul",
    "rf_pi",
    "poly_roots",
    "multiset_diff",
    "multiset_union",
]

DEFAULT_TOL = 1e-9
DEFAULT_PAIRING_TOL = 1e-6


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite coefficient {x!r}")
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class GaussianRational:
    """Exact complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            re, im = re.re, re.im + _to_fraction(im)
        elif isinstance(re, complex):
            re, im = _to_fraction(re.real), _to_fraction(re.imag) + _to_fraction(im)
        elif isinstance(re, np.generic):
            return self.__init__(re.item(), im)
        self.re = _to_fraction(re)
        self.im = _to_fraction(im)

    @classmethod
    def coerce(cls, x) -> GaussianRational:
        return x if isinstance(x, GaussianRational) else cls(x)

    def __add__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        if not self.im and not o.im:
            return GaussianRational(self.re * o.re)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        if not o:
            raise ZeroDivisionError("division by zero Gaussian rational")
        if not o.im:
            return GaussianRational(self.re / o.re, self.im / o.re)
        d = o.re * o.re + o.im * o.im
        return GaussianRational((self.re * o.re + self.im * o.im) / d,
                                (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        return _format_coeff(self)


def _coerce_or_none(x) -> GaussianRational | None:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction, float, complex, np.generic)):
        return GaussianRational(x)
    return None


_G0 = GaussianRational(0)
_G1 = GaussianRational(1)


def _format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _format_imag(q: Fraction) -> str:
    # ``3i/4`` rather than ``3/4i``: the latter would parse as 3/(4i)
    s = f"{abs(q.numerator)}i"
    if q.denominator != 1:
        s += f"/{q.denominator}"
    return ("-" if q < 0 else "") + s


def _format_coeff(c: GaussianRational) -> str:
    if not c.im:
        return _format_rational(c.re)
    if not c.re:
        return _format_imag(c.im)
    im = _format_imag(c.im)
    sign = "" if im.startswith("-") else "+"
    return f"{_format_rational(c.re)}{sign}{im}"


class Polynomial:
    """Polynomial in lambda; ``coeffs[k]`` multiplies ``lambda**k``.

    The zero polynomial has an empty coefficient tuple, otherwise the
    leading coefficient is nonzero.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [GaussianRational.coerce(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def _raw(cls, coeffs: list) -> Polynomial:
        # coeffs already GaussianRational; only trims
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        p = object.__new__(cls)
        p.coeffs = tuple(coeffs)
        return p

    @classmethod
    def constant(cls, c) -> Polynomial:
        return cls((c,))

    @classmethod
    def monomial(cls, k: int, c=1) -> Polynomial:
        return cls([0] * k + [c])

    @classmethod
    def from_roots(cls, roots) -> Polynomial:
        p = cls.constant(1)
        for r in roots:
            p = p * cls((-GaussianRational.coerce(r), 1))
        return p

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lead(self) -> GaussianRational:
        return self.coeffs[-1] if self.coeffs else _G0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self.coeffs == ((o,) if o else ())

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] = out[k] + c
        return Polynomial._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw([-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return Polynomial.constant(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            o = GaussianRational.coerce(other)
            if not o:
                return Polynomial()
            return Polynomial._raw([c * o for c in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial()
        out = [_G0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if y:
                    out[i + j] = out[i + j] + x * y
        return Polynomial._raw(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result, base = Polynomial.constant(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other: Polynomial):
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        db = other.degree
        inv = _G1 / other.lead
        q = [_G0] * max(len(rem) - db, 0)
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k]
            if not c:
                continue
            f = c * inv
            q[k - db] = f
            for i, y in enumerate(other.coeffs):
                rem[k - db + i] = rem[k - db + i] - f * y
        return Polynomial._raw(q), Polynomial._raw(rem[:db] if db > 0 else [])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other: Polynomial) -> Polynomial:
        q, r = divmod(self, other)
        if r:
            raise ArithmeticError("polynomial division is not exact")
        return q

    def monic(self) -> Polynomial:
        if not self.coeffs or self.lead == _G1:
            return self
        inv = _G1 / self.lead
        return Polynomial._raw([c * inv for c in self.coeffs])

    def derivative(self) -> Polynomial:
        return Polynomial._raw([c * k for k, c in enumerate(self.coeffs)][1:])

    def gcd(self, other: Polynomial) -> Polynomial:
        """Monic gcd (zero only if both inputs are zero)."""
        a, b = self, other
        while b:
            a, b = b, a % b
            b = b.monic()
        return a.monic()

    def __call__(self, z):
        """Horner evaluation; exact for Gaussian rationals, numeric otherwise."""
        if isinstance(z, (GaussianRational, int, Fraction)):
            z = GaussianRational.coerce(z)
            acc = _G0
            for c in reversed(self.coeffs):
                acc = acc * z + c
            return acc
        return np.polyval(self.to_numpy()[::-1], z) if self.coeffs else 0 * z

    def to_numpy(self) -> np.ndarray:
        """Complex coefficients in ascending order."""
        return np.array([complex(c) for c in self.coeffs], dtype=complex)

    def squarefree_decomposition(self) -> list[tuple[Polynomial, int]]:
        """Yun's algorithm: ``[(f_k, k)]`` with ``self ~ prod f_k**k``, f_k monic, coprime."""
        if self.degree < 1:
            return []
        out = []
        f = self.monic()
        df = f.derivative()
        a = f.gcd(df)
        b = f.exact_div(a)
        c = df.exact_div(a)
        d = c - b.derivative()
        k = 1
        while b.degree > 0:
            a = b.gcd(d)
            b = b.exact_div(a)
            c = d.exact_div(a)
            d = c - b.derivative()
            if a.degree > 0:
                out.append((a, k))
            k += 1
        return out

    def __repr__(self):
        return f"Polynomial({str(self)!r})"

    def __str__(self):
        return _format_poly(self)


def _format_poly(p: Polynomial) -> str:
    if not p.coeffs:
        return "0"
    parts = []
    for k in range(len(p.coeffs) - 1, -1, -1):
        c = p.coeffs[k]
        if not c:
            continue
        mono = "" if k == 0 else ("l" if k == 1 else f"l^{k}")
        if c.im and c.re:
            term = f"({_format_coeff(c)})" + (f"*{mono}" if mono else "")
            sign = "+"
        else:
            neg = (c.re < 0) if not c.im else (c.im < 0)
            mag = -c if neg else c
            sign = "-" if neg else "+"
            if mono and mag == _G1:
                term = mono
            else:
                cs = _format_coeff(mag)
                term = cs + (f"*{mono}" if mono else "")
        parts.append((sign, term))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, term in parts[1:]:
        out += f"{sign}{term}"
    return out


_ATOM = re.compile(r"^(\d+|l(\^\d+)?)$")


class RationalFunction:
    """Element of W[lambda] kept in canonical form.

    Canonical form: ``gcd(num, den) = 1`` and ``den`` monic; zero is ``0/1``.
    Equality and hashing are structural on the canonical form.
    """

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=1, _normalized=False):
        if not isinstance(num, Polynomial):
            num = Polynomial.constant(num)
        if not isinstance(den, Polynomial):
            den = Polynomial.constant(den)
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if not _normalized:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den

    @classmethod
    def constant(cls, c) -> RationalFunction:
        c = GaussianRational.coerce(c)
        return cls(Polynomial.constant(c), Polynomial.constant(1), _normalized=True)

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def constant_value(self) -> GaussianRational:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return self.num.lead if self.num else _G0

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            try:
                other = _as_rf(other)
            except TypeError:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        other = _as_rf(other)
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den,
                                self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _normalized=True)

    def __sub__(self, other):
        return self + (-_as_rf(other))

    def __rsub__(self, other):
        return _as_rf(other) - self

    def __mul__(self, other):
        other = _as_rf(other)
        if not self.num or not other.num:
            return ZERO
        # cross-cancel first to keep the gcd small
        g1 = self.num.gcd(other.den)
        g2 = other.num.gcd(self.den)
        num = self.num.exact_div(g1) * other.num.exact_div(g2)
        den = self.den.exact_div(g2) * other.den.exact_div(g1)
        return RationalFunction(num, den)

    __rmul__ = __mul__

    def inverse(self) -> RationalFunction:
        if not self.num:
            raise ZeroDivisionError("inverse of the zero rational function")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        return self * _as_rf(other).inverse()

    def __rtruediv__(self, other):
        return _as_rf(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction(self.num ** k, self.den ** k, _normalized=True)

    def pi(self):
        """``deg(num) - deg(den)``; ``-inf`` for the zero function."""
        if not self.num:
            return -math.inf
        return self.num.degree - self.den.degree

    def __call__(self, z):
        if isinstance(z, (GaussianRational, int, Fraction)):
            d = self.den(z)
            if not d:
                raise ZeroDivisionError(f"{self} has a pole at {z}")
            return self.num(z) / d
        return self.num(z) / self.den(z)

    def evaluator(self):
        """Vectorised complex evaluator ``z -> self(z)`` (descending numpy coefficient arrays)."""
        n = self.num.to_numpy()[::-1] if self.num else np.zeros(1, complex)
        d = self.den.to_numpy()[::-1]
        return lambda z: np.polyval(n, z) / np.polyval(d, z)

    def __repr__(self):
        return f"RationalFunction({str(self)!r})"

    def __str__(self):
        ns = str(self.num)
        if self.den.degree == 0:
            return ns
        ds = str(self.den)
        if not _ATOM.match(ns) and not (ns.startswith("-") and _ATOM.match(ns[1:])):
            ns = f"({ns})"
        if not _ATOM.match(ds):
            ds = f"({ds})"
        return f"{ns}/{ds}"


def _normalize(num: Polynomial, den: Polynomial):
    if not num:
        return Polynomial(), Polynomial.constant(1)
    if den.degree > 0 and num.degree > 0:
        g = num.gcd(den)
        if g.degree > 0:
            num = num.exact_div(g)
            den = den.exact_div(g)
    lead = den.lead
    if lead != _G1:
        inv = _G1 / lead
        num = num * inv
        den = den * inv
    return num, den


def _as_rf(x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, Polynomial):
        return RationalFunction(x, Polynomial.constant(1), _normalized=True)
    o = _coerce_or_none(x)
    if o is None:
        raise TypeError(f"cannot interpret {x!r} as a rational function")
    return RationalFunction.constant(o)


ZERO = RationalFunction()
ONE = RationalFunction.constant(1)
LAMBDA = RationalFunction(Polynomial((0, 1)), Polynomial.constant(1), _normalized=True)


def rf_add(a: RationalFunction, b: RationalFunction) -> RationalFunction:
    return _as_rf(a) + _as_rf(b)


def rf_mul(a: RationalFunction, b: RationalFunction) -> RationalFunction:
    return _as_rf(a) * _as_rf(b)


def rf_pi(w: RationalFunction):
    return _as_rf(w).pi()


# --------------------------------------------------------------------------
# parsing


class ParseError(ValueError):
    """Malformed textual input; ``line`` and ``column`` are 1-based."""

    def __init__(self, message: str, text: str = "", pos: int = 0, line: int = 1,
                 column: int | None = None):
        self.text = text
        self.line = line
        self.column = pos + 1 if column is None else column
        super().__init__(f"{message} at line {self.line}, column {self.column}")

    def relocate(self, line: int, column: int) -> ParseError:
        """Same error reported at an absolute position inside a larger file."""
        msg = str(self).rsplit(" at line ", 1)[0]
        return ParseError(msg, self.text, line=line, column=column + self.column - 1)


_TOKEN = re.compile(r"\s*(?:(\d+)(i)?(?![.\d])|(lambda|l)\b|(\d*\.\d+)|([-+*/^()]))")


def _tokenize(text: str):
    pos, out = 0, []
    stripped_end = len(text.rstrip())
    while pos < stripped_end:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unknown token {text[bad:bad + 1]!r}", text, bad)
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            v = int(m.group(1))
            out.append(("num", GaussianRational(0, v) if m.group(2) else GaussianRational(v), start))
        elif m.group(3) is not None:
            out.append(("lam", None, start))
        elif m.group(4) is not None:
            raise ParseError("decimal literals are not exact; write a fraction", text, start)
        else:
            out.append((m.group(5), None, start))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[0]!r}", self.text, tok[2])
        self.i += 1
        return tok

    def parse(self) -> RationalFunction:
        v = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[0]!r}", self.text, tok[2])
        return v

    def expr(self):
        v = self.term()
        while self.peek()[0] in "+-":
            op = self.take()[0]
            rhs = self.term()
            v = v + rhs if op == "+" else v - rhs
        return v

    def term(self):
        v = self.unary()
        while self.peek()[0] in ("*", "/"):
            op, _, pos = self.take()
            rhs = self.unary()
            if op == "*":
                v = v * rhs
            else:
                if not rhs:
                    raise ParseError("division by zero", self.text, pos)
                v = v / rhs
        return v

    def unary(self):
        if self.peek()[0] == "-":
            self.take()
            return -self.unary()
        if self.peek()[0] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            neg = False
            if self.peek()[0] == "-":
                self.take()
                neg = True
            kind, val, pos = self.take()
            if kind != "num" or val.im:
                raise ParseError("exponent must be an integer literal", self.text, pos)
            k = int(val.re)
            if neg:
                if not base:
                    raise ParseError("division by zero", self.text, pos)
                k = -k
            base = base ** k
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return RationalFunction.constant(val)
        if kind == "lam":
            return LAMBDA
        if kind == "(":
            v = self.expr()
            self.take(")")
            return v
        raise ParseError(f"unexpected {kind!r}", self.text, pos)


def parse(text: str) -> RationalFunction:
    """Parse the textual rational-function syntax."""
    if not isinstance(text, str):
        return _as_rf(text)
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# spectra


@dataclass(frozen=True)
class SpectrumMultiset:
    """Multiset of complex numbers, pairing values closer than ``pairing_tol``.

    ``roots`` is a sorted tuple of ``(value, multiplicity)`` with no two
    values within ``pairing_tol`` of each other.
    """

    roots: tuple = ()
    pairing_tol: float = DEFAULT_PAIRING_TOL

    @classmethod
    def from_values(cls, values, pairing_tol: float = DEFAULT_PAIRING_TOL,
                    multiplicities=None) -> SpectrumMultiset:
        vals = [complex(v) for v in values]
        mults = [1] * len(vals) if multiplicities is None else [int(m) for m in multiplicities]
        return cls(_merge(list(zip(vals, mults)), pairing_tol), pairing_tol)

    @classmethod
    def empty(cls, pairing_tol: float = DEFAULT_PAIRING_TOL) -> SpectrumMultiset:
        return cls((), pairing_tol)

    def __len__(self):
        return sum(m for _, m in self.roots)

    def values(self) -> list[complex]:
        """Expanded list of values, each repeated by multiplicity."""
        return [v for v, m in self.roots for _ in range(m)]

    def union(self, other: SpectrumMultiset) -> SpectrumMultiset:
        return multiset_union(self, other)

    def __or__(self, other):
        return multiset_union(self, other)

    def __sub__(self, other):
        return multiset_diff(self, other)

    def multiplicity(self, value, tol: float | None = None) -> int:
        tol = self.pairing_tol if tol is None else tol
        return sum(m for v, m in self.roots if abs(v - complex(value)) <= tol)

    def distance(self, other) -> float:
        """Largest pairing distance under an optimal one-to-one matching; inf if sizes differ."""
        a = self.values()
        b = other.values() if isinstance(other, SpectrumMultiset) else [complex(v) for v in other]
        if len(a) != len(b):
            return math.inf
        if not a:
            return 0.0
        from scipy.optimize import linear_sum_assignment

        cost = np.abs(np.subtract.outer(np.array(a), np.array(b)))
        # minimise the bottleneck: square the costs so large gaps dominate
        rows, cols = linear_sum_assignment(cost ** 2)
        return float(cost[rows, cols].max())

    def __str__(self):
        parts = []
        for v, m in self.roots:
            s = _fmt_complex(v)
            parts.append(s if m == 1 else f"{s} (x{m})")
        return "{" + ", ".join(parts) + "}"


def _fmt_complex(v: complex, digits: int = 10) -> str:
    re_, im_ = round(v.real, digits) + 0.0, round(v.imag, digits) + 0.0
    if im_ == 0:
        return f"{re_:g}"
    return f"{re_:g}{im_:+g}i"


def _sort_key(item):
    v = item[0]
    return (round(v.real, 12), round(v.imag, 12), item[1])


def _merge(items, tol):
    items = sorted([(v, m) for v, m in items if m > 0], key=_sort_key)
    clusters: list[list] = []
    for v, m in items:
        for c in clusters:
            if abs(c[0] - v) <= tol:
                total = c[1] + m
                c[0] = (c[0] * c[1] + v * m) / total
                c[1] = total
                break
        else:
            clusters.append([v, m])
    return tuple(sorted(((c[0], c[1]) for c in clusters), key=_sort_key))


def multiset_union(a: SpectrumMultiset, b: SpectrumMultiset) -> SpectrumMultiset:
    tol = max(a.pairing_tol, b.pairing_tol)
    return SpectrumMultiset(_merge(list(a.roots) + list(b.roots), tol), tol)


def multiset_diff(a: SpectrumMultiset, b: SpectrumMultiset) -> SpectrumMultiset:
    """``a - b``: multiplicity ``m - n`` where positive, dropped otherwise."""
    tol = max(a.pairing_tol, b.pairing_tol)
    remaining = [[v, m] for v, m in a.roots]
    for w, n in b.roots:
        near = sorted((abs(r[0] - w), k) for k, r in enumerate(remaining)
                      if abs(r[0] - w) <= tol and r[1] > 0)
        for _, k in near:
            if n == 0:
                break
            take = min(n, remaining[k][1])
            remaining[k][1] -= take
            n -= take
    return SpectrumMultiset(tuple((v, m) for v, m in remaining if m > 0), tol)


def _companion_roots(p: Polynomial) -> np.ndarray:
    c = p.monic().to_numpy()
    n = len(c) - 1
    if n == 0:
        return np.empty(0, complex)
    if n == 1:
        return np.array([-c[0]])
    comp = np.zeros((n, n), dtype=complex)
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = -c[:-1]
    return np.linalg.eigvals(comp)


def _newton_polish(p: Polynomial, roots: np.ndarray) -> np.ndarray:
    c = p.to_numpy()[::-1]
    dc = np.polyder(c)
    out = roots.copy()
    for k, r in enumerate(roots):
        fr = np.polyval(c, r)
        dfr = np.polyval(dc, r)
        if dfr != 0:
            cand = r - fr / dfr
            if abs(np.polyval(c, cand)) < abs(fr):
                out[k] = cand
    return out


def poly_roots(p: Polynomial, tol: float = DEFAULT_TOL,
               pairing_tol: float = DEFAULT_PAIRING_TOL) -> SpectrumMultiset:
    """Roots of ``p`` with multiplicity.

    Multiplicities come from an exact square-free decomposition; each
    square-free factor is solved through its companion matrix and polished
    with one Newton step.
    """
    if not p:
        raise ValueError("infinite root set: the zero polynomial vanishes everywhere")
    items = []
    for f, k in p.squarefree_decomposition():
        rs = _newton_polish(f, _companion_roots(f))
        items.extend((complex(r), k) for r in rs)
    result = SpectrumMultiset(_merge(items, pairing_tol), pairing_tol)
    return result


def residual_bound_ok(p: Polynomial, roots: SpectrumMultiset, tol: float = DEFAULT_TOL) -> bool:
    """Check ``|p(r)| <= tol * (1 + max|coeff|)`` for every root."""
    c = p.to_numpy()
    scale = 1 + (np.abs(c).max() if len(c) else 0)
    return all(abs(np.polyval(c[::-1], r)) <= tol * scale for r, _ in roots.roots)
