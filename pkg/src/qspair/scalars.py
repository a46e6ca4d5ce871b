"""Exact arithmetic in Q(v) with q = v^2, plus truncated power series.

Every scalar is a reduced fraction of integer polynomials in ``v``.  The
polynomial work (products, gcds) is delegated to python-flint.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from flint import fmpz_poly

__all__ = [
    "Scalar", "V", "Q", "ZERO", "ONE", "qpow", "rho", "qint", "qbinom",
    "as_scalar", "parse_scalar", "specialize", "TruncSeries", "fit_rational",
    "solve_linear", "FitError",
]

_P0 = fmpz_poly([])
_P1 = fmpz_poly([1])


def _lead(p: fmpz_poly) -> int:
    return int(p[p.degree()])


class Scalar:
    """Element of Q(v), stored as num/den with gcd 1 and den having positive leading coefficient."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=0, den=1):
        if isinstance(num, Scalar) and den == 1:
            self.num, self.den, self._hash = num.num, num.den, num._hash
            return
        n = num if isinstance(num, fmpz_poly) else fmpz_poly([num]) if num else fmpz_poly([])
        d = den if isinstance(den, fmpz_poly) else fmpz_poly([den])
        if d == 0:
            raise ZeroDivisionError("zero denominator")
        self._set(n, d)

    @classmethod
    def _raw(cls, n: fmpz_poly, d: fmpz_poly) -> "Scalar":
        obj = cls.__new__(cls)
        obj._set(n, d)
        return obj

    def _set(self, n: fmpz_poly, d: fmpz_poly) -> None:
        self._hash = None
        if n == 0:
            self.num, self.den = _P0, _P1
            return
        if d != 1:
            g = n.gcd(d)
            if g != 1:
                n = n // g
                d = d // g
            if _lead(d) < 0:
                n, d = -n, -d
        self.num, self.den = n, d

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        o = as_scalar(other)
        if o is NotImplemented:
            return NotImplemented
        if self.den == o.den:
            if self.den == 1:
                return Scalar._raw(self.num + o.num, _P1)
            return Scalar._raw(self.num + o.num, self.den)
        return Scalar._raw(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        obj = Scalar.__new__(Scalar)
        obj.num, obj.den, obj._hash = -self.num, self.den, None
        return obj

    def __sub__(self, other):
        o = as_scalar(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return as_scalar(other) + (-self)

    def __mul__(self, other):
        o = as_scalar(other)
        if o is NotImplemented:
            return NotImplemented
        if self.den == 1 and o.den == 1:
            obj = Scalar.__new__(Scalar)
            obj.num, obj.den, obj._hash = self.num * o.num, _P1, None
            if obj.num == 0:
                obj.num = _P0
            return obj
        return Scalar._raw(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.num == 0:
            raise ZeroDivisionError("inverse of zero scalar")
        return Scalar._raw(self.den, self.num)

    def __truediv__(self, other):
        o = as_scalar(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return as_scalar(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        return Scalar._raw(self.num ** k, self.den ** k)

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        o = as_scalar(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((tuple(int(c) for c in self.num.coeffs()),
                               tuple(int(c) for c in self.den.coeffs())))
        return self._hash

    def __bool__(self):
        return self.num != 0

    def is_zero(self) -> bool:
        return self.num == 0

    # -- inspection -------------------------------------------------------
    def numerator_coeffs(self) -> list[int]:
        return [int(c) for c in self.num.coeffs()]

    def denominator_coeffs(self) -> list[int]:
        return [int(c) for c in self.den.coeffs()]

    def monomial_exponent(self) -> tuple[Fraction, int] | None:
        """If self = c*v^k return (c, k), else None."""
        if self.num == 0:
            return None
        nz = [(i, int(c)) for i, c in enumerate(self.num.coeffs()) if c != 0]
        dz = [(i, int(c)) for i, c in enumerate(self.den.coeffs()) if c != 0]
        if len(nz) != 1 or len(dz) != 1:
            return None
        return Fraction(nz[0][1], dz[0][1]), nz[0][0] - dz[0][0]

    def __str__(self):
        n = _poly_str(self.num)
        if self.den == 1:
            return n
        return f"({n})/({_poly_str(self.den)})"

    def __repr__(self):
        return f"Scalar('{self}')"

    def to_json(self) -> str:
        return str(self)


def _poly_str(p: fmpz_poly) -> str:
    coeffs = [int(c) for c in p.coeffs()]
    parts = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        mag = abs(c)
        if k == 0:
            body = str(mag)
        else:
            mono = "v" if k == 1 else f"v^{k}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts) if parts else "0"


def as_scalar(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, bool):
        return NotImplemented
    if isinstance(x, int):
        return Scalar(x)
    if isinstance(x, Fraction):
        return Scalar(x.numerator, x.denominator)
    if isinstance(x, str):
        return parse_scalar(x)
    return NotImplemented


ZERO = Scalar(0)
ONE = Scalar(1)
V = Scalar(fmpz_poly([0, 1]))
Q = V * V


def qpow(k: int) -> Scalar:
    """q^k = v^(2k)."""
    if k >= 0:
        return Scalar(fmpz_poly([0] * (2 * k) + [1]))
    return Scalar(fmpz_poly([1]), fmpz_poly([0] * (-2 * k) + [1]))


def rho() -> Scalar:
    return Q - qpow(-1)


_QINT_CACHE: dict[int, Scalar] = {}


def qint(k: int) -> Scalar:
    """Quantum integer [k] = (q^k - q^-k)/(q - q^-1)."""
    if k not in _QINT_CACHE:
        _QINT_CACHE[k] = (qpow(k) - qpow(-k)) / rho()
    return _QINT_CACHE[k]


def qfact(k: int) -> Scalar:
    out = ONE
    for j in range(1, k + 1):
        out = out * qint(j)
    return out


def qbinom(n: int, k: int) -> Scalar:
    if k < 0 or k > n:
        return ZERO
    return qfact(n) / (qfact(k) * qfact(n - k))


# -- textual grammar --------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([vq])|(\^)|([-+*/()]))")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse scalar {self.text!r} at position {pos}")
            pos = m.end()
            if m.group(1):
                self.toks.append(("num", int(m.group(1))))
            elif m.group(2):
                self.toks.append(("var", m.group(2)))
            elif m.group(3):
                self.toks.append(("op", "^"))
            else:
                self.toks.append(("op", m.group(4)))
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self) -> Scalar:
        val = self.expr()
        if self.i != len(self.toks):
            raise ValueError(f"trailing input in scalar {self.text!r}")
        return val

    def expr(self) -> Scalar:
        val = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self) -> Scalar:
        val = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.unary()
            val = val * rhs if op == "*" else val / rhs
        return val

    def unary(self) -> Scalar:
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Scalar:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            sign = 1
            if self.peek() == ("op", "-"):
                self.take()
                sign = -1
            kind, val = self.take()
            if kind != "num":
                raise ValueError(f"exponent must be an integer in {self.text!r}")
            return base ** (sign * val)
        return base

    def atom(self) -> Scalar:
        kind, val = self.take()
        if kind == "num":
            return Scalar(val)
        if kind == "var":
            return V if val == "v" else Q
        if (kind, val) == ("op", "("):
            inner = self.expr()
            if self.take() != ("op", ")"):
                raise ValueError(f"unbalanced parentheses in {self.text!r}")
            return inner
        raise ValueError(f"unexpected token {val!r} in scalar {self.text!r}")


def parse_scalar(text: str) -> Scalar:
    """Parse sums/products/quotients of integers, v and q (q means v^2)."""
    return _Parser(text).parse()


def _eval_poly(p: fmpz_poly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed([int(c) for c in p.coeffs()]):
        acc = acc * x + c
    return acc


def specialize(s: Scalar, value) -> Fraction:
    """Evaluate at v = value (a rational that is not 0 or +-1)."""
    x = Fraction(value)
    if x in (0, 1, -1):
        raise ValueError("specialization value must avoid 0 and roots of unity (+-1)")
    d = _eval_poly(s.den, x)
    if d == 0:
        raise ZeroDivisionError(f"denominator of {s} vanishes at v = {x}")
    return _eval_poly(s.num, x) / d


# -- linear algebra helper ----------------------------------------------------

def solve_linear(rows: Sequence[Sequence], rhs: Sequence):
    """Return one solution x of A x = b over a field, or None if inconsistent.

    Free variables are set to zero.
    """
    m = len(rows)
    ncols = len(rows[0]) if m else 0
    aug = [[as_scalar(a) for a in row] + [as_scalar(b)] for row, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, m) if not aug[i][c].is_zero()), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = aug[r][c].inverse()
        aug[r] = [x * inv for x in aug[r]]
        for i in range(m):
            if i != r and not aug[i][c].is_zero():
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if not aug[i][ncols].is_zero():
            return None
    x = [ZERO] * ncols
    for i, c in enumerate(pivots):
        x[c] = aug[i][ncols]
    return x


# -- truncated series ---------------------------------------------------------

def _inv(x):
    return x.inverse() if hasattr(x, "inverse") else 1 / x


def _one_like(x):
    if hasattr(x, "one_like"):
        return x.one_like()
    return ONE


class TruncSeries:
    """Power series sum_k c_k z^k truncated at z^order; coefficients from any ring."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Iterable, order: int | None = None, zero=None):
        cs = list(coeffs)
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise ValueError("order must be >= 0")
        if len(cs) < order + 1:
            if zero is None:
                if not cs:
                    raise ValueError("need a zero element to pad an empty series")
                zero = cs[0] - cs[0]
            cs = cs + [zero] * (order + 1 - len(cs))
        self.coeffs = cs[: order + 1]
        self.order = order

    def __getitem__(self, k: int):
        return self.coeffs[k]

    def __len__(self):
        return self.order + 1

    def _zero(self):
        return self.coeffs[0] - self.coeffs[0]

    def _check(self, other: "TruncSeries"):
        if self.order != other.order:
            raise ValueError(f"order mismatch {self.order} vs {other.order}")

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        return TruncSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        return TruncSeries([a - b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    def __neg__(self):
        return TruncSeries([-a for a in self.coeffs], self.order)

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return TruncSeries([a * other for a in self.coeffs], self.order)
        self._check(other)
        out = []
        for k in range(self.order + 1):
            acc = self.coeffs[0] * other.coeffs[k]
            for j in range(1, k + 1):
                acc = acc + self.coeffs[j] * other.coeffs[k - j]
            out.append(acc)
        return TruncSeries(out, self.order)

    def __rmul__(self, c):
        return TruncSeries([c * a for a in self.coeffs], self.order)

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.order == other.order and all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def map(self, f: Callable) -> "TruncSeries":
        return TruncSeries([f(a) for a in self.coeffs], self.order)

    def truncate(self, order: int) -> "TruncSeries":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return TruncSeries(self.coeffs[: order + 1], order)

    def scale_variable(self, c) -> "TruncSeries":
        """Substitute z -> c z."""
        out, p = [], ONE
        for a in self.coeffs:
            out.append(p * a)
            p = p * c
        return TruncSeries(out, self.order)

    def inverse(self) -> "TruncSeries":
        a0inv = _inv(self.coeffs[0])
        b = [a0inv]
        for k in range(1, self.order + 1):
            acc = self.coeffs[1] * b[k - 1]
            for j in range(2, k + 1):
                acc = acc + self.coeffs[j] * b[k - j]
            b.append(-(a0inv * acc))
        return TruncSeries(b, self.order)

    def _assert_commuting(self):
        cs = self.coeffs
        if hasattr(cs[0], "commutes_with"):
            for i in range(len(cs)):
                for j in range(i + 1, len(cs)):
                    if not cs[i].commutes_with(cs[j]):
                        raise ValueError("series coefficients do not commute")

    def exp(self, check_commuting: bool = True) -> "TruncSeries":
        """exp of a series with zero constant term."""
        c0 = self.coeffs[0]
        if not _is_zero(c0):
            raise ValueError("exp requires zero constant term")
        if check_commuting:
            self._assert_commuting()
        out = [_one_like(c0)]
        for k in range(1, self.order + 1):
            acc = None
            for j in range(1, k + 1):
                t = (self.coeffs[j] * out[k - j]) * j
                acc = t if acc is None else acc + t
            out.append(acc * Fraction(1, k))
        return TruncSeries(out, self.order)

    def log(self, check_commuting: bool = True) -> "TruncSeries":
        """log of a series with constant term 1."""
        c0 = self.coeffs[0]
        if not _is_one(c0):
            raise ValueError("log requires constant term 1")
        if check_commuting:
            self._assert_commuting()
        out = [c0 - c0]
        for k in range(1, self.order + 1):
            acc = self.coeffs[k] * k
            for j in range(1, k):
                acc = acc - (out[j] * self.coeffs[k - j]) * j
            out.append(acc * Fraction(1, k))
        return TruncSeries(out, self.order)

    @staticmethod
    def from_rational(num: Sequence, den: Sequence, order: int) -> "TruncSeries":
        """Expansion of num(z)/den(z) at z = 0 (scalar coefficients)."""
        num = [as_scalar(c) for c in num]
        den = [as_scalar(c) for c in den]
        n = TruncSeries(num, order, zero=ZERO) if len(num) <= order + 1 else TruncSeries(num[: order + 1], order)
        d = TruncSeries(den, order, zero=ZERO) if len(den) <= order + 1 else TruncSeries(den[: order + 1], order)
        return n * d.inverse()

    def to_json(self) -> list:
        return [c.to_json() for c in self.coeffs]

    def __repr__(self):
        return f"TruncSeries({self.coeffs!r}, order={self.order})"


def _is_zero(x) -> bool:
    return x.is_zero() if hasattr(x, "is_zero") else x == 0


def _is_one(x) -> bool:
    if hasattr(x, "is_identity"):
        return x.is_identity()
    return x == 1


class FitError(ValueError):
    pass


def fit_rational(s: TruncSeries, p: int, d: int):
    """Pade fit: (Nm, Dn) with deg Nm <= p, deg Dn <= d, Dn(0) = 1, Nm/Dn = s mod z^(p+d+1).

    Returns lists of scalar coefficients, or None when no such pair exists.
    """
    if p < 0 or d < 0:
        raise ValueError("degrees must be non-negative")
    if p + d + 1 > s.order + 1:
        raise FitError(f"need order >= {p + d}, series has order {s.order}")
    c = [as_scalar(x) for x in s.coeffs]

    def coef(k):
        return c[k] if 0 <= k < len(c) else ZERO

    if d:
        rows = [[coef(k - j) for j in range(1, d + 1)] for k in range(p + 1, p + d + 1)]
        rhs = [-coef(k) for k in range(p + 1, p + d + 1)]
        sol = solve_linear(rows, rhs)
        if sol is None:
            return None
    else:
        sol = []
    den = [ONE] + list(sol)
    num = []
    for k in range(p + 1):
        acc = ZERO
        for j in range(0, min(k, d) + 1):
            acc = acc + den[j] * coef(k - j)
        num.append(acc)
    check = TruncSeries.from_rational(num, den, p + d)
    if any(check[k] != coef(k) for k in range(p + d + 1)):
        return None
    return _trim(num), _trim(den)


def _trim(cs: list) -> list:
    cs = list(cs)
    while len(cs) > 1 and cs[-1].is_zero():
        cs.pop()
    return cs
