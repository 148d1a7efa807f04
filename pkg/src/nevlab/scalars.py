"""Scalar fields: exact Gaussian rationals and precision-tagged floating complex numbers."""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd
from numbers import Rational

import mpmath


class QI:
    """Exact complex number ``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, QI):
            re, im = re.re, re.im + Fraction(im)
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("QI is immutable")

    @staticmethod
    def coerce(x) -> "QI":
        if isinstance(x, QI):
            return x
        if isinstance(x, (int, Rational)):
            return QI(x)
        if isinstance(x, str):
            return parse_scalar(x)
        if isinstance(x, float):
            return QI(Fraction(x))
        if isinstance(x, complex):
            return QI(Fraction(x.real), Fraction(x.imag))
        raise TypeError(f"cannot coerce {type(x).__name__} to QI")

    def __add__(self, other):
        if isinstance(other, Approx):
            return NotImplemented
        o = QI.coerce(other)
        return QI(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Approx):
            return NotImplemented
        o = QI.coerce(other)
        return QI(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return QI.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, Approx):
            return NotImplemented
        if isinstance(other, (int, Rational)):
            return QI(self.re * other, self.im * other)
        o = QI.coerce(other)
        return QI(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Approx):
            return NotImplemented
        o = QI.coerce(other)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by exact zero")
        return QI((self.re * o.re + self.im * o.im) / n, (self.im * o.re - self.re * o.im) / n)

    def __rtruediv__(self, other):
        return QI.coerce(other) / self

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return QI(1) / (self ** (-k))
        result, base = QI(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, QI):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational)):
            return self.im == 0 and self.re == other
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def conjugate(self) -> "QI":
        return QI(self.re, -self.im)

    def norm(self) -> Fraction:
        """Squared modulus, exact."""
        return self.re * self.re + self.im * self.im

    def denominator(self) -> int:
        a, b = self.re.denominator, self.im.denominator
        return a * b // gcd(a, b)

    def __repr__(self):
        return f"QI({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


ZERO = QI(0)
ONE = QI(1)
I = QI(0, 1)


def parse_scalar(text) -> QI:
    """Parse ``"a/b"``, ``"a/b+c/d*i"``, ``"-i"``, ``"3*i"`` and plain ints into a QI."""
    if isinstance(text, QI):
        return text
    if isinstance(text, bool):
        raise ValueError("booleans are not scalars")
    if isinstance(text, (int, Fraction)):
        return QI(text)
    if isinstance(text, float):
        # JSON numbers: read the decimal literal, not the binary double
        return QI(Fraction(repr(text)))
    s = str(text).replace(" ", "")
    if not s:
        raise ValueError("empty scalar")
    re_part, im_part = Fraction(0), Fraction(0)
    # split on sign boundaries while keeping the sign with its term
    terms = re.findall(r"[+-]?[^+-]+", s)
    if "".join(terms) != s:
        raise ValueError(f"malformed scalar {text!r}")
    for term in terms:
        sign = -1 if term.startswith("-") else 1
        body = term.lstrip("+-")
        imag = body.endswith("i")
        if imag:
            body = body[:-1].rstrip("*")
            if body == "":
                body = "1"
        try:
            value = Fraction(body)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed scalar {text!r}") from exc
        if imag:
            im_part += sign * value
        else:
            re_part += sign * value
    return QI(re_part, im_part)


def format_scalar(x) -> str:
    """Inverse of :func:`parse_scalar`; canonical text used in JSON output."""
    x = QI.coerce(x)
    if x.im == 0:
        return str(x.re)
    im = "" if abs(x.im) == 1 else f"{abs(x.im)}*"
    if x.re == 0:
        return f"{'-' if x.im < 0 else ''}{im}i"
    return f"{x.re}{'-' if x.im < 0 else '+'}{im}i"


class Approx:
    """Floating complex scalar carrying its own binary precision (>= 53 bits).

    Arithmetic between two ``Approx`` values is carried out at the larger of
    the two precisions; exact operands are promoted at the other's precision.
    """

    __slots__ = ("value", "prec")

    def __init__(self, value, prec: int = 53):
        if prec < 53:
            raise ValueError("precision must be at least 53 bits")
        self.prec = int(prec)
        with mpmath.workprec(self.prec):
            if isinstance(value, QI):
                value = mpmath.mpc(mpmath.mpf(value.re.numerator) / value.re.denominator,
                                   mpmath.mpf(value.im.numerator) / value.im.denominator)
            self.value = mpmath.mpc(value)

    def _binary(self, other, op):
        if isinstance(other, Approx):
            prec = max(self.prec, other.prec)
            ov = other.value
        else:
            prec = self.prec
            ov = Approx(QI.coerce(other), prec).value
        with mpmath.workprec(prec):
            return Approx(op(self.value, ov), prec)

    def __add__(self, o):
        return self._binary(o, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, o):
        return self._binary(o, lambda a, b: a - b)

    def __rsub__(self, o):
        return self._binary(o, lambda a, b: b - a)

    def __mul__(self, o):
        return self._binary(o, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, o):
        return self._binary(o, lambda a, b: a / b)

    def __rtruediv__(self, o):
        return self._binary(o, lambda a, b: b / a)

    def __neg__(self):
        return Approx(-self.value, self.prec)

    def __pow__(self, k):
        with mpmath.workprec(self.prec):
            return Approx(self.value ** k, self.prec)

    def __abs__(self):
        with mpmath.workprec(self.prec):
            return abs(self.value)

    def __complex__(self):
        return complex(self.value)

    def __repr__(self):
        return f"Approx({mpmath.nstr(self.value, 15)}, prec={self.prec})"


def to_complex(x) -> complex:
    return complex(x)


def is_exact(x) -> bool:
    return isinstance(x, (QI, int, Rational))
