"""Univariate polynomials, rational functions and exponential polynomials over QI."""

from __future__ import annotations

from functools import total_ordering

import numpy as np

from .scalars import QI, ONE, ZERO, format_scalar, parse_scalar


def _trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    return tuple(coeffs)


class Poly:
    """Dense univariate polynomial in ``z``; ``coeffs[k]`` multiplies ``z**k``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        if isinstance(coeffs, Poly):
            coeffs = coeffs.coeffs
        elif not isinstance(coeffs, (list, tuple)):
            coeffs = (coeffs,)
        self.coeffs = _trim(QI.coerce(c) for c in coeffs)

    @classmethod
    def const(cls, c) -> "Poly":
        return cls((c,))

    @classmethod
    def z(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def from_roots(cls, roots, lead=1) -> "Poly":
        p = cls.const(lead)
        for r in roots:
            p = p * cls((-QI.coerce(r), 1))
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def lead(self) -> QI:
        return self.coeffs[-1] if self.coeffs else ZERO

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        try:
            return self.coeffs == Poly.const(other).coeffs
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({[format_scalar(c) for c in self.coeffs]})"

    def __add__(self, other):
        other = as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Poly([x + y for x, y in zip(a, b)] + list(a[len(b):]))

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        other = as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return as_poly(other) - self

    def __mul__(self, other):
        if isinstance(other, (ExpPoly, UniRational)):
            return NotImplemented
        other = as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] = out[i + j] + a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = Poly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def divmod(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [ZERO] * max(len(rem) - other.degree, 1)
        inv_lead = ONE / other.lead
        while len(rem) - 1 >= other.degree and rem:
            shift = len(rem) - 1 - other.degree
            factor = rem[-1] * inv_lead
            q[shift] = factor
            for k, c in enumerate(other.coeffs):
                rem[shift + k] = rem[shift + k] - factor * c
            rem = list(_trim(rem))
        return Poly(q), Poly(rem)

    def __floordiv__(self, other):
        return self.divmod(as_poly(other))[0]

    def __mod__(self, other):
        return self.divmod(as_poly(other))[1]

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        inv = ONE / self.lead
        return Poly([c * inv for c in self.coeffs])

    def derivative(self) -> "Poly":
        return Poly([c * k for k, c in enumerate(self.coeffs)][1:])

    def __call__(self, z):
        if isinstance(z, np.ndarray):
            return self.eval_numeric(z)
        acc = ZERO if isinstance(z, QI) or isinstance(z, int) else 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def numeric_coeffs(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coeffs], dtype=complex)

    def eval_numeric(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        acc = np.zeros_like(z)
        for c in reversed(self.numeric_coeffs()):
            acc = acc * z + c
        return acc

    def to_json(self):
        return [format_scalar(c) for c in self.coeffs] or ["0"]

    @classmethod
    def from_json(cls, data) -> "Poly":
        if not isinstance(data, list):
            data = [data]
        return cls([parse_scalar(c) for c in data])


def as_poly(x):
    if isinstance(x, Poly):
        return x
    try:
        return Poly.const(QI.coerce(x))
    except TypeError:
        return NotImplemented


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over Q(i); ``gcd(0, 0)`` is the zero polynomial."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def squarefree_decomposition(p: Poly):
    """Yun's algorithm: returns ``[(factor, multiplicity), ...]`` with squarefree monic factors."""
    if p.degree < 1:
        return []
    out = []
    dp = p.derivative()
    a = poly_gcd(p, dp)
    b = p // a
    c = dp // a
    d = c - b.derivative()
    k = 1
    while b.degree >= 1:
        a = poly_gcd(b, d)
        if a.degree >= 1:
            out.append((a, k))
        b = b // a
        c = d // a
        d = c - b.derivative()
        k += 1
    return out


class UniRational:
    """Rational function ``num/den`` in canonical form (coprime, monic denominator)."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = Poly(num) if not isinstance(num, Poly) else num
        den = Poly.const(1) if den is None else (den if isinstance(den, Poly) else Poly(den))
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num, self.den = Poly(), Poly.const(1)
            return
        g = poly_gcd(num, den)
        if g.degree > 0:
            num, den = num // g, den // g
        lead = den.lead
        self.num = Poly([c / lead for c in num.coeffs])
        self.den = den.monic()

    @classmethod
    def coerce(cls, x) -> "UniRational":
        if isinstance(x, UniRational):
            return x
        if isinstance(x, Poly):
            return cls(x)
        return cls(Poly.const(QI.coerce(x)))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def __eq__(self, other):
        try:
            other = UniRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        o = UniRational.coerce(other)
        return UniRational(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return UniRational(-self.num, self.den)

    def __sub__(self, other):
        return self + (-UniRational.coerce(other))

    def __rsub__(self, other):
        return UniRational.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, ExpPoly):
            return NotImplemented
        o = UniRational.coerce(other)
        return UniRational(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = UniRational.coerce(other)
        if o.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return UniRational(self.num * o.den, self.den * o.num)

    def __pow__(self, k: int):
        return UniRational(self.num ** k, self.den ** k)

    def has_pole_at(self, z0) -> bool:
        return not self.den(QI.coerce(z0))

    def __call__(self, z):
        if isinstance(z, np.ndarray):
            return self.num.eval_numeric(z) / self.den.eval_numeric(z)
        z = QI.coerce(z)
        d = self.den(z)
        if not d:
            raise ZeroDivisionError(f"pole at {z}")
        return self.num(z) / d

    def __repr__(self):
        if self.den.is_constant():
            return f"UniRational({self.num!r})"
        return f"UniRational({self.num!r} / {self.den!r})"

    def to_json(self):
        if self.den.is_constant() and self.den.lead == 1 and self.num.is_constant():
            return format_scalar(self.num.lead)
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data) -> "UniRational":
        if isinstance(data, dict):
            return cls(Poly.from_json(data["num"]), Poly.from_json(data.get("den", ["1"])))
        return cls(Poly.const(parse_scalar(data)))


@total_ordering
class _FreqKey:
    # deterministic order for frequencies: by real part, then imaginary part
    __slots__ = ("f",)

    def __init__(self, f):
        self.f = f

    def __lt__(self, other):
        return (self.f.re, self.f.im) < (other.f.re, other.f.im)

    def __eq__(self, other):
        return self.f == other.f


class ExpPoly:
    """Finite sum ``sum_j p_j(z) * exp(lam_j * z)`` with polynomial ``p_j`` and exact ``lam_j``.

    A plain polynomial is the special case with the single frequency 0.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        acc = {}
        if terms is None:
            terms = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for lam, p in items:
            lam = QI.coerce(lam)
            p = p if isinstance(p, Poly) else Poly(p)
            acc[lam] = acc.get(lam, Poly()) + p
        keep = [(lam, p) for lam, p in acc.items() if not p.is_zero()]
        keep.sort(key=lambda t: _FreqKey(t[0]))
        self.terms = tuple(keep)

    @classmethod
    def coerce(cls, x) -> "ExpPoly":
        if isinstance(x, ExpPoly):
            return x
        if isinstance(x, Poly):
            return cls([(0, x)])
        return cls([(0, Poly.const(QI.coerce(x)))])

    @classmethod
    def exp(cls, lam, p=1) -> "ExpPoly":
        return cls([(lam, Poly(p) if not isinstance(p, Poly) else p)])

    @property
    def frequencies(self):
        return [lam for lam, _ in self.terms]

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_polynomial(self) -> bool:
        return all(lam == 0 for lam, _ in self.terms)

    def as_poly(self) -> Poly:
        if not self.is_polynomial():
            raise ValueError("exponential polynomial has nonzero frequencies")
        return self.terms[0][1] if self.terms else Poly()

    def __eq__(self, other):
        try:
            other = ExpPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __add__(self, other):
        try:
            o = ExpPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return ExpPoly(list(self.terms) + list(o.terms))

    __radd__ = __add__

    def __neg__(self):
        return ExpPoly([(lam, -p) for lam, p in self.terms])

    def __sub__(self, other):
        return self + (-ExpPoly.coerce(other))

    def __rsub__(self, other):
        return ExpPoly.coerce(other) - self

    def __mul__(self, other):
        try:
            o = ExpPoly.coerce(other)
        except TypeError:
            return NotImplemented
        out = []
        for la, pa in self.terms:
            for lb, pb in o.terms:
                out.append((la + lb, pa * pb))
        return ExpPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = ExpPoly.coerce(1)
        for _ in range(k):
            result = result * self
        return result

    def derivative(self) -> "ExpPoly":
        return ExpPoly([(lam, p.derivative() + p * lam) for lam, p in self.terms])

    def __call__(self, z):
        if isinstance(z, np.ndarray) or isinstance(z, (complex, float)):
            return self.eval_numeric(z)
        z = QI.coerce(z)
        if self.is_polynomial():
            return self.as_poly()(z)
        raise ValueError("exact evaluation of a transcendental term is not available")

    def eval_numeric(self, z):
        z = np.asarray(z, dtype=complex)
        acc = np.zeros_like(z)
        for lam, p in self.terms:
            val = p.eval_numeric(z)
            if lam:
                val = val * np.exp(complex(lam) * z)
            acc = acc + val
        return acc

    def max_abs_frequency(self) -> float:
        return max((abs(complex(lam)) for lam, _ in self.terms), default=0.0)

    def __repr__(self):
        parts = []
        for lam, p in self.terms:
            parts.append(f"{p!r}" if lam == 0 else f"{p!r}*exp({format_scalar(lam)}*z)")
        return "ExpPoly(" + " + ".join(parts or ["0"]) + ")"

    def to_json(self):
        return [{"freq": format_scalar(lam), "poly": p.to_json()} for lam, p in self.terms]

    @classmethod
    def from_json(cls, data) -> "ExpPoly":
        return cls([(parse_scalar(t["freq"]), Poly.from_json(t["poly"])) for t in data])
