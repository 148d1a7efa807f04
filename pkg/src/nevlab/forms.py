"""Homogeneous forms in n+1 variables with exact or rational-function coefficients."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import IdenticallyZero, InvalidShape
from .poly import ExpPoly, Poly, UniRational
from .scalars import QI, ONE, format_scalar, parse_scalar


@lru_cache(maxsize=None)
def monomial_basis(n: int, d: int) -> tuple:
    """All exponent tuples of total degree ``d`` in ``n + 1`` variables, lexicographically sorted."""
    if n < 0 or d < 0:
        raise ValueError("n and d must be nonnegative")

    def rec(k, remaining):
        if k == 0:
            yield (remaining,)
            return
        for first in range(remaining + 1):
            for rest in rec(k - 1, remaining - first):
                yield (first,) + rest

    return tuple(rec(n, d))


def index_degree(index) -> int:
    return sum(index)


def _is_moving_coeff(c) -> bool:
    return isinstance(c, UniRational) and not c.is_constant()


class HomogeneousForm:
    """A degree-``d`` form ``sum a_I x^I`` in the variables ``x_0..x_n``.

    Coefficients are either exact scalars (:class:`QI`) for a fixed hypersurface
    or :class:`UniRational` functions of ``z`` for a moving one.
    """

    __slots__ = ("n", "d", "coeffs")

    def __init__(self, n: int, d: int, coeffs: dict):
        if n < 0 or d < 0:
            raise InvalidShape("n and d must be nonnegative")
        moving = any(isinstance(c, UniRational) and not c.is_constant() for c in coeffs.values())
        clean = {}
        for idx, c in coeffs.items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != n + 1 or sum(idx) != d or min(idx) < 0:
                raise InvalidShape(f"index {idx} is not a degree-{d} monomial in {n + 1} variables")
            if moving:
                c = UniRational.coerce(c)
            elif isinstance(c, UniRational):
                c = c.num.lead if not c.is_zero() else QI(0)
            else:
                c = QI.coerce(c)
            if c:
                clean[idx] = c
        if not clean:
            raise InvalidShape("a form needs at least one nonzero coefficient")
        self.n = n
        self.d = d
        self.coeffs = dict(sorted(clean.items()))

    @classmethod
    def from_terms(cls, n, terms) -> "HomogeneousForm":
        terms = dict(terms)
        d = sum(next(iter(terms)))
        return cls(n, d, terms)

    @property
    def is_moving(self) -> bool:
        return any(isinstance(c, UniRational) for c in self.coeffs.values())

    def coefficient(self, index):
        index = tuple(index)
        if index in self.coeffs:
            return self.coeffs[index]
        return UniRational.coerce(0) if self.is_moving else QI(0)

    def coefficient_vector(self):
        return [self.coefficient(idx) for idx in monomial_basis(self.n, self.d)]

    def __eq__(self, other):
        if not isinstance(other, HomogeneousForm):
            return NotImplemented
        return (self.n, self.d) == (other.n, other.d) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.n, self.d, tuple(self.coeffs.items())))

    def __repr__(self):
        terms = " + ".join(
            f"({c if not isinstance(c, QI) else format_scalar(c)})*x^{list(i)}" for i, c in self.coeffs.items()
        )
        return f"HomogeneousForm(n={self.n}, d={self.d}: {terms})"

    def _combine(self, other, sign):
        if (self.n, self.d) != (other.n, other.d):
            raise InvalidShape("forms must share ambient dimension and degree")
        keys = set(self.coeffs) | set(other.coeffs)
        moving = self.is_moving or other.is_moving
        out = {}
        for k in keys:
            a, b = self.coefficient(k), other.coefficient(k)
            if moving:
                a, b = UniRational.coerce(a), UniRational.coerce(b)
            out[k] = a + b if sign > 0 else a - b
        return HomogeneousForm(self.n, self.d, out)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def scale(self, c) -> "HomogeneousForm":
        if isinstance(c, UniRational) or self.is_moving:
            c = UniRational.coerce(c)
            return HomogeneousForm(self.n, self.d, {k: UniRational.coerce(v) * c for k, v in self.coeffs.items()})
        c = QI.coerce(c)
        return HomogeneousForm(self.n, self.d, {k: v * c for k, v in self.coeffs.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def __neg__(self):
        return self.scale(-1)

    def __mul__(self, other):
        if not isinstance(other, HomogeneousForm):
            return self.scale(other)
        if self.n != other.n:
            raise InvalidShape("forms must share ambient dimension")
        moving = self.is_moving or other.is_moving
        out = {}
        for ia, a in self.coeffs.items():
            for ib, b in other.coeffs.items():
                k = tuple(x + y for x, y in zip(ia, ib))
                if moving:
                    a, b = UniRational.coerce(a), UniRational.coerce(b)
                out[k] = out[k] + a * b if k in out else a * b
        return HomogeneousForm(self.n, self.d + other.d, out)

    def __pow__(self, k: int):
        if k < 1:
            raise ValueError("power must be positive")
        result = self
        for _ in range(k - 1):
            result = result * self
        return result

    def normalized(self) -> "HomogeneousForm":
        """Divide by the coefficient of the lexicographically first monomial present."""
        lead = next(iter(self.coeffs.values()))
        if self.is_moving:
            return self.scale(UniRational.coerce(1) / lead)
        return self.scale(ONE / lead)

    def freeze(self, z0) -> "HomogeneousForm":
        from .curves import freeze_moving

        return freeze_moving(self, z0)

    def norm(self) -> float:
        """Euclidean norm of the coefficient vector (fixed forms only)."""
        if self.is_moving:
            raise ValueError("norm of a moving form is a function of z")
        return math.sqrt(sum(float(c.norm()) for c in self.coeffs.values()))

    def to_json(self) -> dict:
        terms = []
        for idx, c in self.coeffs.items():
            coeff = c.to_json() if isinstance(c, UniRational) else format_scalar(c)
            terms.append({"index": list(idx), "coeff": coeff})
        return {"n": self.n, "d": self.d, "terms": terms}

    @classmethod
    def from_json(cls, data: dict) -> "HomogeneousForm":
        try:
            n, d = int(data["n"]), int(data["d"])
            raw = data["terms"]
        except (KeyError, TypeError) as exc:
            raise InvalidShape(f"malformed form specification: {exc}") from exc
        coeffs = {}
        for t in raw:
            c = t["coeff"]
            coeffs[tuple(t["index"])] = UniRational.from_json(c) if isinstance(c, dict) else parse_scalar(c)
        return cls(n, d, coeffs)


def form(n: int, terms) -> HomogeneousForm:
    """Shorthand: ``form(1, {(1, 0): 1, (0, 1): -1})``."""
    return HomogeneousForm.from_terms(n, terms)


def linear_form(coeffs) -> HomogeneousForm:
    coeffs = list(coeffs)
    n = len(coeffs) - 1
    terms = {}
    for k, c in enumerate(coeffs):
        idx = [0] * (n + 1)
        idx[k] = 1
        terms[tuple(idx)] = c
    return HomogeneousForm(n, 1, terms)


def form_eval(Q: HomogeneousForm, w):
    """Evaluate a fixed form at the point ``w`` of C^(n+1)."""
    if Q.is_moving:
        raise ValueError("freeze a moving form before evaluating it at a point")
    if len(w) != Q.n + 1:
        raise InvalidShape("point has the wrong number of coordinates")
    total = 0
    for idx, c in Q.coeffs.items():
        term = c
        for wi, e in zip(w, idx):
            if e:
                term = term * (wi ** e)
        total = term + total
    return total


class ComposedFunction:
    """``numer(z) / den(z)`` with an exponential-polynomial numerator and polynomial denominator."""

    __slots__ = ("numer", "den")

    def __init__(self, numer: ExpPoly, den: Poly | None = None):
        self.numer = ExpPoly.coerce(numer)
        self.den = Poly.const(1) if den is None else den
        if self.den.is_zero():
            raise ZeroDivisionError("zero denominator")

    def is_polynomial(self) -> bool:
        return self.numer.is_polynomial() and self.den.is_constant()

    def is_entire_polynomial_ratio(self) -> bool:
        return self.numer.is_polynomial()

    def as_rational(self) -> UniRational:
        return UniRational(self.numer.as_poly(), self.den)

    def __call__(self, z):
        if isinstance(z, np.ndarray):
            return self.numer.eval_numeric(z) / self.den.eval_numeric(z)
        if self.numer.is_polynomial():
            return self.as_rational()(z)
        zc = complex(z)
        return complex(self.numer.eval_numeric(np.array([zc]))[0] / self.den.eval_numeric(np.array([zc]))[0])

    def __eq__(self, other):
        if not isinstance(other, ComposedFunction):
            return NotImplemented
        return self.numer * other.den == other.numer * self.den

    def __hash__(self):
        return hash(self.numer)

    def __repr__(self):
        if self.den.is_constant() and self.den.lead == 1:
            return f"ComposedFunction({self.numer!r})"
        return f"ComposedFunction({self.numer!r} / {self.den!r})"


def _lcm(a: Poly, b: Poly) -> Poly:
    from .poly import poly_gcd

    return (a * b // poly_gcd(a, b)).monic()


def compose_with_curve(Q: HomogeneousForm, f) -> ComposedFunction:
    """Substitute the reduced representation of ``f`` into ``Q``.

    ``f`` is anything with ``n`` and ``components`` (a list of :class:`ExpPoly`).
    Raises :class:`IdenticallyZero` when the result vanishes identically.
    """
    if Q.n != f.n:
        raise InvalidShape(f"form lives in P^{Q.n} but the curve maps to P^{f.n}")
    comps = [ExpPoly.coerce(c) for c in f.components]
    powers = [[ExpPoly.coerce(1)] for _ in comps]

    def power(s, e):
        while len(powers[s]) <= e:
            powers[s].append(powers[s][-1] * comps[s])
        return powers[s][e]

    den = Poly.const(1)
    if Q.is_moving:
        for c in Q.coeffs.values():
            den = _lcm(den, c.den)
    numer = ExpPoly()
    for idx, c in Q.coeffs.items():
        mono = ExpPoly.coerce(1)
        for s, e in enumerate(idx):
            if e:
                mono = mono * power(s, e)
        if isinstance(c, UniRational):
            coeff = ExpPoly.coerce(c.num * (den // c.den))
        else:
            coeff = ExpPoly.coerce(c)
        numer = numer + coeff * mono
    if numer.is_zero():
        raise IdenticallyZero(f"{Q!r} vanishes identically along the curve")
    return ComposedFunction(numer, den)
