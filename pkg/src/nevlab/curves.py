"""Holomorphic curves C -> P^n given by reduced representations."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import AllZero, InvalidShape, PoleAtSample, ZeroAtSample
from .forms import HomogeneousForm
from .poly import ExpPoly, Poly, poly_gcd
from .scalars import QI

POLY = "poly"
EXPPOLY = "exppoly"


class Curve:
    """Reduced representation ``(f_0, ..., f_n)`` of a holomorphic curve into P^n."""

    __slots__ = ("n", "kind", "components")

    def __init__(self, components, kind=None):
        comps = tuple(ExpPoly.coerce(c) for c in components)
        if len(comps) < 2:
            raise InvalidShape("a curve into P^n needs at least two components")
        if all(c.is_zero() for c in comps):
            raise AllZero("every component vanishes identically")
        if kind is None:
            kind = POLY if all(c.is_polynomial() for c in comps) else EXPPOLY
        if kind == POLY and not all(c.is_polynomial() for c in comps):
            raise InvalidShape("polynomial curve with exponential terms")
        if kind not in (POLY, EXPPOLY):
            raise InvalidShape(f"unknown curve class {kind!r}")
        self.n = len(comps) - 1
        self.kind = kind
        self.components = comps

    def polys(self):
        return [c.as_poly() for c in self.components]

    def evaluate(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return np.array([c.eval_numeric(z) for c in self.components])

    def log_norm(self, z) -> np.ndarray:
        """``log ||f(z)||`` without overflow in the squares."""
        vals = np.abs(self.evaluate(z))
        big = vals.max(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            scaled = np.where(big > 0, vals / np.where(big > 0, big, 1.0), 0.0)
            return np.log(big) + 0.5 * np.log(np.sum(scaled * scaled, axis=0))

    def __eq__(self, other):
        return isinstance(other, Curve) and self.kind == other.kind and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        return f"Curve({self.kind}, {list(self.components)})"

    def to_json(self) -> dict:
        if self.kind == POLY:
            comps = [c.as_poly().to_json() for c in self.components]
        else:
            comps = [c.to_json() for c in self.components]
        return {"n": self.n, "class": self.kind, "components": comps}

    @classmethod
    def from_json(cls, data: dict) -> "Curve":
        kind = data.get("class", POLY)
        if kind == POLY:
            comps = [Poly.from_json(c) for c in data["components"]]
            curve = reduce_representation(comps)
        elif kind == EXPPOLY:
            curve = cls([ExpPoly.from_json(c) for c in data["components"]], EXPPOLY)
        else:
            raise InvalidShape(f"unknown curve class {kind!r}")
        if "n" in data and int(data["n"]) != curve.n:
            raise InvalidShape(f"declared n={data['n']} but {curve.n + 1} components given")
        return curve


def reduce_representation(components) -> Curve:
    """Divide polynomial components by their gcd."""
    polys = [c if isinstance(c, Poly) else ExpPoly.coerce(c).as_poly() for c in components]
    if all(p.is_zero() for p in polys):
        raise AllZero("every component vanishes identically")
    g = Poly()
    for p in polys:
        g = poly_gcd(g, p)
    if g.degree > 0:
        polys = [p // g for p in polys]
    return Curve(polys, POLY)


@dataclass(frozen=True)
class GrowthData:
    kind: str
    degree: int | None = None
    max_frequency: float | None = None
    frequencies: tuple = field(default_factory=tuple)


def growth(f: Curve) -> GrowthData:
    if f.kind == POLY:
        return GrowthData(POLY, degree=max(p.degree for p in f.polys() if not p.is_zero()))
    freqs = sorted({lam for c in f.components for lam in c.frequencies}, key=lambda q: (q.re, q.im))
    return GrowthData(EXPPOLY, max_frequency=max(abs(complex(lam)) for lam in freqs), frequencies=tuple(freqs))


def freeze_moving(Q: HomogeneousForm, z0) -> HomogeneousForm:
    """Evaluate every coefficient of a moving form at ``z0``."""
    if not Q.is_moving:
        return Q
    z0 = QI.coerce(z0)
    frozen = {}
    for idx, c in Q.coeffs.items():
        if c.has_pole_at(z0):
            raise PoleAtSample(f"coefficient of x^{list(idx)} has a pole at {z0}")
        frozen[idx] = c(z0)
    if not any(frozen.values()):
        raise ZeroAtSample(f"all coefficients vanish at {z0}")
    return HomogeneousForm(Q.n, Q.d, frozen)


@dataclass(frozen=True)
class SlownessVerdict:
    slow: bool
    rule: str

    def __bool__(self):
        return self.slow


def _constant_ratios(Q: HomogeneousForm) -> bool:
    if not Q.is_moving:
        return True
    coeffs = list(Q.coeffs.values())
    base = coeffs[0]
    return all((c / base).is_constant() for c in coeffs[1:])


def is_slow(Q: HomogeneousForm, f: Curve) -> SlownessVerdict:
    """Decide ``T_{Q'}(r) = o(T_f(r))`` from growth classes.

    Rational coefficient ratios have characteristic O(log r). That is small
    against a transcendental curve (T_f ~ r) but not against a polynomial one
    unless the ratios are constant.
    """
    if _constant_ratios(Q):
        return SlownessVerdict(True, "constant-ratios")
    transcendental = f.kind == EXPPOLY and any(lam != 0 for c in f.components for lam in c.frequencies)
    if transcendental:
        return SlownessVerdict(True, "rational-vs-transcendental")
    return SlownessVerdict(False, "rational-vs-polynomial")


def sample_points(seed: int, count: int):
    """Deterministic Gaussian rationals of growing height."""
    rng = random.Random(seed)
    out = []
    for k in range(count):
        h = 4 * (k + 1)
        a, b = rng.randint(-h, h), rng.randint(-h, h)
        c = rng.randint(1, h)
        out.append(QI(Fraction(a, c), Fraction(b, c)))
    return out


def certify_reduced(f: Curve, r: float) -> bool:
    """Check that the components have no common zero in the closed disk of radius ``r``."""
    if f.kind == POLY:
        g = Poly()
        for p in f.polys():
            g = poly_gcd(g, p)
        return g.degree <= 0
    comps = [c for c in f.components if not c.is_zero()]
    if any(c.is_polynomial() and c.as_poly().degree == 0 for c in comps):
        return True
    from .nevanlinna import isolate_zeros

    # zeros of the cheapest component, then test the others there
    pivot = min(comps, key=lambda c: (not c.is_polynomial(), len(c.terms)))
    divisor = isolate_zeros(pivot, r)
    for z, _ in divisor.zeros:
        vals = [abs(complex(c.eval_numeric(np.array([z]))[0])) for c in comps if c is not pivot]
        scale = max(1.0, abs(z)) ** 2
        if all(v < 1e-8 * scale for v in vals):
            return False
    return True
