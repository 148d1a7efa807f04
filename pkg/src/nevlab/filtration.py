"""Quotient dimensions, filtration weights and the explicit truncation constants."""

from __future__ import annotations

import math
import sys
import warnings
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import mpmath

from .errors import BoundViolated, InvalidShape, NotDivisible
from .macaulay import macaulay_matrix, rank

# L0 is kept as an exact integer up to this many decimal digits
MAX_EXACT_DIGITS = 200_000


@contextmanager
def _int_digits(n):
    get = getattr(sys, "get_int_max_str_digits", None)
    if get is None:
        yield
        return
    old = get()
    if old and old < n + 10:
        sys.set_int_max_str_digits(n + 10)
    try:
        yield
    finally:
        sys.set_int_max_str_digits(old)


def int_to_decimal(x: int) -> str:
    digits = int(x.bit_length() * 0.30103) + 2
    with _int_digits(digits):
        return str(x)


def decimal_to_int(s: str) -> int:
    with _int_digits(len(s)):
        return int(s)


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def ceil_int(x) -> int:
    """Smallest integer not less than ``x`` (exact for rationals)."""
    x = as_fraction(x)
    return -((-x.numerator) // x.denominator)


def quotient_dim_combinatorial(n: int, d: int, L: int) -> int:
    """Number of n-tuples with entries in [0, d-1] and sum at most ``L``."""
    if n < 1 or d < 1 or L < 0:
        raise InvalidShape("need n >= 1, d >= 1, L >= 0")
    total = 0
    for j in range(n + 1):
        rest = L - j * d
        if rest < 0:
            break
        total += (-1) ** j * comb(n, j) * comb(rest + n, n)
    return total


def quotient_dim_rank(P, L: int) -> int:
    """``dim V_L / ((P_1..P_n) ∩ V_L)`` from the rank of the degree-L Macaulay matrix."""
    P = list(P)
    if not P:
        raise InvalidShape("need at least one form")
    n = P[0].n
    usable = [F for F in P if F.d <= L]
    cols = comb(L + n, n)
    if not usable:
        return cols
    return cols - rank(macaulay_matrix(usable, L))


@dataclass(frozen=True)
class FiltrationProfile:
    n: int
    d: int
    L: int
    K: int
    levels: tuple  # (level l, weight m(l), number of tuples at level l)
    A: int
    A_bound: int

    def weight(self, level: int) -> int:
        return self.levels[level][1]

    def tuples(self):
        """The n-tuples (i)_k with norm <= L/d in lexicographic order."""
        top = self.L // self.d

        def rec(k, budget):
            if k == 0:
                yield ()
                return
            for first in range(budget + 1):
                for rest in rec(k - 1, budget - first):
                    yield (first,) + rest

        return rec(self.n, top)

    def weights(self):
        return [self.weight(sum(t)) for t in self.tuples()]

    def coordinate_sums(self):
        """``sum_k m_k * i_{sk}`` for each coordinate s, by explicit enumeration."""
        sums = [0] * self.n
        for t in self.tuples():
            m = self.weight(sum(t))
            for s, v in enumerate(t):
                sums[s] += m * v
        return sums

    def to_json(self):
        return {
            "n": self.n, "d": self.d, "L": self.L, "K": self.K, "A": self.A, "A_bound": self.A_bound,
            "levels": [list(x) for x in self.levels],
        }


def filtration_profile(n: int, d: int, L: int) -> FiltrationProfile:
    if n < 1 or d < 1 or L < 0:
        raise InvalidShape("need n >= 1, d >= 1, L >= 0")
    if L % d:
        raise NotDivisible(f"d={d} does not divide L={L}")
    top = L // d
    levels = []
    A = 0
    for l in range(top + 1):
        m = quotient_dim_combinatorial(n, d, L - d * l)
        count = comb(l + n - 1, n - 1)
        levels.append((l, m, count))
        # each coordinate of the level-l tuples sums to l*count/n = C(l+n-1, n)
        A += m * comb(l + n - 1, n)
    K = comb(top + n, n)
    bound = d ** n * comb(top, n + 1)
    if A < bound:
        raise BoundViolated(f"A={A} < d^n C(L/d, n+1) = {bound}")
    return FiltrationProfile(n, d, L, K, tuple(levels), A, bound)


def truncation_degree(n: int, N: int, d: int, eps) -> int:
    eps = as_fraction(eps)
    return (n + 1) * d + 2 * (N - n + 1) * (n + 1) ** 3 * ceil_int(1 / eps) * d


class HugeInt:
    """``base * p**e - 1`` when it is too large to expand; compared by magnitude."""

    def __init__(self, base: int, p: int, e: int):
        self.base, self.p, self.e = base, p, e
        with mpmath.workdps(40 + len(str(e))):
            lg = mpmath.log10(base) + e * mpmath.log10(p)
            self.digits = int(mpmath.floor(lg)) + 1
            frac = lg - mpmath.floor(lg)
            self.leading = mpmath.nstr(mpmath.power(10, frac), 20, min_fixed=-1, max_fixed=2)

    def __gt__(self, other):
        if isinstance(other, HugeInt):
            return self.digits > other.digits
        return len(str(abs(int(other)))) < self.digits

    def __lt__(self, other):
        return False if not isinstance(other, HugeInt) else other > self

    def __ge__(self, other):
        return self > other

    def __repr__(self):
        return f"HugeInt({self.base}*{self.p}^{self.e}-1, ~{self.leading}e{self.digits - 1})"


def truncate(level, cap):
    """``min(level, cap)`` where either side may be None (infinite) or a :class:`HugeInt`."""
    if cap is None:
        return level
    if level is None:
        return cap
    if isinstance(level, HugeInt):
        return cap if level > cap else level
    if isinstance(cap, HugeInt):
        return level if cap > level else cap
    return min(level, cap)


@dataclass
class TheoremConstants:
    n: int
    N: int
    q: int
    epsilon: Fraction
    degrees: tuple
    d: int
    L: int
    u: int
    B_bound: int
    p0: int
    L0: object  # int or HugeInt
    L0_digits: int
    L0_leading: str
    per_target: list = field(default_factory=list)
    vacuous: bool = False
    warnings: list = field(default_factory=list)

    @property
    def L0_exact(self) -> bool:
        return isinstance(self.L0, int)

    def to_json(self) -> dict:
        return {
            "inputs": {
                "n": self.n, "N": self.N, "q": self.q, "epsilon": str(self.epsilon), "degrees": list(self.degrees),
            },
            "d": self.d,
            "L": str(self.L),
            "u": str(self.u),
            "B_bound": str(self.B_bound),
            "p0": str(self.p0),
            "L0": int_to_decimal(self.L0) if self.L0_exact else None,
            "L0_exact": self.L0_exact,
            "L0_formula": f"{self.u}*{self.p0}^{self.B_bound - 2}-1",
            "L0_digits": self.L0_digits,
            "L0_leading": self.L0_leading,
            "per_target": self.per_target,
            "vacuous": self.vacuous,
            "warnings": list(self.warnings),
        }


def _p0(B: int, x: Fraction) -> int:
    """``floor((B - 1) / ln(1 + x))**2`` with enough precision to make the floor exact."""
    dps = len(str(B)) + 30
    for _ in range(6):
        with mpmath.workdps(dps):
            val = mpmath.mpf(B - 1) / mpmath.log1p(mpmath.mpf(x.numerator) / x.denominator)
            fl = mpmath.floor(val)
            if val - fl > mpmath.mpf(10) ** (-15) and fl + 1 - val > mpmath.mpf(10) ** (-15):
                return int(fl) ** 2
        dps *= 2
    raise ArithmeticError("could not isolate floor for p0")


def theorem_constants(n: int, N: int, q: int, eps, degrees, max_exact_digits: int = MAX_EXACT_DIGITS) -> TheoremConstants:
    eps = as_fraction(eps)
    degrees = tuple(int(x) for x in degrees)
    if not (N >= n >= 1):
        raise InvalidShape(f"need N >= n >= 1 (got n={n}, N={N})")
    if q < N + 1:
        raise InvalidShape(f"need q >= N+1 (got q={q}, N={N})")
    if eps <= 0:
        raise InvalidShape("epsilon must be positive")
    if len(degrees) != q or any(x < 1 for x in degrees):
        raise InvalidShape("need q degrees, each at least 1")
    notes = []
    vacuous = q <= (N - n + 1) * (n + 1)
    if vacuous:
        msg = f"q={q} <= (N-n+1)(n+1)={(N - n + 1) * (n + 1)}: the inequality is vacuous"
        notes.append(msg)
        warnings.warn(msg, stacklevel=2)
    d = math.lcm(*degrees)
    L = truncation_degree(n, N, d, eps)
    u = comb(L + n, n)
    B = u * (u - 1) * comb(q, n)
    p0 = _p0(B, eps / (3 * (n + 1) * (N - n + 1)))
    probe = HugeInt(u, p0, B - 2)
    if probe.digits <= max_exact_digits:
        L0 = u * p0 ** (B - 2) - 1
        digits_str = int_to_decimal(L0)
        digits, leading = len(digits_str), digits_str[:20]
    else:
        L0, digits, leading = probe, probe.digits, probe.leading.replace(".", "")[:20]
    notes.append("truncation applied uniformly at L0; the per-target L0/d_j values are reported only")
    per_target = []
    for j, dj in enumerate(degrees, start=1):
        if isinstance(L0, int):
            Lj = Fraction(L0, dj)
            text = int_to_decimal(Lj.numerator) + ("" if Lj.denominator == 1 else f"/{Lj.denominator}")
        else:
            text = None
        per_target.append({"target": j, "d": dj, "L_j": text})
    return TheoremConstants(n, N, q, eps, degrees, d, L, u, B, p0, L0, digits, leading, per_target, vacuous, notes)


@dataclass(frozen=True)
class RatioReport:
    n: int
    N: int
    d: int
    epsilon: Fraction
    L: int
    u: int
    A: int
    ratio: Fraction  # uL/(dA)
    ratio_bound: Fraction  # n+1+eps/(2(N-n+1))
    step_ratio: Fraction  # (n+1)d/(L-(n+1)d)
    step_bound: Fraction  # 1/(2(n+1)^2)
    power_samples: tuple  # (x, (1+x)^n, 1+(n+1)x)
    final_bound: bool  # worst-case t/s factor keeps tuL/(dAs) <= n+1+eps/(N-n+1)

    @property
    def ok(self) -> bool:
        return (
            self.ratio <= self.ratio_bound
            and self.step_ratio <= self.step_bound
            and all(lhs <= rhs for _, lhs, rhs in self.power_samples)
        )


def ratio_bound_check(n: int, N: int, d: int, eps, samples: int = 16) -> RatioReport:
    eps = as_fraction(eps)
    if not (N >= n >= 1) or d < 1 or eps <= 0:
        raise InvalidShape("need N >= n >= 1, d >= 1, eps > 0")
    L = truncation_degree(n, N, d, eps)
    prof = filtration_profile(n, d, L)
    u = comb(L + n, n)
    ratio = Fraction(u * L, d * prof.A)
    bound = n + 1 + eps / (2 * (N - n + 1))
    step = Fraction((n + 1) * d, L - (n + 1) * d)
    step_bound = Fraction(1, 2 * (n + 1) ** 2)
    xmax = Fraction(1, (n + 1) ** 2)
    pts = []
    for k in range(samples + 1):
        x = xmax * k / samples
        pts.append((x, (1 + x) ** n, 1 + (n + 1) * x))
    growth = 1 + eps / (3 * (n + 1) * (N - n + 1))
    final = growth * bound <= n + 1 + eps / (N - n + 1)
    rep = RatioReport(n, N, d, eps, L, u, prof.A, ratio, bound, step, step_bound, tuple(pts), final)
    if not rep.ok:
        raise BoundViolated(f"ratio estimates fail for n={n}, N={N}, d={d}, eps={eps}")
    return rep
