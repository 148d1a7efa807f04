"""Characteristic, proximity and counting functions on circles |z| = r."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import BoundaryZero, IdenticallyZero, InvalidShape, NoConvergence
from .forms import ComposedFunction, compose_with_curve
from .poly import ExpPoly, Poly, UniRational, squarefree_decomposition

QUAD_START = 256
QUAD_MAX = 2 ** 18
QUAD_TOL = 1e-10

EXACT_ROOTS = "ExactRoots"
ARGUMENT_PRINCIPLE = "ArgumentPrinciple"

BOUNDARY_REL = 1e-10
NUDGE_REL = 1e-9
BOX_DIAMETER = 1e-8
WINDING_GATE = 1e-3
SPLIT = 0.531
# per-edge accuracy; winding numbers only need to be resolved to WINDING_GATE
EDGE_TOL = 1e-7

_GL = {k: np.polynomial.legendre.leggauss(k) for k in (16, 64)}


# ---------------------------------------------------------------- quadrature

def _circle_nodes(r, n, offset=0.0):
    theta = 2 * np.pi * (np.arange(n) + offset) / n
    return r * np.exp(1j * theta)


def circle_integral(g, r: float, quad: int = QUAD_START, tol: float = QUAD_TOL, max_nodes: int = QUAD_MAX) -> float:
    """Mean of ``g`` over the circle |z| = r by the trapezoid rule.

    ``g`` maps a complex array to a real array. The node count doubles (new
    nodes at the midpoints) until two estimates agree to ``tol``.
    """
    n = int(quad)
    est = float(np.mean(g(_circle_nodes(r, n))))
    while n < max_nodes:
        mid = float(np.mean(g(_circle_nodes(r, n, 0.5))))
        new = 0.5 * (est + mid)
        n *= 2
        if abs(new - est) <= tol * max(1.0, abs(new)):
            return new
        est = new
    raise NoConvergence(f"circle integral at r={r} did not settle with {max_nodes} nodes")


def circle_mean_complex(g, r: float, quad: int = QUAD_START, tol: float = 1e-9, max_nodes: int = QUAD_MAX) -> complex:
    n = int(quad)
    est = complex(np.mean(g(_circle_nodes(r, n))))
    while n < max_nodes:
        mid = complex(np.mean(g(_circle_nodes(r, n, 0.5))))
        new = 0.5 * (est + mid)
        n *= 2
        if abs(new - est) <= tol * max(1.0, abs(new)):
            return new
        est = new
    raise NoConvergence(f"complex circle mean at r={r} did not settle")


def _arc_integral(h, r, a, b, tol, depth=0):
    """Adaptive Gauss-Legendre integral of h(r e^{it}) dt over [a, b]."""
    x, w = _GL[64]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    whole = half * float(np.dot(w, h(r * np.exp(1j * (mid + half * x)))))
    left_mid, right_mid, q = 0.5 * (a + mid), 0.5 * (mid + b), 0.5 * half
    split = q * float(np.dot(w, h(r * np.exp(1j * (left_mid + q * x))))) + q * float(
        np.dot(w, h(r * np.exp(1j * (right_mid + q * x))))
    )
    if abs(split - whole) <= tol * max(1.0, abs(split)) or depth > 30:
        if depth > 30:
            raise NoConvergence(f"arc integral on [{a}, {b}] at r={r} did not settle")
        return split
    return _arc_integral(h, r, a, mid, tol, depth + 1) + _arc_integral(h, r, mid, b, tol, depth + 1)


def _bisect_angle(h, r, a, b, iters=80):
    fa = float(h(np.array([r * np.exp(1j * a)]))[0])
    for _ in range(iters):
        m = 0.5 * (a + b)
        fm = float(h(np.array([r * np.exp(1j * m)]))[0])
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
        if b - a < 1e-15:
            break
    return 0.5 * (a + b)


def positive_part_integral(h, r: float, samples: int = 4096, tol: float = QUAD_TOL) -> float:
    """Circle mean of ``max(h, 0)``.

    Sign changes of ``h`` are located and each positive arc is integrated
    separately, so the kink of the positive part never spoils convergence.
    """
    theta = 2 * np.pi * np.arange(samples) / samples
    vals = h(r * np.exp(1j * theta))
    pos = vals > 0
    if pos.all():
        return circle_integral(h, r, tol=tol)
    if not pos.any():
        return 0.0
    cuts = []
    for k in np.nonzero(pos != np.roll(pos, -1))[0]:
        a, b = theta[k], theta[k] + 2 * np.pi / samples
        cuts.append(_bisect_angle(h, r, a, b))
    cuts.sort()
    total = 0.0
    for k, a in enumerate(cuts):
        b = cuts[k + 1] if k + 1 < len(cuts) else cuts[0] + 2 * np.pi
        m = 0.5 * (a + b)
        if float(h(np.array([r * np.exp(1j * m)]))[0]) > 0:
            total += _arc_integral(h, r, a, b, tol)
    return total / (2 * np.pi)


# ---------------------------------------------------------------- functionals

@lru_cache(maxsize=4096)
def _log_norm_mean(f, r: float) -> float:
    return circle_integral(f.log_norm, r)


def characteristic(f, r: float) -> float:
    """``T_f(r)``: circle mean of log||f|| at r minus the same at radius 1."""
    if r < 1:
        raise InvalidShape("the characteristic is defined for r >= 1")
    return _log_norm_mean(f, float(r)) - _log_norm_mean(f, 1.0)


def proximity(phi, r: float, log_abs=None) -> float:
    """``m(r, phi)``: circle mean of log+|phi|.

    Pass ``log_abs`` (z -> log|phi(z)|) instead of ``phi`` to avoid overflow.
    """
    if log_abs is None:
        def log_abs(z):
            with np.errstate(divide="ignore"):
                return np.log(np.abs(_evaluate(phi, z)))

    return positive_part_integral(log_abs, r)


def _evaluate(g, z):
    if isinstance(g, (Poly, ExpPoly, ComposedFunction)):
        return g.eval_numeric(z) if not isinstance(g, ComposedFunction) else g(z)
    if isinstance(g, UniRational):
        return g.num.eval_numeric(z) / g.den.eval_numeric(z)
    return g(z)


# ---------------------------------------------------------------- zeros

@dataclass
class ZeroDivisor:
    radius: float
    zeros: list  # (location, multiplicity)
    method: str
    residues: list = field(default_factory=list)
    requested_radius: float | None = None
    disk_winding: int | None = None

    @property
    def nudged(self) -> bool:
        return self.requested_radius is not None and self.requested_radius != self.radius

    def degree(self) -> int:
        return sum(m for _, m in self.zeros)

    def restrict(self, r: float) -> "ZeroDivisor":
        if r > self.radius * (1 + 1e-12):
            raise InvalidShape(f"divisor known up to r={self.radius}, asked for r={r}")
        keep = [(z, m) for z, m in self.zeros if abs(z) <= r]
        return ZeroDivisor(r, keep, self.method, [], r, None)

    def to_json(self):
        return {
            "radius": self.radius,
            "method": self.method,
            "zeros": [{"re": z.real, "im": z.imag, "mult": m} for z, m in self.zeros],
        }


def aberth_roots(p: Poly, tol: float = 1e-14, max_iter: int = 800) -> np.ndarray:
    """All complex roots of a polynomial by Aberth-Ehrlich simultaneous iteration."""
    c = p.numeric_coeffs()
    n = len(c) - 1
    if n < 1:
        return np.zeros(0, dtype=complex)
    c = c / c[-1]
    if n == 1:
        return np.array([-c[0]])
    # Fujiwara-type radius for the starting circle
    R = 2 * max(abs(c[k]) ** (1.0 / (n - k)) for k in range(n))
    R = max(R, 1e-3)
    z = R * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    dc = np.arange(1, n + 1) * c[1:]
    for _ in range(max_iter):
        pz = np.polyval(c[::-1], z)
        dpz = np.polyval(dc[::-1], z)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = pz / dpz
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            # the unit diagonal contributes exactly 1 to each row sum
            s = np.sum(1.0 / diff, axis=1) - 1.0
            step = w / (1 - w * s)
        step = np.where(np.isfinite(step), step, 0.0)
        z = z - step
        if np.all(np.abs(step) <= tol * np.maximum(1.0, np.abs(z))):
            break
    # Newton polish
    for _ in range(3):
        pz = np.polyval(c[::-1], z)
        dpz = np.polyval(dc[::-1], z)
        ok = dpz != 0
        z = np.where(ok, z - np.where(ok, pz / np.where(ok, dpz, 1), 0), z)
    return z


def _poly_zeros(p: Poly):
    out = []
    for factor, mult in squarefree_decomposition(p):
        if factor.degree < 1:
            continue
        for z in aberth_roots(factor):
            out.append((complex(z), mult))
    return out


def _as_parts(g):
    """Split ``g`` into (numerator ExpPoly, denominator Poly)."""
    if isinstance(g, ComposedFunction):
        return g.numer, g.den
    if isinstance(g, UniRational):
        return ExpPoly.coerce(g.num), g.den
    if isinstance(g, (Poly, ExpPoly)):
        return ExpPoly.coerce(g), Poly.const(1)
    raise InvalidShape(f"cannot isolate zeros of {type(g).__name__}")


def _single_term(e: ExpPoly):
    """``p(z) e^{lam z}`` has the zeros of ``p``."""
    if len(e.terms) == 1:
        return e.terms[0][1]
    return None


def _compile(e: ExpPoly):
    """Numeric evaluator with coefficients converted once."""
    terms = [(complex(lam), [complex(c) for c in p.coeffs[::-1]]) for lam, p in e.terms]

    def ev(z):
        acc = 0
        for lam, cs in terms:
            v = cs[0]
            for c in cs[1:]:
                v = v * z + c
            acc = acc + (v * np.exp(lam * z) if lam else v)
        return acc

    return ev


def _logderiv(numer: ExpPoly):
    g, dg = _compile(numer), _compile(numer.derivative())
    return lambda z: dg(z) / g(z)


def _box_winding(ld, corners, budget=4000):
    """Winding number of g around a counterclockwise polygon, from ``ld = g'/g``."""
    total = 0j
    for k in range(4):
        total += _edge_integral(ld, corners[k], corners[(k + 1) % 4], [budget])
    return total / (2j * np.pi)


def _edge_integral(ld, a, b, budget):
    """Adaptive Gauss-Legendre integral of ``ld`` along [a, b]; NaN once ``budget`` panels are spent."""
    budget[0] -= 1
    if budget[0] < 0:
        return complex("nan")
    x, wts = _GL[16]
    z = np.concatenate([0.5 * (a + b) + 0.5 * (b - a) * x, 0.75 * a + 0.25 * b + 0.25 * (b - a) * x,
                        0.25 * a + 0.75 * b + 0.25 * (b - a) * x])
    v = ld(z)
    k = len(x)
    whole = 0.5 * (b - a) * np.dot(wts, v[:k])
    split = 0.25 * (b - a) * (np.dot(wts, v[k:2 * k]) + np.dot(wts, v[2 * k:]))
    if abs(split - whole) <= EDGE_TOL * max(1.0, abs(split)):
        return split
    m = 0.5 * (a + b)
    return _edge_integral(ld, a, m, budget) + _edge_integral(ld, m, b, budget)


def _rect(x0, x1, y0, y1):
    return [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]


def _integer_winding(ld, box):
    w = _box_winding(ld, _rect(*box))
    if not np.isfinite(w) or abs(w.real - round(w.real)) > WINDING_GATE or abs(w.imag) > WINDING_GATE:
        return None
    return int(round(w.real))


def _argument_principle(ld, R: float):
    """Zeros of an entire function in the square [-R, R]^2 by recursive quadrisection."""
    pad = 1.0 + 1e-3 * math.sqrt(2)
    root = None
    for shift in (0.0, 0.0137, -0.0291, 0.0413):
        box = (-R * pad + shift, R * pad + shift, -R * pad - shift, R * pad - shift)
        w = _integer_winding(ld, box)
        if w is not None:
            root = (box, w)
            break
    if root is None:
        raise NoConvergence("winding number of the enclosing box is not an integer")
    zeros, residues = [], []
    stack = [root]
    while stack:
        (x0, x1, y0, y1), w = stack.pop()
        if w == 0:
            continue
        # a w-fold zero is only determined to about BOX_DIAMETER**(1/w) in double precision
        diam = math.hypot(x1 - x0, y1 - y0)
        if diam < BOX_DIAMETER ** (1.0 / w) * max(1.0, abs(complex(x0, y0))):
            zeros.append((complex(0.5 * (x0 + x1), 0.5 * (y0 + y1)), w))
            residues.append(w)
            continue
        children = None
        for frac in (SPLIT, 0.5 - (SPLIT - 0.5) * 1.7, 0.5 + (SPLIT - 0.5) * 2.9, 0.41, 0.587):
            xm = x0 + frac * (x1 - x0)
            ym = y0 + frac * (y1 - y0)
            boxes = [(x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)]
            ws = [_integer_winding(ld, b) for b in boxes]
            if all(v is not None for v in ws) and sum(ws) == w:
                children = list(zip(boxes, ws))
                break
        if children is None:
            raise NoConvergence(f"could not split box {(x0, x1, y0, y1)} with consistent winding numbers")
        # fixed order keeps the output deterministic
        for child in reversed(children):
            stack.append(child)
    zeros.sort(key=lambda t: (round(t[0].real, 9), round(t[0].imag, 9)))
    return zeros, residues


def _merge(zeros, tol=1e-7):
    out = []
    for z, m in zeros:
        for k, (y, n) in enumerate(out):
            if abs(y - z) <= tol * max(1.0, abs(z)):
                out[k] = (y, n + m)
                break
        else:
            out.append((z, m))
    return out


def _zeros_of_numerator(numer: ExpPoly, R: float):
    if numer.is_polynomial() or _single_term(numer) is not None:
        p = numer.as_poly() if numer.is_polynomial() else _single_term(numer)
        return _poly_zeros(p), EXACT_ROOTS, []
    zeros, residues = _argument_principle(_logderiv(numer), R)
    return zeros, ARGUMENT_PRINCIPLE, residues


def isolate_zeros(g, r: float) -> ZeroDivisor:
    """Zeros (with multiplicity) of a polynomial, rational or exp-polynomial function in |z| <= r."""
    numer, den = _as_parts(g)
    if numer.is_zero():
        raise IdenticallyZero("cannot isolate the zeros of the zero function")
    zeros, method, residues = _zeros_of_numerator(numer, r)
    poles = _poly_zeros(den) if den.degree > 0 else []
    net = []
    for z, m in _merge(zeros):
        for p, k in poles:
            if abs(p - z) <= 1e-7 * max(1.0, abs(z)):
                m -= k
        if m > 0:
            net.append((z, m))

    radius = float(r)
    for attempt in range(2):
        if all(abs(abs(z) - radius) > BOUNDARY_REL * radius for z, _ in net):
            break
        if attempt == 1:
            raise BoundaryZero(f"a zero stays on the circle |z| = {radius} after nudging")
        radius = radius * (1 + NUDGE_REL)
    inside = [(z, m) for z, m in net if abs(z) <= radius]
    div = ZeroDivisor(radius, inside, method, residues, float(r))
    if method == ARGUMENT_PRINCIPLE:
        ld = _logderiv(numer)
        mean = circle_mean_complex(lambda z: z * ld(z), radius)
        if abs(mean.real - round(mean.real)) > WINDING_GATE:
            raise NoConvergence(f"whole-disk winding {mean} is not an integer")
        div.disk_winding = int(round(mean.real))
        counted = sum(m for z, m in _merge(zeros) if abs(z) <= radius)
        if div.disk_winding != counted:
            raise NoConvergence(f"box count {counted} disagrees with disk winding {div.disk_winding}")
    return div


def counting_from_divisor(div: ZeroDivisor, r: float, M=None) -> float:
    """``N^[M](r) = sum min(nu, M) log(r / max(|z|, 1))`` over zeros with |z| <= r."""
    from .filtration import truncate

    total = 0.0
    for z, m in div.zeros:
        a = abs(z)
        if a > r:
            continue
        mult = truncate(m, M)
        total += mult * math.log(r / max(a, 1.0))
    return total


def counting(f, Q, r: float, M=None, divisor: ZeroDivisor | None = None) -> float:
    """Truncated counting function of the pull-back ``Q(f)`` (``M=None`` means no truncation)."""
    if r < 1:
        raise InvalidShape("counting functions start at radius 1")
    if divisor is None:
        divisor = isolate_zeros(compose_with_curve(Q, f), r)
    elif divisor.radius < r * (1 - 1e-12):
        raise InvalidShape("divisor does not reach radius r")
    return counting_from_divisor(divisor, r, M)


# ---------------------------------------------------------------- Wronskian

@dataclass(frozen=True)
class WronskianResult:
    value: ExpPoly
    vanishes: bool

    @property
    def verdict(self) -> str:
        return "IdenticallyZero" if self.vanishes else "Nonzero"


def _det(matrix):
    """Determinant over the ring of exp-polynomials by expansion over column subsets."""
    k = len(matrix)
    # minors[S] = det of rows 0..|S|-1 restricted to columns S
    minors = {(): ExpPoly.coerce(1)}
    for row in range(k):
        nxt = {}
        for cols, val in minors.items():
            if val.is_zero():
                continue
            for j in range(k):
                if j in cols:
                    continue
                # sign of inserting column j into the sorted set
                sign = -1 if sum(1 for c in cols if c > j) % 2 else 1
                key = tuple(sorted(cols + (j,)))
                term = val * matrix[row][j]
                term = term if sign > 0 else -term
                nxt[key] = nxt[key] + term if key in nxt else term
        minors = nxt
    return minors.get(tuple(range(k)), ExpPoly())


def wronskian(functions) -> WronskianResult:
    funcs = [ExpPoly.coerce(g) for g in functions]
    if not funcs:
        raise InvalidShape("need at least one function")
    rows = [funcs]
    for _ in range(len(funcs) - 1):
        rows.append([g.derivative() for g in rows[-1]])
    value = _det(rows)
    return WronskianResult(value, value.is_zero())


# ---------------------------------------------------------------- oracles

def jensen_check(p: Poly, r: float) -> float:
    """Distance between the quadrature of log|p| on |z| = r and its value from the roots."""
    p = Poly(p)
    if p.is_zero():
        raise IdenticallyZero("Jensen's formula needs a nonzero polynomial")
    roots = _poly_zeros(p) if p.degree > 0 else []
    for z, _ in roots:
        if abs(abs(z) - r) <= BOUNDARY_REL * r:
            raise BoundaryZero(f"root {z} lies on |z| = {r}")
    with np.errstate(divide="ignore"):
        quad = circle_integral(lambda z: np.log(np.abs(p.eval_numeric(z))), r)
    exact = math.log(abs(complex(p.lead))) + sum(m * math.log(max(abs(z), r)) for z, m in roots)
    return abs(quad - exact)


def _log_abs_composed(g):
    numer, den = _as_parts(g)

    def h(z):
        with np.errstate(divide="ignore"):
            return np.log(np.abs(numer.eval_numeric(z))) - np.log(np.abs(den.eval_numeric(z)))

    return h


def fmt_residual(f, Q, grid) -> list:
    """``d T_f(r) - N(r, Q(f)) - m(r, ||f||^d / |Q(f)|)`` at each radius of the grid."""
    if Q.is_moving:
        raise InvalidShape("fmt_residual takes a fixed form")
    radii = list(grid)
    g = compose_with_curve(Q, f)
    div = isolate_zeros(g, max(radii))
    lq = _log_abs_composed(g)
    out = []
    for r in radii:
        T = characteristic(f, r)
        N = counting_from_divisor(div, r)
        m = proximity(None, r, log_abs=lambda z: Q.d * f.log_norm(z) - lq(z))
        out.append(Q.d * T - N - m)
    return out


@dataclass
class DefectEstimate:
    value: float
    radii: tuple
    ratios: tuple
    reliable: bool

    def __float__(self):
        return self.value


def defect_estimate(f, Q, M, grid, divisor: ZeroDivisor | None = None) -> DefectEstimate:
    """``1 - min`` over the tail half of the grid of ``N^[M] / (d T_f)``, clamped to [0, 1]."""
    radii = list(grid)
    if divisor is None:
        divisor = isolate_zeros(compose_with_curve(Q, f), max(radii))
    tail = tail_half(radii)
    ratios = []
    for r in tail:
        T = characteristic(f, r)
        ratios.append(counting_from_divisor(divisor, r, M) / (Q.d * T) if T > 0 else math.inf)
    reliable = characteristic(f, max(radii)) > 10
    if not reliable:
        warnings.warn("T_f(r_max) <= 10 on this grid; the defect estimate is rough", stacklevel=2)
    value = min(1.0, max(0.0, 1.0 - min(ratios)))
    return DefectEstimate(value, tuple(tail), tuple(ratios), reliable)


# ---------------------------------------------------------------- grids and export

@dataclass(frozen=True)
class RadiusGrid:
    radii: tuple

    def __post_init__(self):
        rs = tuple(float(r) for r in self.radii)
        if not rs:
            raise InvalidShape("empty radius grid")
        if rs[0] < 1:
            raise InvalidShape("radii must be at least 1")
        if any(b <= a for a, b in zip(rs, rs[1:])):
            raise InvalidShape("radii must be strictly increasing")
        if not all(math.isfinite(r) for r in rs):
            raise InvalidShape("radii must be finite")
        object.__setattr__(self, "radii", rs)

    @classmethod
    def build(cls, rmin: float, rmax: float, count: int, scale: str = "geometric") -> "RadiusGrid":
        if count < 1:
            raise InvalidShape("grid needs at least one radius")
        if count == 1:
            return cls((float(rmin),))
        if scale == "geometric":
            if rmin <= 0:
                raise InvalidShape("geometric grid needs rmin > 0")
            rs = np.geomspace(rmin, rmax, count)
        elif scale == "linear":
            rs = np.linspace(rmin, rmax, count)
        else:
            raise InvalidShape(f"unknown grid scale {scale!r}")
        return cls(tuple(float(r) for r in rs))

    def __iter__(self):
        return iter(self.radii)

    def __len__(self):
        return len(self.radii)

    def tail(self):
        return tail_half(self.radii)


def tail_half(radii):
    radii = list(radii)
    return radii[len(radii) // 2:]


def fmt12(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(x)
    return format(float(x), ".12g")


def functional_rows(f, targets, grid, M=None):
    """Per-radius table: T_f, then N, N^[M], m and the first-main-theorem residual per target."""
    radii = list(grid)
    header = ["r", "T_f"]
    info = []
    for i, Q in enumerate(targets, start=1):
        header += [f"N_{i}", f"N{'' if M is None else M}_{i}", f"m_{i}", f"residual_{i}"]
        g = compose_with_curve(Q, f)
        info.append((Q, isolate_zeros(g, max(radii)), _log_abs_composed(g)))
    rows = []
    for r in radii:
        T = characteristic(f, r)
        row = [r, T]
        for Q, div, lq in info:
            N = counting_from_divisor(div, r)
            NM = counting_from_divisor(div, r, M)
            if Q.is_moving:
                m = float("nan")
            else:
                m = proximity(None, r, log_abs=lambda z, Q=Q, lq=lq: Q.d * f.log_norm(z) - lq(z))
            row += [N, NM, m, Q.d * T - N - m]
        rows.append(row)
    return header, rows


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt12(v) if isinstance(v, (float, int, np.floating)) else v for v in row])
