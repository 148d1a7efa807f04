"""Certificates for (sub)general position and general-position combinations."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .curves import freeze_moving, sample_points
from .errors import InvalidShape, NoValidSample, PoleAtSample, RetriesExhausted, ZeroAtSample
from .forms import HomogeneousForm, linear_form
from .macaulay import full_column_count, macaulay_matrix, rank
from .scalars import format_scalar

CERTIFIED = "Certified"
NOT_CERTIFIED = "NotCertified"

DEFAULT_MAX_RETRIES = 32
DEFAULT_SLICE_RETRIES = 8


@dataclass(frozen=True)
class SubsetCheck:
    indices: tuple
    D: int
    rank: int
    columns: int

    @property
    def full(self) -> bool:
        return self.rank == self.columns

    def to_json(self):
        return {"indices": list(self.indices), "D": self.D, "rank": self.rank, "columns": self.columns}


@dataclass(frozen=True)
class PositionCertificate:
    verdict: str
    sample: object = None
    subsets: tuple = ()
    seed: int | None = None

    @property
    def certified(self) -> bool:
        return self.verdict == CERTIFIED

    def __bool__(self):
        return self.certified

    def to_json(self):
        return {
            "verdict": self.verdict,
            "seed": self.seed,
            "sample": None if self.sample is None else format_scalar(self.sample),
            "subsets": [s.to_json() for s in self.subsets],
        }


def macaulay_degree(degrees, n: int) -> int:
    """``sum(d_i - 1) + 1`` over the n+1 largest degrees (all of them if there are fewer)."""
    top = sorted(degrees, reverse=True)[: n + 1]
    return sum(d - 1 for d in top) + 1


def _check(forms, indices) -> SubsetCheck:
    n = forms[0].n
    D = macaulay_degree([F.d for F in forms], n)
    M = macaulay_matrix(forms, D)
    return SubsetCheck(tuple(indices), D, rank(M), full_column_count(n, D))


def empty_certificate(forms, seed=None, sample=None) -> PositionCertificate:
    """Certify that fixed forms have no common zero in P^n.

    Full column rank of the Macaulay matrix at the Macaulay degree proves
    emptiness; anything else is reported as NotCertified.
    """
    forms = list(forms)
    if not forms:
        raise InvalidShape("need at least one form")
    if any(F.d < 1 for F in forms):
        raise InvalidShape("forms must have degree at least 1")
    chk = _check(forms, range(len(forms)))
    verdict = CERTIFIED if chk.full and len(forms) >= forms[0].n + 1 else NOT_CERTIFIED
    return PositionCertificate(verdict, sample, (chk,), seed)


def _freeze_all(Q, z0):
    return [freeze_moving(F, z0) for F in Q]


def check_subgeneral_position(Q, N: int, samples=None, seed: int = 0, sample_count: int = 16) -> PositionCertificate:
    """Weakly N-subgeneral position: at one sample point every N+1 of the frozen forms have no common zero."""
    Q = list(Q)
    q = len(Q)
    if not Q:
        raise InvalidShape("empty family")
    n = Q[0].n
    if any(F.n != n for F in Q):
        raise InvalidShape("forms must share the ambient dimension")
    if not (q >= N + 1 >= n + 1):
        raise InvalidShape(f"need q >= N+1 >= n+1, got q={q}, N={N}, n={n}")
    moving = any(F.is_moving for F in Q)
    if not moving:
        candidates = [None]
    else:
        candidates = list(samples) if samples is not None else sample_points(seed, sample_count)

    first = None
    valid = 0
    for z0 in candidates:
        try:
            frozen = Q if z0 is None else _freeze_all(Q, z0)
        except (PoleAtSample, ZeroAtSample):
            continue
        valid += 1
        checks = []
        ok = True
        for subset in itertools.combinations(range(q), N + 1):
            chk = _check([frozen[i] for i in subset], subset)
            checks.append(chk)
            if not chk.full:
                ok = False
                break
        cert = PositionCertificate(CERTIFIED if ok else NOT_CERTIFIED, z0, tuple(checks), seed)
        if ok:
            return cert
        if first is None:
            first = cert
    if valid == 0:
        raise NoValidSample("every sample point hits a pole or an all-zero freeze")
    return first


@dataclass(frozen=True)
class DimensionCertificate:
    certified: bool
    k: int
    slices: tuple = ()
    attempts: int = 0
    check: SubsetCheck | None = None

    def __bool__(self):
        return self.certified

    def to_json(self):
        return {
            "certified": self.certified,
            "k": self.k,
            "attempts": self.attempts,
            "slices": [list(s) for s in self.slices],
            "check": None if self.check is None else self.check.to_json(),
        }


def dim_at_most(forms, k: int, seed=0, retries: int = DEFAULT_SLICE_RETRIES, height: int = 8) -> DimensionCertificate:
    """Certify ``dim V(forms) <= k`` by cutting with k+1 random hyperplanes.

    ``k = -1`` asks for emptiness (no slices).
    """
    forms = list(forms)
    n = forms[0].n
    if not -1 <= k <= n:
        raise InvalidShape(f"k must lie in [-1, {n}]")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    H = height
    attempts = 0
    last = None
    for _ in range(max(1, retries) if k >= 0 else 1):
        attempts += 1
        slices = []
        while len(slices) < k + 1:
            c = tuple(rng.randint(-H, H) for _ in range(n + 1))
            if any(c):
                slices.append(c)
        family = forms + [linear_form(c) for c in slices]
        chk = _check(family, range(len(family)))
        last = (tuple(slices), chk)
        if chk.full and len(family) >= n + 1:
            return DimensionCertificate(True, k, tuple(slices), attempts, chk)
        H *= 2
    return DimensionCertificate(False, k, last[0], attempts, last[1])


@dataclass(frozen=True)
class CombinationRecipe:
    coefficients: dict  # t -> tuple of c_tj for j = 2..N-n+t
    forms: tuple  # P_1..P_{n+1}
    prefix_certificates: tuple = ()
    final: PositionCertificate | None = None
    seed: int | None = None
    attempts: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "seed": self.seed,
            "coefficients": {str(t): list(c) for t, c in self.coefficients.items()},
            "forms": [P.to_json() for P in self.forms],
            "prefix_certificates": [c.to_json() for c in self.prefix_certificates],
            "final": None if self.final is None else self.final.to_json(),
            "attempts": {str(t): a for t, a in self.attempts.items()},
        }


def combine(Q, t: int, coeffs) -> HomogeneousForm:
    """``P_t = sum_{j=2}^{N-n+t} c_tj Q_j`` (1-based ``j`` as in the recipe)."""
    Q = list(Q)
    n, N = Q[0].n, len(Q) - 1
    top = N - n + t
    coeffs = list(coeffs)
    if len(coeffs) != top - 1:
        raise InvalidShape(f"P_{t} takes {top - 1} coefficients, got {len(coeffs)}")
    acc = None
    for c, F in zip(coeffs, Q[1:top]):
        if c == 0:
            continue
        term = F.scale(c)
        acc = term if acc is None else acc + term
    if acc is None:
        raise InvalidShape("all combination coefficients are zero")
    return acc


def build_general_position(Q, seed: int = 0, max_retries: int = DEFAULT_MAX_RETRIES, height: int = 2) -> CombinationRecipe:
    """Turn N+1 frozen forms of one degree into n+1 forms in weakly general position.

    P_1 = Q_1; each P_t (t = 2..n+1) is a random integer combination of
    Q_2..Q_{N-n+t}, accepted once ``dim(P_1 ∩ .. ∩ P_t) <= n - t`` is certified.
    """
    Q = list(Q)
    if any(F.is_moving for F in Q):
        raise InvalidShape("freeze the forms at the working sample first")
    n, N = Q[0].n, len(Q) - 1
    if N < n:
        raise InvalidShape(f"need at least n+1 = {n + 1} forms")
    if len({F.d for F in Q}) != 1:
        raise InvalidShape("forms must share one degree")
    rng = random.Random(seed)
    P = [Q[0]]
    coefficients, certs, attempts = {}, [], {}
    trace = []
    for t in range(2, n + 2):
        H = height
        accepted = False
        for attempt in range(1, max_retries + 1):
            c = tuple(rng.randint(-H, H) for _ in range(N - n + t - 1))
            slice_seed = rng.randrange(1 << 32)
            if not any(c):
                trace.append((t, c, "zero vector"))
                continue
            try:
                Pt = combine(Q, t, c)
            except InvalidShape:
                trace.append((t, c, "zero form"))
                H *= 2
                continue
            dim = dim_at_most(P + [Pt], n - t, slice_seed)
            if dim.certified:
                P.append(Pt)
                coefficients[t] = c
                certs.append(dim)
                attempts[t] = attempt
                accepted = True
                break
            trace.append((t, c, "dimension not certified"))
            H *= 2
        if not accepted:
            raise RetriesExhausted(f"could not certify P_{t} after {max_retries} draws", seed=seed, trace=trace)
    final = empty_certificate(P, seed=seed)
    if not final.certified:
        raise RetriesExhausted("constructed family failed the final emptiness check", seed=seed, trace=trace)
    return CombinationRecipe(coefficients, tuple(P), tuple(certs), final, seed, attempts)
