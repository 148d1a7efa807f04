"""Macaulay matrices of homogeneous forms and their exact rank over Q(i).

Rank is computed exactly. Small matrices use fraction-free (Bareiss)
elimination over the Gaussian integers; larger ones use elimination modulo
primes p = 1 (mod 4), which never overestimates the rank, together with a
Hadamard-bound stopping rule that makes the answer exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb, gcd

import numpy as np

from .errors import InvalidShape
from .forms import HomogeneousForm, monomial_basis
from .scalars import QI

BAREISS_MAX_ENTRIES = 4096


@dataclass(frozen=True)
class MacaulayMatrix:
    D: int
    n: int
    row_index: tuple  # (form position, shifting monomial)
    columns: tuple  # monomials of degree D, lexicographic
    rows: tuple  # one dict column -> QI per row (sparse)

    @property
    def shape(self):
        return (len(self.rows), len(self.columns))

    def dense(self):
        out = []
        for row in self.rows:
            dense_row = [QI(0)] * len(self.columns)
            for j, v in row.items():
                dense_row[j] = v
            out.append(dense_row)
        return out

    @classmethod
    def from_rows(cls, rows, n=0, D=0):
        """Wrap an arbitrary exact matrix (list of lists) so that :func:`rank` accepts it."""
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        sparse = tuple({j: QI.coerce(v) for j, v in enumerate(r) if v} for r in rows)
        return cls(D, n, tuple(range(len(rows))), tuple(range(ncols)), sparse)


def macaulay_matrix(forms, D: int) -> MacaulayMatrix:
    """Rows are ``x^beta * F_i`` for every monomial ``beta`` of degree ``D - deg F_i``."""
    forms = list(forms)
    if not forms:
        raise InvalidShape("need at least one form")
    n = forms[0].n
    for F in forms:
        if F.n != n:
            raise InvalidShape("forms must share the ambient dimension")
        if F.is_moving:
            raise InvalidShape("freeze moving forms before building a Macaulay matrix")
    if D < max(F.d for F in forms):
        raise InvalidShape("D must be at least the largest form degree")
    columns = monomial_basis(n, D)
    col_of = {m: j for j, m in enumerate(columns)}
    row_index, rows = [], []
    for i, F in enumerate(forms):
        for beta in monomial_basis(n, D - F.d):
            row = {}
            for idx, c in F.coeffs.items():
                row[col_of[tuple(a + b for a, b in zip(idx, beta))]] = c
            row_index.append((i, beta))
            rows.append(row)
    return MacaulayMatrix(D, n, tuple(row_index), columns, tuple(rows))


def _integer_rows(M: MacaulayMatrix):
    # scale each row by the lcm of its denominators; rank is unchanged
    out = []
    for row in M.rows:
        den = 1
        for v in row.values():
            for part in (v.re, v.im):
                den = den * part.denominator // gcd(den, part.denominator)
        out.append({j: (int(v.re * den), int(v.im * den)) for j, v in row.items() if v})
    return out


def bareiss_rank(M: MacaulayMatrix) -> int:
    """Fraction-free elimination over Z[i]."""
    rows = _integer_rows(M)
    ncols = len(M.columns)
    A = []
    for row in rows:
        dense = [(0, 0)] * ncols
        for j, v in row.items():
            dense[j] = v
        A.append(dense)
    m = len(A)
    prev = (1, 0)
    r = 0
    for col in range(ncols):
        if r == m:
            break
        pivot = next((i for i in range(r, m) if A[i][col] != (0, 0)), None)
        if pivot is None:
            continue
        A[r], A[pivot] = A[pivot], A[r]
        pr, pi = A[r][col]
        qn = prev[0] * prev[0] + prev[1] * prev[1]
        for i in range(r + 1, m):
            ar, ai = A[i][col]
            rowi, rowr = A[i], A[r]
            new = [(0, 0)] * ncols
            for j in range(col + 1, ncols):
                xr, xi = rowi[j]
                yr, yi = rowr[j]
                # pivot * x - a * y
                nr = pr * xr - pi * xi - (ar * yr - ai * yi)
                ni = pr * xi + pi * xr - (ar * yi + ai * yr)
                if nr or ni:
                    # exact division by the previous pivot
                    tr = nr * prev[0] + ni * prev[1]
                    ti = ni * prev[0] - nr * prev[1]
                    new[j] = (tr // qn, ti // qn)
            A[i] = new
        prev = (pr, pi)
        r += 1
    return r


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _gaussian_primes(count: int, start: int = (1 << 31) - 1):
    """Primes p = 1 (mod 4) below ``start`` with a square root of -1 mod p."""
    out = []
    p = start - (start % 4) + 1
    if p >= start:
        p -= 4
    while len(out) < count:
        if _is_prime(p):
            c = 2
            while pow(c, (p - 1) // 2, p) != p - 1:
                c += 1
            out.append((p, pow(c, (p - 1) // 4, p)))
        p -= 4
    return out


_PRIMES = _gaussian_primes(400)


def modular_rank(M: MacaulayMatrix, prime_index: int = 0, _rows=None) -> int:
    """Rank of the reduction modulo the ``prime_index``-th prime; a lower bound for the exact rank."""
    p, s = _PRIMES[prime_index]
    rows = _integer_rows(M) if _rows is None else _rows
    ncols = len(M.columns)
    A = np.zeros((len(rows), ncols), dtype=np.int64)
    for i, row in enumerate(rows):
        for j, (re, im) in row.items():
            A[i, j] = (re + s * im) % p
    return _rank_mod_p(A, p)


def _rank_mod_p(A, p) -> int:
    m, ncols = A.shape
    r = 0
    for col in range(ncols):
        if r == m:
            break
        nz = np.nonzero(A[r:, col])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        inv = pow(int(A[r, col]), p - 2, p)
        A[r] = (A[r] * inv) % p
        below = A[r + 1:, col]
        idx = np.nonzero(below)[0]
        if idx.size:
            rows = r + 1 + idx
            A[rows] = (A[rows] - below[idx, None] * A[r]) % p
        r += 1
    return r


def multimodular_rank(M: MacaulayMatrix) -> int:
    """Exact rank from reductions modulo many primes.

    If the true rank exceeded the largest modular rank ``r`` seen, some
    nonzero (r+1)-minor would be divisible by every prime used, so the
    product of the primes would be at most the squared Hadamard bound of that
    minor. Primes are added until the product exceeds the bound.
    """
    rows = _integer_rows(M)
    ncols = len(M.columns)
    log_norms = sorted(
        (math.log2(sum(a * a + b * b for a, b in row.values())) for row in rows if row), reverse=True
    )
    best = 0
    prime_bits = 0.0
    k = 0
    while True:
        best = max(best, modular_rank(M, k, rows))
        prime_bits += math.log2(_PRIMES[k][0])
        k += 1
        if best >= min(len(rows), ncols):
            return best
        bound_bits = sum(log_norms[: best + 1])
        if prime_bits > bound_bits:
            return best
        if k >= len(_PRIMES):
            _PRIMES.extend(_gaussian_primes(len(_PRIMES), _PRIMES[-1][0]))


def rank(M: MacaulayMatrix, method: str = "auto") -> int:
    """Exact rank over Q(i).

    ``method`` is ``"bareiss"``, ``"modular"`` or ``"auto"`` (first try one
    prime, accept a full-rank answer, otherwise pick by size).
    """
    if method == "bareiss":
        return bareiss_rank(M)
    if method == "modular":
        return multimodular_rank(M)
    if method != "auto":
        raise ValueError(f"unknown rank method {method!r}")
    m, ncols = M.shape
    if m == 0 or ncols == 0:
        return 0
    rows = _integer_rows(M)
    r = modular_rank(M, 0, rows)
    if r == min(m, ncols):
        return r
    if m * ncols <= BAREISS_MAX_ENTRIES:
        return bareiss_rank(M)
    return multimodular_rank(M)


def full_column_count(n: int, D: int) -> int:
    return comb(D + n, n)


def forms_from_rows(rows, n, D):
    """Helper for tests: turn coefficient rows back into forms of degree ``D``."""
    basis = monomial_basis(n, D)
    return [HomogeneousForm(n, D, {basis[j]: v for j, v in enumerate(r) if v}) for r in rows]
