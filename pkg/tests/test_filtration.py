import itertools
import math
import warnings
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nevlab.errors import InvalidShape, NotDivisible
from nevlab.filtration import (
    HugeInt,
    decimal_to_int,
    filtration_profile,
    int_to_decimal,
    quotient_dim_combinatorial,
    quotient_dim_rank,
    ratio_bound_check,
    theorem_constants,
    truncate,
    truncation_degree,
)
from nevlab.forms import form, linear_form


def brute_count(n, d, L):
    return sum(1 for s in itertools.product(range(d), repeat=n) if sum(s) <= L)


def test_quotient_dim_examples():
    assert quotient_dim_combinatorial(2, 2, 4) == 4
    assert quotient_dim_combinatorial(2, 3, 3) == 8
    assert quotient_dim_combinatorial(1, 1, 0) == 1


@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 14))
def test_quotient_dim_matches_enumeration(n, d, L):
    assert quotient_dim_combinatorial(n, d, L) == brute_count(n, d, L)


def test_quotient_dim_rank_examples():
    assert quotient_dim_rank([linear_form([1, 0, 0]), linear_form([0, 1, 0])], 5) == 1
    assert quotient_dim_rank([form(2, {(2, 0, 0): 1}), form(2, {(0, 2, 0): 1})], 4) == 4
    assert quotient_dim_rank([linear_form([0, 1])], 3) == 1


def test_profile_examples():
    p = filtration_profile(1, 1, 3)
    assert p.K == 4 and p.weights() == [1, 1, 1, 1] and p.A == 6 and p.A_bound == 3
    p = filtration_profile(1, 2, 4)
    assert p.K == 3 and p.weights() == [2, 2, 1] and p.A == 4 and p.A_bound == 2
    p = filtration_profile(2, 1, 2)
    assert p.K == 6
    sums = p.coordinate_sums()
    assert sums[0] == sums[1] == p.A
    with pytest.raises(NotDivisible):
        filtration_profile(2, 3, 7)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 8))
def test_profile_invariants(n, d, k):
    p = filtration_profile(n, d, d * k)
    tuples = list(p.tuples())
    assert len(tuples) == p.K == comb(k + n, n)
    assert tuples == sorted(tuples)
    for t in tuples:
        if sum(t) <= k - n:
            assert p.weight(sum(t)) == d ** n
    assert set(p.coordinate_sums()) == {p.A}
    assert p.A >= d ** n * comb(k, n + 1)


def test_constants_example():
    c = theorem_constants(1, 1, 3, 1, [1, 1, 1])
    assert (c.d, c.L, c.u, c.B_bound, c.p0) == (1, 18, 19, 1026, 6649 ** 2)
    assert c.p0 == 44209201
    assert c.L0 == 19 * 44209201 ** 1024 - 1
    assert c.L0_digits == len(int_to_decimal(c.L0))
    assert theorem_constants(1, 2, 6, 1, [1] * 6).L == 34
    with pytest.warns(UserWarning):
        v = theorem_constants(1, 1, 2, 1, [1, 1])
    assert v.vacuous


def test_constants_validation_and_lcm():
    with pytest.raises(InvalidShape):
        theorem_constants(2, 1, 3, 1, [1, 1, 1])
    with pytest.raises(InvalidShape):
        theorem_constants(1, 1, 2, 1, [1, 1, 1])
    with pytest.raises(InvalidShape):
        theorem_constants(1, 1, 3, 0, [1, 1, 1])
    c = theorem_constants(1, 1, 3, 1, [2, 3, 1], max_exact_digits=10)
    assert c.d == 6 and c.L % 6 == 0
    assert isinstance(c.L0, HugeInt) and not c.L0_exact


def test_constants_json_big_integers_roundtrip():
    c = theorem_constants(1, 1, 3, 1, [1, 1, 1])
    data = c.to_json()
    assert decimal_to_int(data["L0"]) == c.L0
    assert data["p0"] == "44209201"


def test_constants_monotone():
    for n, N in [(1, 1), (1, 2), (2, 2), (2, 4)]:
        Ls = [truncation_degree(n, N, 1, Fraction(1, k)) for k in (1, 2, 3, 4)]
        assert Ls == sorted(Ls)
    for eps in (Fraction(1), Fraction(1, 3)):
        Ls = [truncation_degree(1, N, 2, eps) for N in range(1, 6)]
        assert Ls == sorted(Ls)


def test_ratio_check_examples():
    r = ratio_bound_check(1, 1, 1, 1)
    assert r.L == 18 and r.A == 171 and r.ratio == 2 and r.ratio_bound == Fraction(5, 2)
    assert r.ratio <= Fraction(9, 4)
    r2 = ratio_bound_check(2, 2, 1, 1)
    x, lhs, rhs = r2.power_samples[-1]
    assert x == Fraction(1, 9) and lhs <= rhs
    assert r2.power_samples[0][1] == r2.power_samples[0][2] == 1


def test_truncate_with_huge_cap():
    big = HugeInt(19, 44209201, 1024)
    assert truncate(5, big) == 5
    assert truncate(5, None) == 5
    assert truncate(5, 2) == 2
