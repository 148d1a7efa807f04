import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nevlab.curves import Curve
from nevlab.errors import BoundaryZero, IdenticallyZero
from nevlab.forms import HomogeneousForm, form, linear_form
from nevlab.nevanlinna import (
    ARGUMENT_PRINCIPLE,
    EXACT_ROOTS,
    RadiusGrid,
    aberth_roots,
    characteristic,
    circle_integral,
    counting,
    defect_estimate,
    fmt_residual,
    functional_rows,
    isolate_zeros,
    jensen_check,
    proximity,
    wronskian,
    write_csv,
)
from nevlab.poly import ExpPoly, Poly, UniRational
from nevlab.scalars import QI

z = Poly.z()
x0, x1 = linear_form([1, 0]), linear_form([0, 1])
line = Curve([1, z])
E = math.e


def closed_T_line(r):
    return 0.5 * math.log((1 + r * r) / 2)


def test_circle_integral_examples():
    assert abs(circle_integral(lambda w: np.log(np.abs(w)), E) - 1) < 1e-12
    assert abs(circle_integral(lambda w: np.log(np.abs(w - 2)), 1) - math.log(2)) < 1e-8
    assert circle_integral(lambda w: np.ones(w.shape), 3.0) == 1.0


def test_characteristic_examples():
    assert abs(characteristic(line, E) - 0.7168) < 1e-4
    assert abs(characteristic(line, E) - closed_T_line(E)) < 1e-10
    assert characteristic(Curve([1, 1], "poly"), 5.0) == pytest.approx(0, abs=1e-12)


def test_characteristic_monotone_and_unimodular_invariant():
    f = Curve([z - 1, z * z + QI(0, 1)])
    rot = QI(3, 4) / 5
    g = Curve([c * rot for c in f.polys()])
    radii = list(RadiusGrid.build(1, 50, 20))
    Ts = [characteristic(f, r) for r in radii]
    assert all(b >= a - 1e-12 for a, b in zip(Ts, Ts[1:]))
    assert max(abs(characteristic(g, r) - t) for r, t in zip(radii, Ts)) < 1e-8


def test_proximity_examples():
    assert abs(proximity(z, 3.0) - math.log(3)) < 1e-10
    assert proximity(UniRational(Poly.const(1), z), 2.0) == 0.0
    # |e^{it} - 2| >= 1 on the unit circle, so log+ is log
    assert abs(proximity(z - 2, 1.0) - math.log(2)) < 1e-10


def test_proximity_with_kinks_matches_dense_quadrature():
    phi = Poly(["2/3", "2/3"])
    dense = np.linspace(0, 2 * np.pi, 2_000_001)[:-1]
    ref = np.mean(np.maximum(np.log(np.abs(phi.eval_numeric(1.5 * np.exp(1j * dense)))), 0))
    assert abs(proximity(phi, 1.5) - ref) < 1e-8


def test_isolate_examples():
    d = isolate_zeros(z * z * (z - 1), 2)
    assert d.method == EXACT_ROOTS
    got = sorted((round(w.real, 9), m) for w, m in d.zeros)
    assert got == [(0.0, 2), (1.0, 1)]
    d = isolate_zeros(ExpPoly.exp(1) - 1, 7)
    assert d.method == ARGUMENT_PRINCIPLE and d.disk_winding == 3
    locs = sorted(w.imag for w, _ in d.zeros)
    assert np.allclose(locs, [-2 * np.pi, 0, 2 * np.pi], atol=1e-7)
    assert isolate_zeros((z - 3) ** 5, 2).zeros == []
    with pytest.raises(IdenticallyZero):
        isolate_zeros(Poly(), 1)


def test_isolate_nudges_boundary():
    d = isolate_zeros(z + 1, 1.0)
    assert d.nudged and d.degree() == 1


def test_exppoly_counts_and_conservation():
    g = ExpPoly.exp(1) - 1
    for r, k in [(1, 1), (7, 3), (13, 5)]:
        d = isolate_zeros(g, r)
        assert d.degree() == k == d.disk_winding
        assert sum(d.residues) >= k


def test_multiplicity_from_argument_principle():
    g = ExpPoly.exp(1) * 0 + (ExpPoly.exp(1) - 1) * (ExpPoly.exp(1) - 1)
    d = isolate_zeros(g, 1.0)
    assert d.zeros and d.zeros[0][1] == 2


def test_counting_examples():
    para = Curve([1, z * z])
    for r in (2.0, 5.0, 40.0):
        assert abs(counting(para, x1, r) - 2 * math.log(r)) < 1e-12
        assert abs(counting(para, x1, r, 1) - math.log(r)) < 1e-12
        assert counting(line, x0, r) == 0.0
    assert abs(counting(line, x0 + x1, E) - 1) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(-30, 30), st.integers(-30, 30), st.integers(1, 3)), min_size=1, max_size=4))
def test_counting_truncation_order(roots):
    p = Poly.const(1)
    for a, b, m in roots:
        p = p * (z - QI(a, b) / 7) ** m
    f = Curve([1, p])
    prev = None
    for r in (1.0, 2.0, 4.5, 9.0):
        vals = [counting(f, x1, r, M) for M in (1, 2, None)]
        assert 0 <= vals[0] <= vals[1] <= vals[2] + 1e-12
        if prev is not None:
            assert all(v >= pv - 1e-12 for v, pv in zip(vals, prev))
        prev = vals


def test_wronskian_examples():
    assert wronskian([1, z, z * z]).value == ExpPoly.coerce(2)
    assert wronskian([1, z, z * 2]).vanishes
    assert wronskian([ExpPoly.exp(1), ExpPoly.exp(2)]).value == ExpPoly.exp(3)


def test_wronskian_scaling_identity(rng):
    for _ in range(5):
        fs = [Poly([rng.randint(-3, 3) for _ in range(4)]) for _ in range(3)]
        h = Poly([rng.randint(-3, 3) for _ in range(3)])
        if h.is_zero():
            continue
        lhs = wronskian([h * f for f in fs]).value
        assert lhs == ExpPoly.coerce(h) ** 3 * wronskian(fs).value


def test_jensen_examples():
    assert jensen_check(z - 2, 1.0) < 1e-8
    assert jensen_check(z, E) < 1e-8
    assert jensen_check(z * z - 1, 2.0) < 1e-8
    with pytest.raises(BoundaryZero):
        jensen_check(z - 1, 1.0)


def test_aberth_accuracy(rng):
    for _ in range(20):
        roots = [complex(rng.uniform(-3, 3), rng.uniform(-3, 3)) for _ in range(rng.randint(1, 8))]
        p = Poly.from_roots([QI.coerce(complex(round(w.real, 3), round(w.imag, 3))) for w in roots])
        got = aberth_roots(p)
        for w in got:
            assert abs(complex(p.eval_numeric(np.array([w]))[0])) < 1e-9 * max(1, abs(w)) ** len(roots)


def test_fmt_residual_examples():
    radii = [2.0, 4.0, 8.0, 16.0]
    res = fmt_residual(line, x1, radii)
    assert max(res) - min(res) < 1e-6
    assert abs(res[0] + 0.5 * math.log(2)) < 1e-9
    res0 = fmt_residual(line, x0, radii)
    assert max(res0) - min(res0) < 1e-6
    para = Curve([1, z * z])
    res2 = fmt_residual(para, form(1, {(1, 1): 1}), radii)
    assert max(abs(v + math.log(2)) for v in res2) < 1e-8


def test_fmt_residual_bounded_on_polynomial_suite():
    grid = RadiusGrid.build(2, 1000, 12)
    T = characteristic(line, 1000)
    for Q in (x0, x1, x0 + x1):
        res = fmt_residual(line, Q, grid)
        assert max(res) - min(res) < 0.05 * T


def test_defect_examples():
    grid = RadiusGrid.build(2, 1e3, 16)
    with pytest.warns(UserWarning):
        assert defect_estimate(line, x0, None, grid).value == 1.0
    assert defect_estimate(line, x1, None, RadiusGrid.build(2, 1e9, 16)).value == 0.0
    d = defect_estimate(Curve([1, z * z]), x1, 1, RadiusGrid.build(2, 1e12, 16))
    assert abs(d.value - 0.5) < 0.05


def test_radius_grid_validation():
    with pytest.raises(Exception):
        RadiusGrid((2.0, 1.0))
    with pytest.raises(Exception):
        RadiusGrid((0.5, 2.0))
    g = RadiusGrid.build(2, 60, 16)
    assert len(g) == 16 and g.radii[0] == 2.0 and abs(g.radii[-1] - 60) < 1e-12
    assert len(g.tail()) == 8


def test_functional_csv(tmp_path):
    header, rows = functional_rows(line, [x0, x1], RadiusGrid.build(2, 16, 4), M=1)
    path = tmp_path / "f.csv"
    write_csv(path, header, rows)
    lines = path.read_text().splitlines()
    assert len(lines) == 5 and lines[0].startswith("r,T_f")
    for line_ in lines[1:]:
        for v in line_.split(","):
            digits = v.split("e")[0].replace("-", "").replace(".", "").lstrip("0")
            assert len(digits) <= 12
